#include "polysz/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <toml.hpp>

#include "polysz/acceptance.hpp"
#include "polysz/budget.hpp"
#include "polysz/counting.hpp"
#include "polysz/errors.hpp"
#include "polysz/fourier.hpp"
#include "polysz/pet.hpp"
#include "polysz/poly.hpp"
#include "polysz/ring.hpp"
#include "polysz/sweep.hpp"
#include "polysz/symbolic.hpp"

namespace polysz::cli {

using nlohmann::json;

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp" + std::to_string(std::random_device{}());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename into " + path + ": " + ec.message());
    }
}

namespace {

// Usage problems found after CLI11 parsing succeeded.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

json cjson(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}}; }

json bigjson(const BigInt& x) { return x.str(); }

json family_json(const std::vector<IntPoly>& f) {
    json a = json::array();
    for (auto& p : f) a.push_back(p.to_string());
    return a;
}

// The record every computing subcommand emits.
json record(const std::string& ring, const std::string& family, json value, std::optional<double> bound,
            bool applies, double runtime_ms) {
    json r;
    r["ring"] = ring.empty() ? json(nullptr) : json(ring);
    r["family"] = family.empty() ? json(nullptr) : json(family);
    r["value"] = std::move(value);
    r["bound"] = bound ? json(*bound) : json(nullptr);
    r["bound_applies"] = bound.has_value() && applies;
    r["runtime_ms"] = runtime_ms;
    return r;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& s, const char* what) {
    std::vector<std::uint64_t> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
        if (tok.empty()) continue;
        std::size_t used = 0;
        std::uint64_t v = 0;
        try {
            v = std::stoull(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size() || tok[0] == '-') throw UsageError(std::string("bad ") + what + " entry '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

RingPtr load_ring(const std::string& spec) { return make_ring(RingSpec::parse(spec)); }

// f_0..f_{count-1}: the given sources, then random:<seed + i> for the rest.
std::vector<FunctionOnRing> load_functions(const RingPtr& R, const std::vector<std::string>& srcs, std::size_t count,
                                           std::uint64_t seed) {
    if (srcs.size() > count)
        throw UsageError("got " + std::to_string(srcs.size()) + " functions, the family takes " + std::to_string(count));
    std::vector<FunctionOnRing> F;
    for (std::size_t i = 0; i < count; ++i)
        F.push_back(i < srcs.size() ? function_from_source(R, srcs[i])
                                    : FunctionOnRing::random_bounded(R, seed + i));
    return F;
}

// all | random:<seed>[:<density>] | comma list of element indices | any function source (its support)
std::vector<Elem> load_set(const RingPtr& R, const std::string& src) {
    std::vector<Elem> out;
    if (src == "all") {
        for (std::uint64_t i = 0; i < R->size(); ++i) out.push_back(static_cast<Elem>(i));
        return out;
    }
    if (src.rfind("random:", 0) == 0) {
        auto parts = src.substr(7);
        double density = 0.5;
        auto colon = parts.find(':');
        std::uint64_t seed = 0;
        try {
            seed = std::stoull(parts.substr(0, colon));
            if (colon != std::string::npos) density = std::stod(parts.substr(colon + 1));
        } catch (const std::exception&) {
            throw UsageError("bad set source '" + src + "'");
        }
        if (density < 0 || density > 1) throw UsageError("set density must lie in [0, 1]");
        std::mt19937_64 rng(seed);
        std::bernoulli_distribution coin(density);
        for (std::uint64_t i = 0; i < R->size(); ++i)
            if (coin(rng)) out.push_back(static_cast<Elem>(i));
        return out;
    }
    if (src.empty() || src.find(':') == std::string::npos) {
        for (auto v : parse_u64_list(src, "set")) {
            if (v >= R->size()) throw UsageError("set element " + std::to_string(v) + " is outside the ring");
            out.push_back(static_cast<Elem>(v));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    auto f = function_from_source(R, src);
    for (std::uint64_t i = 0; i < R->size(); ++i)
        if (std::abs(f.values()[i]) > 0) out.push_back(static_cast<Elem>(i));
    return out;
}

WeightPair parse_pair(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw UsageError("weight pair '" + s + "': expected m:a1,a2,...");
    auto m = parse_u64_list(s.substr(0, colon), "weight pair");
    if (m.size() != 1) throw UsageError("weight pair '" + s + "': expected m:a1,a2,...");
    WeightPair p(m[0], parse_u64_list(s.substr(colon + 1), "weight pair"));
    if (!p.valid()) throw UsageError("weight pair '" + s + "' is not valid (need m >= 1 and a_1 + ... <= m)");
    return p;
}

json pair_json(const WeightPair& p) { return p.to_string(); }

json pet_step_json(const PetStepResult& r) {
    json j;
    j["m_prime"] = r.m_prime;
    j["new_family"] = family_json(r.new_family);
    j["new_function_labels"] = r.new_function_labels;
    j["selected_h"] = r.selected_h;
    j["branch"] = std::string(1, r.branch);
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["lambda_Q"] = r.lambda_Q;
    j["vdc_G"] = r.vdc_G;
    j["excluded_size"] = r.excluded_size;
    j["M"] = r.M;
    j["H"] = r.H;
    j["k"] = r.k;
    j["new_height"] = r.new_height;
    j["height_bound"] = bigjson(r.height_bound);
    j["weight_pair_before"] = pair_json(r.before);
    j["weight_pair_after"] = pair_json(r.after);
    j["reindexed"] = family_json(r.detail.reindexed);
    if (r.detail.i_prime) j["i_prime"] = *r.detail.i_prime;
    j["checks"] = {{"permissible", r.checks.permissible}, {"distinct", r.checks.distinct},
                   {"height", r.checks.height},           {"traceable", r.checks.traceable},
                   {"inequality", r.checks.inequality},   {"shape", r.checks.shape}};
    return j;
}

SweepConfig::Functions parse_functions_kind(const std::string& s) {
    if (s == "random") return SweepConfig::Functions::Random;
    if (s == "indicator") return SweepConfig::Functions::Indicator;
    throw UsageError("functions must be 'random' or 'indicator', got '" + s + "'");
}

// Reads a sweep config from TOML or JSON (chosen by extension) into `cfg`.
// Output paths found in the file are returned through csv/json_out when not already set.
void load_sweep_config(const std::string& path, SweepConfig& cfg, std::string& csv, std::string& json_out) {
    namespace fs = std::filesystem;
    if (!fs::exists(path)) throw UsageError("config file " + path + " does not exist");
    auto ext = fs::path(path).extension().string();
    std::vector<std::string> rings, family;
    std::optional<std::int64_t> trials, seed;
    std::optional<std::string> functions, out_csv, out_json;
    std::optional<double> density;
    std::optional<std::string> family_text;
    if (ext == ".json") {
        std::ifstream in(path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError(path + ": " + e.what());
        }
        try {
            if (j.contains("rings")) rings = j["rings"].get<std::vector<std::string>>();
            if (j.contains("family")) {
                if (j["family"].is_string())
                    family_text = j["family"].get<std::string>();
                else
                    family = j["family"].get<std::vector<std::string>>();
            }
            if (j.contains("trials")) trials = j["trials"].get<std::int64_t>();
            if (j.contains("seed")) seed = j["seed"].get<std::int64_t>();
            if (j.contains("functions")) functions = j["functions"].get<std::string>();
            if (j.contains("density")) density = j["density"].get<double>();
            if (j.contains("outputs")) {
                auto& o = j["outputs"];
                if (o.contains("csv")) out_csv = o["csv"].get<std::string>();
                if (o.contains("json")) out_json = o["json"].get<std::string>();
            }
        } catch (const json::exception& e) {
            throw UsageError(path + ": " + e.what());
        }
    } else if (ext == ".toml") {
        toml::table t;
        try {
            t = toml::parse_file(path);
        } catch (const toml::parse_error& e) {
            throw UsageError(path + ": " + std::string(e.description()));
        }
        if (auto a = t["rings"].as_array())
            for (auto& v : *a) {
                auto s = v.value<std::string>();
                if (!s) throw UsageError(path + ": rings must be strings");
                rings.push_back(*s);
            }
        if (auto s = t["family"].value<std::string>()) {
            family_text = *s;
        } else if (auto a = t["family"].as_array()) {
            for (auto& v : *a) {
                auto s2 = v.value<std::string>();
                if (!s2) throw UsageError(path + ": family members must be strings");
                family.push_back(*s2);
            }
        }
        if (auto v = t["trials"].value<std::int64_t>()) trials = *v;
        if (auto v = t["seed"].value<std::int64_t>()) seed = *v;
        if (auto v = t["functions"].value<std::string>()) functions = *v;
        if (auto v = t["density"].value<double>()) density = *v;
        if (auto v = t["outputs"]["csv"].value<std::string>()) out_csv = *v;
        if (auto v = t["outputs"]["json"].value<std::string>()) out_json = *v;
    } else {
        throw UsageError("config file must end in .toml or .json");
    }
    if (!rings.empty()) cfg.rings = rings;
    if (family_text) cfg.family = IntPoly::parse_family(*family_text);
    if (!family.empty()) {
        cfg.family.clear();
        for (auto& s : family) cfg.family.push_back(IntPoly::parse(s));
    }
    if (trials) {
        if (*trials < 0) throw UsageError("trials must be >= 1");
        cfg.trials = static_cast<unsigned>(*trials);
    }
    if (seed) cfg.seed = static_cast<std::uint64_t>(*seed);
    if (functions) cfg.functions = parse_functions_kind(*functions);
    if (density) cfg.density = *density;
    if (csv.empty() && out_csv) csv = *out_csv;
    if (json_out.empty() && out_json) json_out = *out_json;
}

struct Options {
    std::optional<std::uint64_t> budget;
    std::string out;
    bool compact = false;

    std::string ring;
    std::string family;
    unsigned n_vars = 0;
    std::vector<std::string> funcs;
    std::uint64_t seed = 0;

    // charsum
    std::optional<std::uint64_t> chi;
    unsigned hadamard_m = 0;
    std::string qfamily, psi;
    // gowers
    unsigned s = 2;
    std::string method = "auto";
    // config-count
    std::vector<std::string> sets;
    // roots
    std::string poly;
    // intersective
    std::uint64_t k_max = 50;
    // pet-step
    std::uint64_t H = 0;
    std::string h;
    bool strict = false;
    std::optional<std::size_t> pivot;
    // pet-diagram
    std::vector<std::string> substs, constraints, forces;
    unsigned max_steps = 64;
    bool as_json = false;
    // pet-bounds
    std::optional<std::uint64_t> m;
    std::optional<unsigned> d;
    std::string pair;
    std::uint64_t cap = 6;
    // us-trace
    std::size_t target = 0;
    std::string Hs;
    // sweep
    std::string config;
    std::vector<std::string> rings;
    std::optional<unsigned> trials;
    std::optional<std::uint64_t> sweep_seed;
    std::string functions_kind;
    std::optional<double> density;
    std::string csv_out, json_out;
    // selftest
    bool full = false;
    std::vector<int> only;
};

class Runner {
public:
    Runner(const Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

    void emit_json(const json& j) { emit_text(j.dump(o_.compact ? -1 : 2) + "\n"); }

    void emit_text(const std::string& s) {
        if (o_.out.empty())
            out_ << s;
        else
            write_file_atomic(o_.out, s);
    }

    std::vector<IntPoly> family() const {
        if (o_.family.empty()) throw UsageError("--family is required");
        return IntPoly::parse_family(o_.family, o_.n_vars);
    }

    int ring() {
        auto t0 = Clock::now();
        auto R = load_ring(o_.ring);
        auto& add = R->additive();
        json j;
        j["ring"] = R->spec().to_string();
        j["size"] = R->size();
        j["char"] = R->characteristic();
        j["lpf"] = R->lpf();
        j["factors"] = add.invariant_factors;
        json comps = json::array();
        for (auto& c : R->components()) comps.push_back(c.to_string());
        j["components"] = comps;
        std::uint64_t units = 0;
        for (std::uint64_t x = 0; x < R->size(); ++x) units += R->is_unit(static_cast<Elem>(x));
        j["units"] = units;
        j["runtime_ms"] = ms_since(t0);
        emit_json(j);
        return kOk;
    }

    int charsum() {
        auto t0 = Clock::now();
        auto R = load_ring(o_.ring);
        if (o_.hadamard_m) {
            if (!o_.chi) throw UsageError("--chi is required");
            auto v = hadamard_char_sum(*R, *o_.chi, o_.hadamard_m);
            json j = record(R->spec().to_string(), "", std::abs(v.value), v.bound, v.bound_applies, ms_since(t0));
            j["sum"] = cjson(v.value);
            j["chi"] = *o_.chi;
            j["m"] = o_.hadamard_m;
            if (!v.note.empty()) j["note"] = v.note;
            emit_json(j);
            return kOk;
        }
        if (o_.qfamily.empty()) throw UsageError("give --m for a product sum or --q for a polynomial sum");
        auto Q = IntPoly::parse_family(o_.qfamily, o_.n_vars);
        std::vector<std::uint64_t> psi;
        if (!o_.psi.empty())
            psi = parse_u64_list(o_.psi, "psi");
        else if (o_.chi)
            psi.assign(Q.size(), *o_.chi);
        if (psi.size() != Q.size()) throw UsageError("--psi needs one character index per polynomial");
        auto v = char_sum(*R, Q, psi);
        json j = record(R->spec().to_string(), family_to_string(Q), std::abs(v.value), v.bound, v.bound_applies,
                        ms_since(t0));
        j["sum"] = cjson(v.value);
        j["psi"] = psi;
        if (!v.note.empty()) j["note"] = v.note;
        emit_json(j);
        return kOk;
    }

    int gowers() {
        auto t0 = Clock::now();
        auto R = load_ring(o_.ring);
        auto F = load_functions(R, o_.funcs, 1, o_.seed);
        GowersMethod m = GowersMethod::Auto;
        if (o_.method == "direct")
            m = GowersMethod::Direct;
        else if (o_.method == "recursive")
            m = GowersMethod::Recursive;
        else if (o_.method != "auto")
            throw UsageError("--method must be auto, direct or recursive");
        double v = gowers_norm(F[0], o_.s, m);
        json j = record(R->spec().to_string(), "", v, std::nullopt, false, ms_since(t0));
        j["s"] = o_.s;
        j["power"] = gowers_power(F[0], o_.s, m);
        emit_json(j);
        return kOk;
    }

    int lambda_cmd() {
        auto t0 = Clock::now();
        auto R = load_ring(o_.ring);
        auto P = family();
        LambdaQuery q{R, P, load_functions(R, o_.funcs, P.size() + 1, o_.seed), {}, {}};
        if (!o_.qfamily.empty()) {
            q.Q = IntPoly::parse_family(o_.qfamily, P[0].n_vars());
            q.Psi = parse_u64_list(o_.psi, "psi");
        }
        cplx v = lambda(q);
        double disc = main_discrepancy(q);
        auto b = sweep_bound(*R, P);
        json j = record(R->spec().to_string(), family_to_string(P), std::abs(v), b.bound,
                        b.bound_applies && q.Q.empty(), ms_since(t0));
        j["lambda"] = cjson(v);
        j["discrepancy"] = disc;
        emit_json(j);
        return kOk;
    }

    int config_count() {
        auto t0 = Clock::now();
        auto R = load_ring(o_.ring);
        auto P = family();
        if (o_.sets.size() > P.size() + 1)
            throw UsageError("got " + std::to_string(o_.sets.size()) + " sets, the family takes " +
                             std::to_string(P.size() + 1));
        std::vector<std::vector<Elem>> A;
        for (std::size_t i = 0; i <= P.size(); ++i) A.push_back(load_set(R, i < o_.sets.size() ? o_.sets[i] : "all"));
        auto c = count_configurations(*R, P, A);
        auto b = degenerate_bound(*R, P, A[0].size());
        json j = record(R->spec().to_string(), family_to_string(P), c.M1, b.bound, b.bound_applies, ms_since(t0));
        j["M"] = c.M;
        j["M1"] = c.M1;
        j["M2"] = c.M2;
        j["S"] = c.S;
        j["bound_is_for"] = "M2";
        if (auto w = find_nontrivial_config(*R, P, A)) j["witness"] = {{"x", w->x}, {"y", w->y}};
        emit_json(j);
        return kOk;
    }

    int roots() {
        auto t0 = Clock::now();
        auto R = load_ring(o_.ring);
        if (o_.poly.empty()) throw UsageError("--poly is required");
        auto P = IntPoly::parse(o_.poly, o_.n_vars);
        auto r = count_roots(*R, P);
        json j = record(R->spec().to_string(), P.to_string(), r.count, r.bound, r.bound_applies, ms_since(t0));
        if (!r.note.empty()) j["note"] = r.note;
        emit_json(j);
        return kOk;
    }

    int intersective() {
        auto t0 = Clock::now();
        auto P = family();
        auto r = jointly_intersective_up_to(P, o_.k_max);
        json j = record("", family_to_string(P), r.ok, std::nullopt, false, ms_since(t0));
        j["k_max"] = o_.k_max;
        j["first_failure"] = r.first_failure ? json(*r.first_failure) : json(nullptr);
        emit_json(j);
        return kOk;
    }

    PetOptions pet_options() const {
        PetOptions opt;
        if (o_.strict) opt.policy = SelectionPolicy::Strict;
        opt.forced_pivot = o_.pivot;
        return opt;
    }

    int pet_step_cmd() {
        auto t0 = Clock::now();
        auto R = load_ring(o_.ring);
        auto P = family();
        auto F = load_functions(R, o_.funcs, P.size() + 1, o_.seed);
        std::uint64_t H = o_.H ? o_.H : default_H(R->lpf(), 1);
        auto opt = pet_options();
        PetStepResult r;
        if (!o_.h.empty()) {
            auto h = parse_u64_list(o_.h, "h");
            r = pet_transform(R, P, F, H, h, opt);
        } else {
            r = pet_step(R, P, F, H, opt);
        }
        json j = record(R->spec().to_string(), family_to_string(P), r.lhs, r.rhs, true, ms_since(t0));
        j["step"] = pet_step_json(r);
        emit_json(j);
        return r.checks.all() ? kOk : kHypothesis;
    }

    int pet_diagram() {
        auto P = family();
        DiagramOptions opt;
        if (o_.strict) opt.policy = SelectionPolicy::Strict;
        for (auto& s : o_.substs) opt.substitutions.push_back(Substitution::parse(s));
        for (auto& c : o_.constraints) opt.constraints.push_back(Constraint::parse(c));
        for (auto& f : o_.forces) {
            auto eq = f.find('=');
            if (eq == std::string::npos) throw UsageError("--force expects step=index, got '" + f + "'");
            auto step = parse_u64_list(f.substr(0, eq), "force");
            auto idx = parse_u64_list(f.substr(eq + 1), "force");
            if (step.size() != 1 || idx.size() != 1) throw UsageError("--force expects step=index, got '" + f + "'");
            opt.forced[static_cast<unsigned>(step[0])] = idx[0];
        }
        opt.max_steps = o_.max_steps;
        auto d = symbolic_diagram(P, opt);
        if (o_.as_json)
            emit_text(d.to_json(o_.compact ? -1 : 2) + "\n");
        else
            emit_text(d.to_text());
        return kOk;
    }

    int pet_bounds() {
        auto t0 = Clock::now();
        json j;
        if (o_.m || o_.d) {
            if (!o_.m || !o_.d) throw UsageError("--m and --d go together");
            auto tb = t_bound(*o_.m, *o_.d);
            j["t_bound"] = {{"m", *o_.m}, {"d", *o_.d}, {"value", tb.to_string()}, {"saturated", tb.saturated}};
        }
        if (!o_.pair.empty()) {
            auto p = parse_pair(o_.pair);
            unsigned n = o_.n_vars ? o_.n_vars : 1;
            json pj;
            pj["pair"] = p.to_string();
            pj["n"] = n;
            pj["class"] = to_string(classify(p, n));
            pj["lonely"] = is_lonely(p, n);
            if (classify(p, n) != PairClass::Deg0) {
                json succ = json::array();
                for (auto& q : permissible_successors(p, n)) succ.push_back(q.to_string());
                pj["successors"] = succ;
                pj["max_path_length"] = max_path_length(p, n, std::max<std::uint64_t>(o_.cap, p.m));
                pj["cap"] = std::max<std::uint64_t>(o_.cap, p.m);
                auto tb = t_bound(p.m, static_cast<unsigned>(std::max<std::size_t>(p.seq.size(), 1)));
                pj["t_bound"] = tb.to_string();
            }
            j["pair"] = pj;
        }
        if (j.empty()) throw UsageError("give --m and --d, or --pair");
        j["runtime_ms"] = ms_since(t0);
        emit_json(j);
        return kOk;
    }

    int us_trace() {
        auto t0 = Clock::now();
        auto R = load_ring(o_.ring);
        auto P = family();
        auto F = load_functions(R, o_.funcs, P.size() + 1, o_.seed);
        std::vector<std::uint64_t> H;
        if (!o_.Hs.empty()) H = parse_u64_list(o_.Hs, "H");
        auto tr = us_control_trace(R, P, F, o_.target, H);
        json j = record(R->spec().to_string(), family_to_string(P), tr.lambda_abs, tr.final_bound, tr.certified,
                        ms_since(t0));
        json t;
        t["target"] = tr.target;
        t["linear_path"] = tr.linear_path;
        t["start_family"] = family_json(tr.start_family);
        t["start_labels"] = tr.start_labels;
        t["H"] = tr.H;
        json steps = json::array();
        for (auto& s : tr.steps) steps.push_back(pet_step_json(s));
        t["steps"] = steps;
        t["linear_family"] = family_json(tr.linear_family);
        auto mat = [](const BigMatrix& A) {
            json a = json::array();
            for (auto& row : A) {
                json r = json::array();
                for (auto& v : row) r.push_back(v.str());
                a.push_back(r);
            }
            return a;
        };
        t["A"] = mat(tr.A);
        t["B"] = mat(tr.B);
        json ops = json::array();
        for (auto& op : tr.ops) ops.push_back({{"target", op.target}, {"source", op.source}, {"C", op.C.str()}});
        t["ops"] = ops;
        t["ud_coeffs"] = tr.ud_coeffs;
        t["ud_lhs"] = tr.ud_lhs;
        t["ud_rhs"] = tr.ud_rhs;
        t["m_D"] = tr.m_D;
        if (tr.linear_path) {
            t["u1_bound"] = tr.u1_bound;
            t["gauss_jordan_max"] = tr.gauss_jordan_max.str();
        }
        t["certified"] = tr.certified;
        t["notes"] = tr.notes;
        j["trace"] = t;
        emit_json(j);
        return kOk;
    }

    int sweep_cmd() {
        SweepConfig cfg;
        std::string csv = o_.csv_out, js = o_.json_out;
        if (!o_.config.empty()) load_sweep_config(o_.config, cfg, csv, js);
        if (!o_.rings.empty()) cfg.rings = o_.rings;
        if (!o_.family.empty()) cfg.family = family();
        if (o_.trials) cfg.trials = *o_.trials;
        if (o_.sweep_seed) cfg.seed = *o_.sweep_seed;
        if (!o_.functions_kind.empty()) cfg.functions = parse_functions_kind(o_.functions_kind);
        if (o_.density) cfg.density = *o_.density;
        if (cfg.trials < 1) throw UsageError("trials must be >= 1");
        if (cfg.rings.empty()) throw UsageError("no rings given (--ring or a config file)");
        if (cfg.family.empty()) throw UsageError("no family given (--family or a config file)");
        auto t0 = Clock::now();
        auto res = sweep(cfg);
        double ms = ms_since(t0);
        std::string text = res.to_csv();
        if (!csv.empty())
            write_file_atomic(csv, text);
        else if (js.empty())
            emit_text(text);
        if (!js.empty()) {
            json a = json::array();
            for (auto& s : res.summary) {
                json r = record(s.ring, family_to_string(cfg.family), s.discrepancy, s.bound.bound, s.bound.bound_applies,
                                ms);
                r["N"] = s.N;
                r["lpf"] = s.lpf;
                r["size"] = s.size;
                r["trials"] = cfg.trials;
                r["seed"] = cfg.seed;
                if (!s.error.empty()) r["error"] = s.error;
                a.push_back(r);
            }
            write_file_atomic(js, a.dump(2) + "\n");
        }
        bool flagged = std::any_of(res.summary.begin(), res.summary.end(), [](auto& s) { return !s.error.empty(); });
        if (flagged) err_ << "some rings were skipped; see the error column\n";
        return kOk;
    }

    int selftest() {
        auto scale = o_.full ? acceptance::Scale::Full : acceptance::Scale::Quick;
        bool ok = true;
        std::ostringstream text;
        acceptance::run_all(scale, o_.only, [&](const acceptance::Result& r) {
            ok = ok && r.pass;
            auto line = acceptance::format_line(r) + "\n";
            if (o_.out.empty())
                out_ << line << std::flush;
            text << line;
        });
        if (!o_.out.empty()) write_file_atomic(o_.out, text.str());
        return ok ? kOk : kHypothesis;
    }

private:
    const Options& o_;
    std::ostream& out_;
    std::ostream& err_;
};

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Polynomial configuration experiments over finite commutative rings", "polysz"};
    app.require_subcommand(1);
    app.add_option("--budget", o.budget, "Override the enumeration cap (default 1e8)");
    app.add_option("--out", o.out, "Write the output to this file (atomically) instead of stdout");
    app.add_flag("--compact", o.compact, "Single-line JSON");

    auto add_ring = [&](CLI::App* c) { c->add_option("ring", o.ring, "Ring spec, e.g. zmod:15, pgr:6:x^2-2")->required(); };
    auto add_family = [&](CLI::App* c, bool required) {
        auto opt = c->add_option("--family,-P", o.family, "Comma-separated polynomials in y or y1..y9");
        if (required) opt->required();
        c->add_option("--n", o.n_vars, "Number of variables (default: inferred)");
    };
    auto add_funcs = [&](CLI::App* c) {
        c->add_option("--f", o.funcs, "Function sources f0, f1, ... (csv:, indicator:, random:, const:, z6-counterexample:)");
        c->add_option("--seed", o.seed, "Seed for functions not given with --f");
    };

    auto* ring = app.add_subcommand("ring", "Ring metadata");
    add_ring(ring);

    auto* charsum = app.add_subcommand("charsum", "Character sums with their bounds");
    add_ring(charsum);
    charsum->add_option("--chi", o.chi, "Character index");
    charsum->add_option("--m", o.hadamard_m, "Average chi(h_1 ... h_m) over R^m");
    charsum->add_option("--q", o.qfamily, "Polynomials Q_j for avg_y prod psi_j(Q_j(y))");
    charsum->add_option("--psi", o.psi, "Character indices psi_j, comma-separated");
    charsum->add_option("--n", o.n_vars, "Number of variables");

    auto* gowers = app.add_subcommand("gowers", "Gowers uniformity norm of a function");
    add_ring(gowers);
    add_funcs(gowers);
    gowers->add_option("--s", o.s, "Norm order")->check(CLI::Range(1, 8));
    gowers->add_option("--method", o.method, "auto | direct | recursive");

    auto* lam = app.add_subcommand("lambda", "Polynomial average and its discrepancy");
    add_ring(lam);
    add_family(lam, true);
    add_funcs(lam);
    lam->add_option("--q", o.qfamily, "Polynomials Q_j twisting the average");
    lam->add_option("--psi", o.psi, "Character indices psi_j");

    auto* cc = app.add_subcommand("config-count", "Count configurations in given sets");
    add_ring(cc);
    add_family(cc, true);
    cc->add_option("--set", o.sets, "Sets A_0, A_1, ...: all | random:<seed>[:<density>] | 0,3,5 | indicator:<path>");

    auto* roots = app.add_subcommand("roots", "Count roots of a polynomial");
    add_ring(roots);
    roots->add_option("--poly", o.poly, "Polynomial")->required();
    roots->add_option("--n", o.n_vars, "Number of variables");

    auto* inter = app.add_subcommand("intersective", "Joint intersectivity up to a modulus");
    add_family(inter, true);
    inter->add_option("--k", o.k_max, "Largest modulus checked");

    auto* ps = app.add_subcommand("pet-step", "One numeric PET step on Z_N");
    add_ring(ps);
    add_family(ps, true);
    add_funcs(ps);
    ps->add_option("--H", o.H, "Window size (default from lpf)");
    ps->add_option("--shift", o.h, "Prescribed shift h, comma-separated");
    ps->add_flag("--strict", o.strict, "Fail on an ambiguous differencing choice");
    ps->add_option("--pivot", o.pivot, "Index of the differencing member");

    auto* pd = app.add_subcommand("pet-diagram", "Symbolic PET diagram");
    pd->add_option("family", o.family, "Comma-separated polynomials")->required();
    pd->add_option("--n", o.n_vars, "Number of variables");
    pd->add_option("--subst", o.substs, "Substitution such as 3h1=1 or h2=-h1");
    pd->add_option("--constraint", o.constraints, "Assumption such as 3h1!=1");
    pd->add_option("--force", o.forces, "step=index of the differencing member");
    pd->add_option("--max-steps", o.max_steps, "Step limit");
    pd->add_flag("--strict", o.strict, "Fail on an ambiguous differencing choice");
    pd->add_flag("--json", o.as_json, "JSON tree instead of text");

    auto* pb = app.add_subcommand("pet-bounds", "Weight-pair bounds");
    pb->add_option("--m", o.m, "m for t_bound(m, d)");
    pb->add_option("--d", o.d, "d for t_bound(m, d)");
    pb->add_option("--pair", o.pair, "Weight pair m:a1,a2,...");
    pb->add_option("--n", o.n_vars, "Number of variables for --pair");
    pb->add_option("--cap", o.cap, "Largest m explored by the path search");

    auto* us = app.add_subcommand("us-trace", "Trace the reduction to linear Ud control");
    add_ring(us);
    add_family(us, true);
    add_funcs(us);
    us->add_option("--target", o.target, "Index of the controlling function")->required();
    us->add_option("--H", o.Hs, "Step sizes H_1,H_2,... (default from lpf)");

    auto* sw = app.add_subcommand("sweep", "Discrepancy sweep to CSV");
    sw->add_option("--config", o.config, "TOML or JSON sweep config");
    sw->add_option("--ring", o.rings, "Ring spec or primes:A..B or primes-after:A:K");
    add_family(sw, false);
    sw->add_option("--trials", o.trials, "Trials per ring");
    sw->add_option("--seed", o.sweep_seed, "Seed");
    sw->add_option("--functions", o.functions_kind, "random | indicator");
    sw->add_option("--density", o.density, "Indicator density");
    sw->add_option("--csv", o.csv_out, "CSV output path (default stdout)");
    sw->add_option("--json", o.json_out, "Per-ring JSON records output path");

    auto* st = app.add_subcommand("selftest", "Run the invariant suite");
    st->add_flag("--full", o.full, "Use the full acceptance sizes");
    st->add_option("--only", o.only, "Criterion numbers to run");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    std::optional<BudgetScope> scope;
    if (o.budget) {
        if (*o.budget == 0) {
            err << "usage error: --budget must be positive\n";
            return kUsage;
        }
        scope.emplace(*o.budget);
    }

    Runner r(o, out, err);
    try {
        if (ring->parsed()) return r.ring();
        if (charsum->parsed()) return r.charsum();
        if (gowers->parsed()) return r.gowers();
        if (lam->parsed()) return r.lambda_cmd();
        if (cc->parsed()) return r.config_count();
        if (roots->parsed()) return r.roots();
        if (inter->parsed()) return r.intersective();
        if (ps->parsed()) return r.pet_step_cmd();
        if (pd->parsed()) return r.pet_diagram();
        if (pb->parsed()) return r.pet_bounds();
        if (us->parsed()) return r.us_trace();
        if (sw->parsed()) return r.sweep_cmd();
        if (st->parsed()) return r.selftest();
    } catch (const HypothesisViolation& e) {
        err << "hypothesis violated [" << e.stage() << "]: " << e.what() << "\n";
        return kHypothesis;
    } catch (const ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const SpecViolation& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << e.kind() << ": " << e.what() << "\n";
        return kHypothesis;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    err << "usage error: no subcommand\n";
    return kUsage;
}

}  // namespace polysz::cli
