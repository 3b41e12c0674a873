#include "polysz/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "polysz/counting.hpp"
#include "polysz/errors.hpp"
#include "polysz/fourier.hpp"
#include "polysz/numtheory.hpp"
#include "polysz/pet.hpp"
#include "polysz/poly.hpp"
#include "polysz/ring.hpp"
#include "polysz/sweep.hpp"
#include "polysz/symbolic.hpp"

namespace polysz::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

// Collects failures; the first few are kept for the report line.
struct Tally {
    std::uint64_t checks = 0, failures = 0;
    std::vector<std::string> notes;
    void expect(bool ok, const std::function<std::string()>& what) {
        ++checks;
        if (ok) return;
        ++failures;
        if (notes.size() < 3) notes.push_back(what());
    }
    Result finish(std::string extra = {}) const {
        Result r;
        r.pass = failures == 0 && checks > 0;
        std::ostringstream os;
        os << checks << " checks";
        if (failures) os << ", " << failures << " failed";
        if (!extra.empty()) os << "; " << extra;
        for (auto& n : notes) os << "; " << n;
        r.detail = os.str();
        return r;
    }
};

RingPtr ring(const std::string& s) { return make_ring(RingSpec::parse(s)); }

std::vector<std::string> desk_family(Scale scale) {
    std::vector<std::string> out;
    int top = scale == Scale::Full ? 60 : 20;
    for (int N = 3; N <= top; ++N) out.push_back("zmod:" + std::to_string(N));
    for (auto s : {"gf:4", "gf:8", "gf:9", "gf:25", "gf:27", "pgr:6:x^2-2", "prod:(zmod:3,zmod:9)", "nilp:3:2"})
        out.push_back(s);
    return out;
}

std::vector<std::uint64_t> primes_between(std::uint64_t a, std::uint64_t b) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = a; p <= b; ++p)
        if (is_prime(p)) out.push_back(p);
    return out;
}

std::vector<Elem> random_subset(std::uint64_t n, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(density);
    std::vector<Elem> out;
    for (std::uint64_t i = 0; i < n; ++i)
        if (coin(rng)) out.push_back(static_cast<Elem>(i));
    return out;
}

std::string g9(double x) { return fmt::format("{:.9g}", x); }

// ---- criteria ---------------------------------------------------------------

Result hadamard(Scale scale) {
    Tally t;
    double worst = 0;
    for (auto& s : desk_family(scale)) {
        auto R = ring(s);
        double cap = 1.0 / static_cast<double>(R->lpf());
        for (std::uint64_t chi = 1; chi < R->num_characters(); ++chi) {
            double v = std::abs(hadamard_char_sum(*R, chi, 2).value);
            worst = std::max(worst, v - cap);
            t.expect(v <= cap + 1e-9, [&] { return fmt::format("{} chi={} |avg|={}", s, chi, g9(v)); });
        }
    }
    return t.finish("max(|avg| - 1/lpf) = " + g9(worst));
}

Result power_character(Scale scale) {
    Tally t;
    auto sq = IntPoly::parse("y^2");
    for (auto& s : desk_family(scale)) {
        auto R = ring(s);
        if (R->lpf() <= 2) continue;
        double cap = std::pow(1.0 / static_cast<double>(R->lpf()), 0.25);
        bool prime_field = R->spec().kind == RingSpec::Kind::ModInt && is_prime(R->size());
        for (std::uint64_t chi = 1; chi < R->num_characters(); ++chi) {
            double v = std::abs(char_sum(*R, {sq}, {chi}).value);
            t.expect(v <= cap + 1e-9, [&] { return fmt::format("{} chi={} |avg|={}", s, chi, g9(v)); });
            if (prime_field) {
                double want = 1.0 / std::sqrt(static_cast<double>(R->size()));
                t.expect(std::abs(v - want) <= 1e-9,
                         [&] { return fmt::format("{} chi={} gauss {} vs {}", s, chi, g9(v), g9(want)); });
            }
        }
    }
    return t.finish();
}

Result base_case(Scale scale) {
    Tally t;
    const unsigned trials = scale == Scale::Full ? 100 : 10;
    const std::uint64_t top = scale == Scale::Full ? 61 : 23;
    const std::vector<std::string> singles = {"y",   "2y",    "y^2+y",  "3y^2",         "y^2+5y",
                                              "y^3", "y^3+y", "3y^3+y", "2y^3+y^2+5y"};
    std::mt19937_64 rng(3);
    std::uint64_t skipped = 0;
    double worst = -1;
    for (auto p : primes_between(5, top)) {
        auto R = make_ring(RingSpec::modint(p));
        double pd = static_cast<double>(p);
        auto run = [&](const IntPoly& P, double bound) {
            for (unsigned k = 0; k < trials; ++k) {
                LambdaQuery q{R, {P}, {FunctionOnRing::random_bounded(R, rng()), FunctionOnRing::random_bounded(R, rng())},
                              {}, {}};
                double d = main_discrepancy(q);
                worst = std::max(worst, d - bound);
                t.expect(d <= bound + 1e-8,
                         [&] { return fmt::format("p={} P={} disc={} bound={}", p, P.to_string(), g9(d), g9(bound)); });
            }
        };
        run(IntPoly::parse("y^2"), 2.0 * std::pow(pd, -0.25));
        for (auto& s : singles) {
            auto P = IntPoly::parse(s);
            int d = P.degree();
            auto ind = independence_check({P});
            BigInt need = std::max<BigInt>(BigInt(std::max(2, d)), ind.C1 ? *ind.C1 : BigInt(0));
            if (!ind.independent || BigInt(p) <= need) {
                ++skipped;
                continue;
            }
            run(P, 3.0 * std::pow((d - 1.0) / pd, std::ldexp(1.0, -d)));
        }
    }
    return t.finish(fmt::format("{} (prime, P) pairs outside lpf > max(2,d,C1); max(disc - bound) = {}", skipped, g9(worst)));
}

Result z6(Scale) {
    Tally t;
    auto [f1, f0] = z6_counterexample();
    auto& R = f1.ring_ptr();
    LambdaQuery q{R, {IntPoly::parse("3y")}, {f0, f1}, {}, {}};
    cplx lam = lambda(q);
    t.expect(std::abs(lam - cplx(1.0)) <= 1e-9, [&] { return "lambda = " + g9(lam.real()) + "+" + g9(lam.imag()) + "i"; });
    double u1 = gowers_norm(f1, 1);
    t.expect(u1 < 1 - 1e-3, [&] { return "U1 = " + g9(u1); });
    const cplx I(0, 1);
    const cplx table[7][3] = {{-I, -1.0, -I}, {-I, I, 1.0}, {-1.0, -I, -I}, {I, 1.0, -I},
                              {-I, -I, -1.0}, {1.0, -I, I}, {-I, -1.0, -I}};
    std::vector<Elem> hs;
    for (int r = 0; r < 7; ++r) {
        hs.push_back(1);
        auto d = discrete_derivative(f1, hs);
        for (Elem x = 0; x < 6; ++x)
            t.expect(std::abs(d(x) - table[r][x % 3]) <= 1e-9, [&] { return fmt::format("row {} x={}", r + 1, x); });
    }
    auto once = discrete_derivative(f1, {1});
    auto seven = discrete_derivative(f1, {1, 1, 1, 1, 1, 1, 1});
    for (Elem x = 0; x < 6; ++x)
        t.expect(std::abs(once(x) - seven(x)) <= 1e-9, [&] { return fmt::format("Delta^7 != Delta at {}", x); });
    return t.finish("U1(f1) = " + g9(u1));
}

Result weight_sequences(Scale) {
    Tally t;
    auto fam = IntPoly::parse_family("y1^2+3y2^2, 8y1^2, 2y1^2+y1y2, 7y2^2+y1, 2y1, 6y2+2y1, y1, 4y1+2", 2);
    auto over_z = weight_sequence(fam);
    auto over_7 = weight_sequence(fam, 7);
    auto show = [](std::vector<std::uint64_t> w) {
        w.resize(std::max<std::size_t>(w.size(), 6), 0);
        return fmt::format("({})", fmt::join(w, ","));
    };
    auto pad = [](std::vector<std::uint64_t> w, std::size_t n) {
        // all entries past n must vanish
        for (std::size_t i = n; i < w.size(); ++i)
            if (w[i]) return std::vector<std::uint64_t>{};
        w.resize(n, 0);
        return w;
    };
    t.expect(pad(over_z, 6) == std::vector<std::uint64_t>{0, 3, 1, 0, 3, 0}, [&] { return "over Z " + show(over_z); });
    t.expect(pad(over_7, 6) == std::vector<std::uint64_t>{0, 3, 0, 0, 2, 0}, [&] { return "over Z_7 " + show(over_7); });
    return t.finish("Z: " + show(over_z) + ", Z_7: " + show(over_7));
}

std::vector<SymbolicPoly> sym_family(std::initializer_list<const char*> items, unsigned n) {
    std::vector<SymbolicPoly> out;
    for (auto s : items) out.push_back(SymbolicPoly::parse(s, n).without_constant());
    return out;
}

std::vector<SymbolicPoly> drop_constants(std::vector<SymbolicPoly> f) {
    for (auto& p : f) p = p.without_constant();
    return f;
}

Result diagrams(Scale) {
    Tally t;
    auto a1 = symbolic_diagram(IntPoly::parse_family("y, y^2"));
    t.expect(drop_constants(a1.final_family) == sym_family({"2h2y", "2h1y", "(2h2+2h1)y"}, 1),
             [&] { return "A.1 final " + family_to_string(a1.final_family); });

    auto a2 = symbolic_diagram(IntPoly::parse_family("y1y2, y1", 2));
    t.expect(drop_constants(a2.final_family) ==
                 sym_family({"h2'y1+h2y2", "h1'y1+h1y2", "(h2'+h1')y1+(h2+h1)y2"}, 2),
             [&] { return "A.2 final " + family_to_string(a2.final_family); });

    DiagramOptions fork;
    fork.substitutions.push_back(Substitution::parse("h2=-h1"));
    auto a2f = symbolic_diagram(IntPoly::parse_family("y1y2, y1", 2), fork);
    auto want = sym_family({"h2'y1+h2y2", "h1'y1+h1y2", "(h2'+h1')y1"}, 2);
    for (auto& w : want) w = w.map_coeffs([&](const HPoly& c) { return fork.substitutions[0].apply(c); });
    t.expect(drop_constants(a2f.final_family) == want, [&] { return "A.2 fork " + family_to_string(a2f.final_family); });

    DiagramOptions one;
    one.substitutions.push_back(Substitution::parse("3h1=1"));
    auto a3a = symbolic_diagram(IntPoly::parse_family("y^3, y^3+y^2"), one);
    t.expect(a3a.step_count() == 6, [&] { return fmt::format("A.3 3h1=1: {} steps", a3a.step_count()); });

    DiagramOptions generic;
    generic.constraints.push_back(Constraint::parse("3h1!=1"));
    generic.constraints.push_back(Constraint::parse("3h1!=-1"));
    auto a3b = symbolic_diagram(IntPoly::parse_family("y^3, y^3+y^2"), generic);
    t.expect(a3b.step_count() == 12, [&] { return fmt::format("A.3 generic: {} steps", a3b.step_count()); });
    return t.finish(fmt::format("A.1 {} steps, A.2 {} steps, A.3 forks {} and {} steps", a1.step_count(),
                                a2.step_count(), a3a.step_count(), a3b.step_count()));
}

std::vector<WeightPair> pairs_up_to(std::uint64_t mmax, unsigned support) {
    std::vector<WeightPair> out;
    for (std::uint64_t m = 1; m <= mmax; ++m) {
        std::vector<std::uint64_t> s(support, 0);
        std::function<void(unsigned, std::uint64_t)> rec = [&](unsigned i, std::uint64_t left) {
            if (i == support) {
                WeightPair p(m, s);
                if (!p.seq.empty()) out.push_back(p);
                return;
            }
            for (std::uint64_t a = 0; a <= left; ++a) {
                s[i] = a;
                rec(i + 1, left - a);
            }
        };
        rec(0, m);
    }
    return out;
}

Result pet_soundness(Scale scale) {
    Tally t;
    const int want = scale == Scale::Full ? 200 : 30;
    const std::vector<std::string> rings = {"zmod:11", "zmod:13", "zmod:17", "zmod:19", "zmod:23", "zmod:143", "zmod:187"};
    std::mt19937_64 rng(7);
    int done = 0, attempts = 0;
    while (done < want && attempts < 50 * want) {
        ++attempts;
        auto R = ring(rings[rng() % rings.size()]);
        std::uint64_t N = R->characteristic(), p = R->lpf();
        std::size_t m = 1 + rng() % 3;
        std::vector<IntPoly> fam;
        for (std::size_t i = 0; i < m; ++i) {
            int d = 1 + static_cast<int>(rng() % 3);
            std::vector<std::int64_t> c(d + 1, 0);
            for (int j = 1; j <= d; ++j) c[j] = static_cast<std::int64_t>(rng() % 7) - 3;
            if (c[d] == 0) c[d] = 1;
            fam.push_back(IntPoly::from_coeffs(c));
        }
        std::stable_sort(fam.begin(), fam.end(), [](auto& a, auto& b) { return a.degree() < b.degree(); });
        std::vector<FunctionOnRing> F;
        for (std::size_t i = 0; i <= m; ++i) F.push_back(FunctionOnRing::random_bounded(R, rng()));
        std::uint64_t lo = std::max<std::uint64_t>(2, m * m), hi = (p + 1) / 2;
        std::uint64_t H = lo + rng() % (hi - lo + 1);
        PetStepResult r;
        try {
            r = pet_step(R, fam, F, H);
        } catch (const HypothesisViolation&) {
            continue;  // preconditions not met by this draw
        }
        ++done;
        auto label = [&] { return fmt::format("{} on Z_{} H={}", family_to_string(fam), N, H); };
        t.expect(is_permissible(r.before, r.after, 1), [&] { return "transition " + label(); });
        t.expect(essentially_distinct(r.new_family, N).ok, [&] { return "distinctness " + label(); });
        t.expect(BigInt(family_height(r.new_family, N)) <= r.height_bound, [&] { return "height " + label(); });
        t.expect(r.g.back().values() == F.back().values(), [&] { return "traceability " + label(); });
        LambdaQuery q{R, fam, F, {}, {}};
        double lhs = std::abs(lambda(q));
        double rhs = std::sqrt(2.0) * (std::sqrt(2.0) * static_cast<double>(m) / std::sqrt(static_cast<double>(H)) +
                                       std::sqrt(r.lambda_Q));
        t.expect(lhs <= rhs + 1e-9, [&] { return "inequality " + label(); });
        t.expect(r.checks.all(), [&] { return "library checks " + label(); });
    }
    t.expect(done == want, [&] { return fmt::format("only {} admissible draws", done); });

    std::uint64_t pairs = 0;
    for (unsigned n = 1; n <= 3; ++n)
        for (auto& p : pairs_up_to(3, 3)) {
            std::uint64_t len = max_path_length(p, n, 6);
            ++pairs;
            auto tb = t_bound(p.m, static_cast<unsigned>(p.seq.size()));
            t.expect(tb.at_least(BigInt(len)), [&] { return fmt::format("path {} > t_bound for {}", len, p.to_string()); });
        }
    auto tb = t_bound(1, 2);
    t.expect(!tb.saturated && tb.value == 6, [&] { return "t_bound(1,2) = " + tb.to_string(); });
    return t.finish(fmt::format("{} steps, {} weight pairs, t_bound(1,2) = {}", done, pairs, tb.to_string()));
}

Result roots(Scale scale) {
    Tally t;
    const std::vector<std::string> polys = {"y^2", "y^2-1", "y^3-y"};
    std::uint64_t applied = 0;
    for (auto& s : desk_family(scale)) {
        auto R = ring(s);
        auto check = [&](const IntPoly& P) {
            auto r = count_roots(*R, P);
            if (!r.bound_applies) return;
            ++applied;
            t.expect(static_cast<double>(r.count) <= r.bound + 1e-9,
                     [&] { return fmt::format("{} {}: {} > {}", s, P.to_string(), r.count, g9(r.bound)); });
        };
        for (auto& p : polys) check(IntPoly::parse(p));
        check(IntPoly::parse("y1y2", 2));
    }
    for (auto [p, k] : std::vector<std::pair<std::uint64_t, unsigned>>{{3, 1}, {3, 2}, {5, 1}, {5, 2}}) {
        auto R = make_ring(RingSpec::nilpotent(p, k));
        std::uint64_t want = 1;
        for (unsigned i = 0; i < k; ++i) want *= p;
        auto c = count_roots(*R, IntPoly::parse("y^2")).count;
        t.expect(c == want, [&] { return fmt::format("nilp:{}:{} y^2 roots {} != {}", p, k, c, want); });
    }
    return t.finish(fmt::format("{} bounded counts", applied));
}

Result config_oracle(Scale scale) {
    Tally t;
    const int want = scale == Scale::Full ? 100 : 15;
    const std::vector<std::string> rings = {"zmod:7", "zmod:8",  "zmod:9",      "zmod:10", "zmod:12",
                                            "gf:4",   "gf:9",    "pgr:6:x^2-2", "nilp:2:2", "prod:(zmod:2,zmod:4)"};
    const std::vector<std::string> fams = {"y", "y^2", "y, y^2", "y, 2y", "3y", "y^2, y^3", "y1y2", "y1, y2", "y, y^2, y^3"};
    std::mt19937_64 rng(9);
    int done = 0;
    while (done < want) {
        auto R = ring(rings[rng() % rings.size()]);
        auto fam = IntPoly::parse_family(fams[rng() % fams.size()]);
        if (fam[0].n_vars() == 2 && R->size() > 12) continue;
        ++done;
        std::vector<std::vector<Elem>> A;
        std::vector<FunctionOnRing> F;
        double density = 0.3 + 0.5 * std::uniform_real_distribution<double>()(rng);
        for (std::size_t i = 0; i <= fam.size(); ++i) {
            A.push_back(random_subset(R->size(), density, rng));
            F.push_back(FunctionOnRing::indicator(R, A.back()));
        }
        auto c = count_configurations(*R, fam, A);
        double total = std::pow(static_cast<double>(R->size()), fam[0].n_vars() + 1.0);
        LambdaQuery q{R, fam, F, {}, {}};
        double scaled = total * lambda(q).real();
        t.expect(std::abs(scaled - std::round(scaled)) < 1e-6 && std::llround(scaled) == static_cast<long long>(c.M),
                 [&] { return fmt::format("{} {}: {} vs M={}", R->spec().to_string(), family_to_string(fam), g9(scaled), c.M); });
    }
    for (unsigned m : {1u, 2u}) {
        auto c = avoid_3y(m);
        auto r = count_configurations(*c.ring, c.family, c.sets);
        t.expect(r.M1 == 0, [&] { return c.name + " M1 = " + std::to_string(r.M1); });
    }
    for (auto [p, k] : std::vector<std::pair<std::uint64_t, unsigned>>{{3, 2}, {5, 2}, {7, 2}}) {
        auto c = avoid_y_y2p1(p, k);
        auto r = count_configurations(*c.ring, c.family, c.sets);
        t.expect(r.M1 == 0 && r.M == 0, [&] { return fmt::format("{} M={} M1={}", c.name, r.M, r.M1); });
    }
    for (auto [p, k] : std::vector<std::pair<std::uint64_t, unsigned>>{{3, 2}, {5, 2}}) {
        auto c = loper(p, k);
        auto r = count_configurations(*c.ring, c.family, c.sets);
        t.expect(r.M1 == 0, [&] { return c.name + " M1 = " + std::to_string(r.M1); });
    }
    return t.finish(fmt::format("{} random instances", done));
}

Result ud_control(Scale scale) {
    Tally t;
    const int per_d = scale == Scale::Full ? 200 : 20;
    const std::vector<std::string> rings = {"zmod:5", "zmod:7", "zmod:11", "zmod:13", "zmod:25", "zmod:35", "gf:9"};
    std::mt19937_64 rng(10);
    double worst = -1;
    for (unsigned d = 1; d <= 3; ++d) {
        int done = 0;
        while (done < per_d) {
            auto R = ring(rings[rng() % rings.size()]);
            unsigned n = 1 + static_cast<unsigned>(rng() % 2);
            if (n == 2 && R->size() > 13) n = 1;
            std::vector<std::vector<std::int64_t>> a(d, std::vector<std::int64_t>(n));
            for (auto& row : a)
                for (auto& v : row) v = static_cast<std::int64_t>(rng() % R->characteristic());
            if (!linear_ud_invertible(*R, a)) continue;
            ++done;
            std::vector<FunctionOnRing> F;
            for (unsigned i = 0; i <= d; ++i) F.push_back(FunctionOnRing::random_bounded(R, rng()));
            auto s = linear_ud_check(*R, a, F);
            worst = std::max(worst, s.lhs - s.rhs);
            t.expect(s.lhs <= s.rhs + 1e-9, [&] {
                return fmt::format("{} d={} lhs={} rhs={}", R->spec().to_string(), d, g9(s.lhs), g9(s.rhs));
            });
        }
    }
    auto [f1, f0] = z6_counterexample();
    auto& z6r = f1.ring();
    auto raw = linear_ud_check(z6r, {{3}}, {f0, f1}, false);
    double u1 = gowers_norm(f1, 1);
    t.expect(std::abs(raw.lhs - 1.0) <= 1e-9 && raw.lhs > u1, [&] { return "Z_6 lhs = " + g9(raw.lhs) + ", U1 = " + g9(u1); });
    bool rejected = false;
    try {
        linear_ud_check(z6r, {{3}}, {f0, f1});
    } catch (const InvertibilityViolation&) {
        rejected = true;
    }
    t.expect(rejected && !linear_ud_invertible(z6r, {{3}}), [] { return std::string("Z_6 instance was not rejected"); });
    return t.finish(fmt::format("{} invertible instances, max(lhs - rhs) = {}; Z_6 lhs = {} > U1 = {}", 3 * per_d, g9(worst),
                                g9(raw.lhs), g9(u1)));
}

Result regularization(Scale scale) {
    Tally t;
    const int want = scale == Scale::Full ? 500 : 40;
    std::mt19937_64 rng(11);
    int done = 0;
    while (done < want) {
        std::size_t n = 1 + rng() % 3, m = 1 + rng() % 2;
        if (n == 1) m = 2 + rng() % 2;
        auto M0u = 1 + rng() % 4;
        BigInt M0 = M0u;
        BigMatrix A(n, std::vector<BigInt>(m));
        for (auto& row : A)
            for (auto& v : row) v = static_cast<std::int64_t>(rng() % (2 * M0u + 1)) - static_cast<std::int64_t>(M0u);
        unsigned nm2 = static_cast<unsigned>(n * m * m);
        BigInt N = (BigInt(1) << static_cast<unsigned>((1U << nm2) * 5 + 8)) + 1;
        RegularizeResult r;
        try {
            r = matrix_regularize(A, N, M0);
        } catch (const HypothesisViolation&) {
            continue;  // a zero or repeated column makes the instance inadmissible
        }
        ++done;
        BigInt bound = boost::multiprecision::pow(8 * M0, 1U << nm2);
        t.expect(is_row_regular(r.B, N), [&] { return "row entries not distinct and nonzero"; });
        t.expect(matrix_height(r.B, N) <= bound, [&] { return "height above (8 M0)^{2^{nm^2}}"; });
        t.expect(replay_row_ops(A, r.ops, N) == r.B, [&] { return "ops_log replay differs"; });
    }
    return t.finish(fmt::format("{} instances", done));
}

Result decay(Scale scale) {
    Tally t;
    auto start = Clock::now();
    SweepConfig cfg;
    cfg.rings = {scale == Scale::Full ? "primes-after:3:12" : "primes-after:3:6"};
    cfg.family = IntPoly::parse_family("y, y^2");
    cfg.trials = scale == Scale::Full ? 50 : 5;
    cfg.seed = 0;
    cfg.functions = SweepConfig::Functions::Indicator;
    cfg.density = 0.5;
    auto res = sweep(cfg);
    double secs = std::chrono::duration<double>(Clock::now() - start).count();
    unsigned inversions = 0;
    std::vector<std::string> maxima;
    for (std::size_t i = 0; i < res.summary.size(); ++i) {
        auto& s = res.summary[i];
        t.expect(s.error.empty(), [&] { return s.ring + ": " + s.error; });
        maxima.push_back(fmt::format("{}:{:.4f}", s.N, s.discrepancy));
        if (i > 0 && s.discrepancy > res.summary[i - 1].discrepancy) ++inversions;
    }
    for (auto& row : res.rows) {
        double b = 2.0 * std::pow(static_cast<double>(row.N), -0.25);
        t.expect(row.discrepancy <= b, [&] { return fmt::format("p={} trial {} disc={} > {}", row.N, row.trial, g9(row.discrepancy), g9(b)); });
    }
    if (scale == Scale::Full) {
        t.expect(inversions <= 1, [&] { return fmt::format("{} inversions in the per-prime maxima", inversions); });
        t.expect(secs < 300, [&] { return fmt::format("runtime {:.1f} s", secs); });
    }
    std::string mode = scale == Scale::Full ? "" : "quick size, bound check only; ";
    return t.finish(fmt::format("{}{} inversions, {:.2f} s, maxima {}", mode, inversions, secs, fmt::join(maxima, " ")));
}

Result intersectivity(Scale) {
    Tally t;
    auto lin = jointly_intersective_up_to(IntPoly::parse_family("y, 2y, 3y, 4y, 5y"), 50);
    t.expect(lin.ok, [&] { return fmt::format("{{y..5y}} fails at {}", lin.first_failure.value_or(0)); });
    auto sq = jointly_intersective_up_to(IntPoly::parse_family("y, y^2+1"), 50);
    t.expect(!sq.ok && sq.first_failure == 2u,
             [&] { return fmt::format("{{y, y^2+1}} first failure {}", sq.first_failure.value_or(0)); });
    return t.finish(fmt::format("{{y, y^2+1}} first fails at k = {}", sq.first_failure.value_or(0)));
}

struct Entry {
    const char* title;
    Result (*fn)(Scale);
};

const Entry kEntries[kCriteria] = {
    {"Hadamard character bound", hadamard},
    {"power character bound", power_character},
    {"base-case discrepancy bound", base_case},
    {"Z_6 counterexample", z6},
    {"weight sequences", weight_sequences},
    {"symbolic diagrams", diagrams},
    {"PET step soundness", pet_soundness},
    {"root bounds", roots},
    {"configuration oracle", config_oracle},
    {"linear Ud control", ud_control},
    {"matrix regularization", regularization},
    {"decay sweep", decay},
    {"intersectivity", intersectivity},
};

}  // namespace

Result run_criterion(int id, Scale scale) {
    if (id < 1 || id > kCriteria) throw SpecViolation("acceptance criterion " + std::to_string(id) + " does not exist");
    auto start = Clock::now();
    Result r;
    try {
        r = kEntries[id - 1].fn(scale);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("threw: ") + e.what();
    }
    r.id = id;
    r.title = kEntries[id - 1].title;
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

std::vector<Result> run_all(Scale scale, const std::vector<int>& only, const std::function<void(const Result&)>& report) {
    std::vector<Result> out;
    for (int id = 1; id <= kCriteria; ++id) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        out.push_back(run_criterion(id, scale));
        if (report) report(out.back());
    }
    return out;
}

std::string format_line(const Result& r) {
    return fmt::format("{} criterion {:2d} {} ({:.2f} s): {}", r.pass ? "PASS" : "FAIL", r.id, r.title, r.seconds, r.detail);
}

}  // namespace polysz::acceptance
