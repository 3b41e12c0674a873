#include "polysz/fourier.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "polysz/budget.hpp"
#include "polysz/errors.hpp"

namespace polysz {

namespace {

bool check_bounded(const std::vector<cplx>& v) {
    for (auto& z : v)
        if (std::abs(z) > 1.0 + 1e-12) return false;
    return true;
}

}  // namespace

FunctionOnRing::FunctionOnRing(RingPtr ring, std::vector<cplx> values)
    : ring_(std::move(ring)), v_(std::move(values)) {
    if (!ring_) throw SpecViolation("FunctionOnRing: null ring");
    if (v_.size() != ring_->size()) throw SpecViolation("FunctionOnRing: table size must equal |R|");
    bounded_ = check_bounded(v_);
}

FunctionOnRing FunctionOnRing::constant(RingPtr ring, cplx c) {
    std::vector<cplx> v(ring->size(), c);
    return {std::move(ring), std::move(v)};
}

FunctionOnRing FunctionOnRing::indicator(RingPtr ring, const std::vector<Elem>& set) {
    std::vector<cplx> v(ring->size(), 0.0);
    for (Elem x : set) {
        if (x >= ring->size()) throw SpecViolation("indicator: element out of range");
        v[x] = 1.0;
    }
    return {std::move(ring), std::move(v)};
}

FunctionOnRing FunctionOnRing::character(RingPtr ring, std::uint64_t idx) {
    std::vector<cplx> v(ring->size());
    auto w = ring->character_weights(idx);
    for (Elem x = 0; x < ring->size(); ++x) v[x] = ring->roots()[ring->character_phase(w, x)];
    return {std::move(ring), std::move(v)};
}

FunctionOnRing FunctionOnRing::random_bounded(RingPtr ring, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<cplx> v(ring->size());
    for (auto& z : v) {
        double r = std::sqrt(U(rng));
        double t = 2.0 * std::numbers::pi * U(rng);
        z = std::polar(r, t);
    }
    return {std::move(ring), std::move(v)};
}

FunctionOnRing FunctionOnRing::conj() const {
    std::vector<cplx> v(v_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::conj(v_[i]);
    return {ring_, std::move(v)};
}

FunctionOnRing FunctionOnRing::translate(Elem h) const {
    std::vector<cplx> v(v_.size());
    for (Elem x = 0; x < v.size(); ++x) v[x] = v_[ring_->add(x, h)];
    return {ring_, std::move(v)};
}

FunctionOnRing FunctionOnRing::operator*(const FunctionOnRing& o) const {
    if (o.ring_->size() != ring_->size()) throw SpecViolation("FunctionOnRing: ring mismatch");
    std::vector<cplx> v(v_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = v_[i] * o.v_[i];
    return {ring_, std::move(v)};
}

cplx FunctionOnRing::mean() const {
    CSum s;
    for (auto& z : v_) s.add(z);
    return s.value() / static_cast<double>(v_.size());
}

std::vector<std::vector<std::uint64_t>> characters(const Ring& ring) {
    std::vector<std::vector<std::uint64_t>> out;
    out.reserve(ring.num_characters());
    for (std::uint64_t i = 0; i < ring.num_characters(); ++i) out.push_back(ring.character_coords(i));
    return out;
}

std::vector<cplx> fourier_transform(const FunctionOnRing& f) {
    const Ring& R = f.ring();
    std::uint64_t n = R.size();
    require_budget(sat_mul(n, n), "fourier_transform");
    std::vector<cplx> out(n);
    parallel_for(n, [&](std::uint64_t c) {
        auto w = R.character_weights(c);
        CSum s;
        for (Elem x = 0; x < n; ++x) s.add(f(x) * R.roots()[R.character_phase(w, x)]);
        out[c] = s.value();
    });
    return out;
}

FunctionOnRing inverse_fourier(RingPtr ring, const std::vector<cplx>& fhat) {
    const Ring& R = *ring;
    std::uint64_t n = R.size();
    if (fhat.size() != n) throw SpecViolation("inverse_fourier: size mismatch");
    std::vector<std::vector<std::uint64_t>> weights(n);
    for (std::uint64_t c = 0; c < n; ++c) weights[c] = R.character_weights(c);
    std::vector<cplx> v(n);
    parallel_for(n, [&](std::uint64_t a) {
        Elem na = R.neg(static_cast<Elem>(a));
        CSum s;
        for (std::uint64_t c = 0; c < n; ++c) s.add(fhat[c] * R.roots()[R.character_phase(weights[c], na)]);
        v[a] = s.value() / static_cast<double>(n);
    });
    return {std::move(ring), std::move(v)};
}

namespace {

std::vector<cplx> derive(const Ring& R, const std::vector<cplx>& g, Elem h) {
    std::vector<cplx> out(g.size());
    for (Elem x = 0; x < g.size(); ++x) out[x] = g[R.add(x, h)] * std::conj(g[x]);
    return out;
}

cplx direct_sum(const Ring& R, const std::vector<cplx>& g, unsigned remaining) {
    if (remaining == 0) {
        CSum s;
        for (auto& z : g) s.add(z);
        return s.value();
    }
    CSum s;
    for (Elem h = 0; h < R.size(); ++h) s.add(direct_sum(R, derive(R, g, h), remaining - 1));
    return s.value();
}

double u2_of(const Ring& R, const std::vector<cplx>& g) {
    std::uint64_t n = R.size();
    double acc = 0, comp = 0;
    for (std::uint64_t c = 0; c < n; ++c) {
        auto w = R.character_weights(c);
        CSum s;
        for (Elem x = 0; x < n; ++x) s.add(g[x] * R.roots()[R.character_phase(w, x)]);
        double a = std::norm(s.value());
        double t = a * a;
        // Kahan for the real accumulation
        double y = t - comp;
        double z = acc + y;
        comp = (z - acc) - y;
        acc = z;
    }
    double nn = static_cast<double>(n);
    return acc / (nn * nn * nn * nn);
}

cplx recursive_sum(const Ring& R, const std::vector<cplx>& g, unsigned s) {
    // returns |R|^{s-2} * avg-free sum: sum over h_1..h_{s-2} of ||Delta g||_{U^2}^4
    if (s == 2) return u2_of(R, g);
    CSum acc;
    for (Elem h = 0; h < R.size(); ++h) acc.add(recursive_sum(R, derive(R, g, h), s - 1));
    return acc.value();
}

}  // namespace

double u2_power_fourier(const FunctionOnRing& f) {
    require_budget(sat_mul(f.ring().size(), f.ring().size()), "U^2 via Fourier");
    return u2_of(f.ring(), f.values());
}

double gowers_power(const FunctionOnRing& f, unsigned s, GowersMethod m) {
    if (s == 0) throw SpecViolation("gowers_norm: s must be >= 1");
    const Ring& R = f.ring();
    double n = static_cast<double>(R.size());
    if (s == 1) {
        double a = std::abs(f.mean());
        return a * a;
    }
    std::uint64_t direct_work = sat_pow(R.size(), s + 1);
    std::uint64_t rec_work = sat_pow(R.size(), s);
    if (m == GowersMethod::Auto) {
        if (direct_work <= Budget::enumeration())
            m = GowersMethod::Direct;
        else if (rec_work <= Budget::enumeration())
            m = GowersMethod::Recursive;
        else
            throw BudgetExceeded("gowers_norm: |R|^s = " + std::to_string(rec_work) + " exceeds cap");
    }
    cplx total;
    if (m == GowersMethod::Direct) {
        require_budget(direct_work, "gowers_norm (direct)");
        total = parallel_csum(R.size(), [&](std::uint64_t lo, std::uint64_t hi) {
            CSum acc;
            for (std::uint64_t h = lo; h < hi; ++h)
                acc.add(direct_sum(R, derive(R, f.values(), static_cast<Elem>(h)), s - 1));
            return acc.value();
        });
        total /= std::pow(n, static_cast<double>(s + 1));
    } else {
        require_budget(rec_work, "gowers_norm (recursive)");
        if (s == 2) {
            total = u2_of(R, f.values());
        } else {
            total = parallel_csum(R.size(), [&](std::uint64_t lo, std::uint64_t hi) {
                CSum acc;
                for (std::uint64_t h = lo; h < hi; ++h)
                    acc.add(recursive_sum(R, derive(R, f.values(), static_cast<Elem>(h)), s - 1));
                return acc.value();
            });
            total /= std::pow(n, static_cast<double>(s - 2));
        }
    }
    return std::max(0.0, total.real());
}

double gowers_norm(const FunctionOnRing& f, unsigned s, GowersMethod m) {
    double p = gowers_power(f, s, m);
    return std::pow(p, 1.0 / std::ldexp(1.0, static_cast<int>(s)));
}

FunctionOnRing discrete_derivative(const FunctionOnRing& f, const std::vector<Elem>& h) {
    std::vector<cplx> g = f.values();
    for (Elem hi : h) g = derive(f.ring(), g, hi);
    return {f.ring_ptr(), std::move(g)};
}

// --- Lambda plumbing --------------------------------------------------------------

unsigned LambdaQuery::n_vars() const {
    if (!P.empty()) return P[0].n_vars();
    if (!Q.empty()) return Q[0].n_vars();
    return 1;
}

void LambdaQuery::validate() const {
    if (!ring) throw SpecViolation("LambdaQuery: ring missing");
    if (F.size() != P.size() + 1) throw SpecViolation("LambdaQuery: need |F| = m1 + 1");
    if (Psi.size() != Q.size()) throw SpecViolation("LambdaQuery: need |Psi| = m2");
    unsigned n = n_vars();
    for (auto& p : P)
        if (p.n_vars() != n) throw SpecViolation("LambdaQuery: mixed n_vars");
    for (auto& q : Q)
        if (q.n_vars() != n) throw SpecViolation("LambdaQuery: mixed n_vars");
    for (auto& f : F)
        if (f.ring().size() != ring->size()) throw SpecViolation("LambdaQuery: function on another ring");
    for (auto c : Psi)
        if (c >= ring->num_characters()) throw SpecViolation("LambdaQuery: character index out of range");
}

FunctionOnRing dual_function(const LambdaQuery& q, std::size_t k) {
    q.validate();
    const Ring& R = *q.ring;
    std::size_t m1 = q.P.size();
    if (k > m1) throw SpecViolation("dual_function: k out of range");
    unsigned n = q.n_vars();
    std::uint64_t ny = R.tuple_count(n);
    require_budget(sat_mul(ny, R.size()), "dual_function");
    // shifts s_i(y) = P_i(y) - P_k(y) with P_0 = 0
    std::vector<std::vector<Elem>> tab(m1 + 1);
    for (std::size_t i = 1; i <= m1; ++i) tab[i] = R.value_table(q.P[i - 1]);
    tab[0].assign(ny, 0);
    std::vector<cplx> twist(ny, 1.0);
    for (std::size_t j = 0; j < q.Q.size(); ++j) {
        auto qt = R.value_table(q.Q[j]);
        auto ph = R.character_phase_table(q.Psi[j]);
        for (std::uint64_t y = 0; y < ny; ++y) twist[y] *= R.roots()[ph[qt[y]]];
    }
    std::vector<cplx> g(R.size());
    parallel_for(R.size(), [&](std::uint64_t x) {
        CSum s;
        for (std::uint64_t y = 0; y < ny; ++y) {
            cplx t = twist[y];
            Elem base = R.sub(static_cast<Elem>(x), tab[k][y]);
            for (std::size_t i = 0; i <= m1; ++i) {
                if (i == k) continue;
                t *= q.F[i](R.add(base, tab[i][y]));
            }
            s.add(t);
        }
        g[x] = s.value() / static_cast<double>(ny);
    });
    return {q.ring, std::move(g)};
}

Pel51Result pel51_check(RingPtr ring, const std::vector<std::vector<cplx>>& xi, unsigned n, unsigned s) {
    const Ring& R = *ring;
    if (s < 2 || s > 3) throw SpecViolation("pel51_check: s must be 2 or 3");
    std::uint64_t ny = R.tuple_count(n);
    std::uint64_t cells = sat_mul(R.size(), ny);
    for (auto& t : xi)
        if (t.size() != cells) throw SpecViolation("pel51_check: xi table must have |R|^{n+1} entries");
    require_budget(sat_mul(cells, sat_pow(R.size(), s - 2)), "pel51_check");

    // g_h(x) = avg_y prod_i Delta^{(1)}_h xi_i(x, y)
    auto make_g = [&](const std::vector<Elem>& hs) {
        std::vector<CSum> acc(R.size());
        std::vector<cplx> prod(R.size()), col(R.size());
        for (std::uint64_t y = 0; y < ny; ++y) {
            std::fill(prod.begin(), prod.end(), cplx(1.0));
            for (auto& t : xi) {
                for (Elem x = 0; x < R.size(); ++x) col[x] = t[x + R.size() * y];
                for (Elem h : hs) col = derive(R, col, h);
                for (Elem x = 0; x < R.size(); ++x) prod[x] *= col[x];
            }
            for (Elem x = 0; x < R.size(); ++x) acc[x].add(prod[x]);
        }
        std::vector<cplx> g(R.size());
        for (Elem x = 0; x < R.size(); ++x) g[x] = acc[x].value() / static_cast<double>(ny);
        return g;
    };

    Pel51Result r;
    FunctionOnRing g(ring, make_g({}));
    double p = gowers_power(g, s);  // ||g||^{2^s}
    r.lhs = std::pow(p, std::ldexp(1.0, static_cast<int>(2 * s - 2)) / std::ldexp(1.0, static_cast<int>(s)));
    if (s == 2) {
        r.rhs = u2_of(R, g.values());
    } else {
        CSum acc;
        for (Elem h = 0; h < R.size(); ++h) acc.add(u2_of(R, make_g({h})));
        r.rhs = acc.value().real() / static_cast<double>(R.size());
    }
    return r;
}

std::pair<FunctionOnRing, FunctionOnRing> z6_counterexample(Z6Variant variant) {
    auto R = make_ring(RingSpec::modint(6));
    const double pi = std::numbers::pi;
    std::vector<cplx> f1(6), f0(6);
    double ph[3] = {pi / 4, -pi / 4, variant == Z6Variant::AsPrinted ? 3 * pi / 8 : 3 * pi / 4};
    for (int x = 0; x < 6; ++x) {
        f1[x] = std::polar(1.0, ph[x % 3]);
        f0[x] = 1.0 / f1[x];
    }
    return {FunctionOnRing(R, f1), FunctionOnRing(R, f0)};
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

FunctionOnRing function_from_source(RingPtr ring, const std::string& src) {
    auto colon = src.find(':');
    std::string kind = src.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : src.substr(colon + 1);
    if (kind == "random") return FunctionOnRing::random_bounded(ring, std::stoull(arg.empty() ? "0" : arg));
    if (kind == "const") {
        auto f = split_fields(arg);
        double re = f.empty() ? 1.0 : std::stod(f[0]);
        double im = f.size() > 1 ? std::stod(f[1]) : 0.0;
        return FunctionOnRing::constant(ring, {re, im});
    }
    if (kind == "z6-counterexample") {
        if (ring->spec().kind != RingSpec::Kind::ModInt || ring->size() != 6)
            throw SpecViolation("z6-counterexample lives on zmod:6");
        bool printed = arg.size() > 8 && arg.substr(arg.size() - 8) == "-printed";
        std::string which = printed ? arg.substr(0, arg.size() - 8) : arg;
        if (which != "f0" && which != "f1") throw ParseError("z6-counterexample: expected f0 or f1");
        auto [f1, f0] = z6_counterexample(printed ? Z6Variant::AsPrinted : Z6Variant::TableConsistent);
        const auto& vals = which == "f0" ? f0.values() : f1.values();
        return {ring, vals};
    }
    if (kind == "csv" || kind == "indicator") {
        std::ifstream in(arg);
        if (!in) throw ParseError("cannot open " + arg);
        if (kind == "indicator") {
            std::vector<Elem> set;
            std::string line;
            while (std::getline(in, line)) {
                if (!line.empty() && line[0] == '#') continue;
                for (auto& f : split_fields(line)) set.push_back(static_cast<Elem>(std::stoull(f)));
            }
            return FunctionOnRing::indicator(ring, set);
        }
        std::vector<cplx> v(ring->size(), 0.0);
        std::string line;
        while (std::getline(in, line)) {
            auto f = split_fields(line);
            if (f.empty() || f[0][0] == '#' || !std::isdigit(static_cast<unsigned char>(f[0][0]))) continue;
            std::uint64_t idx = std::stoull(f[0]);
            if (idx >= v.size()) throw ParseError("csv: index out of range");
            v[idx] = {f.size() > 1 ? std::stod(f[1]) : 0.0, f.size() > 2 ? std::stod(f[2]) : 0.0};
        }
        return {ring, std::move(v)};
    }
    throw ParseError("unknown function source '" + src + "'");
}

}  // namespace polysz
