#include "polysz/counting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polysz/budget.hpp"
#include "polysz/errors.hpp"

namespace polysz {

namespace {

std::vector<cplx> twist_table(const Ring& R, const std::vector<IntPoly>& Q, const std::vector<std::uint64_t>& psi,
                              std::uint64_t ny) {
    std::vector<cplx> tw(ny, 1.0);
    for (std::size_t j = 0; j < Q.size(); ++j) {
        auto qt = R.value_table(Q[j]);
        auto ph = R.character_phase_table(psi[j]);
        for (std::uint64_t y = 0; y < ny; ++y) tw[y] *= R.roots()[ph[qt[y]]];
    }
    return tw;
}

std::vector<char> membership(const Ring& R, const std::vector<Elem>& set) {
    std::vector<char> in(R.size(), 0);
    for (Elem x : set) {
        if (x >= R.size()) throw SpecViolation("set element out of range");
        in[x] = 1;
    }
    return in;
}

}  // namespace

cplx lambda(const LambdaQuery& q) {
    q.validate();
    const Ring& R = *q.ring;
    unsigned n = q.n_vars();
    std::uint64_t ny = R.tuple_count(n);
    require_budget(sat_mul(ny, R.size()), "lambda: |R|^{n+1}");
    std::size_t m1 = q.P.size();
    std::vector<std::vector<Elem>> tab(m1);
    for (std::size_t i = 0; i < m1; ++i) tab[i] = R.value_table(q.P[i]);
    auto tw = twist_table(R, q.Q, q.Psi, ny);
    cplx total = parallel_csum(R.size(), [&](std::uint64_t lo, std::uint64_t hi) {
        CSum acc;
        for (std::uint64_t x = lo; x < hi; ++x) {
            cplx f0 = q.F[0](static_cast<Elem>(x));
            if (f0 == cplx(0.0)) continue;
            CSum inner;
            for (std::uint64_t y = 0; y < ny; ++y) {
                cplx t = tw[y];
                for (std::size_t i = 0; i < m1; ++i) t *= q.F[i + 1](R.add(static_cast<Elem>(x), tab[i][y]));
                inner.add(t);
            }
            acc.add(f0 * inner.value());
        }
        return acc.value();
    });
    return total / (static_cast<double>(R.size()) * static_cast<double>(ny));
}

double main_discrepancy(const LambdaQuery& q) {
    cplx L = lambda(q);
    bool trivial = std::all_of(q.Psi.begin(), q.Psi.end(), [](std::uint64_t c) { return c == 0; });
    cplx main = 0.0;
    if (trivial) {
        main = 1.0;
        for (auto& f : q.F) main *= f.mean();
    }
    return std::abs(L - main);
}

BoundedValue hadamard_char_sum(const Ring& R, std::uint64_t chi, unsigned m) {
    if (chi == 0) throw TrivialCharacter("hadamard_char_sum: character must be nontrivial");
    if (chi >= R.num_characters()) throw SpecViolation("hadamard_char_sum: character index out of range");
    if (m == 0) throw SpecViolation("hadamard_char_sum: m must be >= 1");
    require_budget(sat_mul(m, sat_mul(R.size(), R.size())), "hadamard_char_sum");
    // distribution of the product h_1 ... h_k, built one factor at a time
    std::vector<double> p(R.size(), 1.0 / static_cast<double>(R.size()));
    for (unsigned k = 2; k <= m; ++k) {
        std::vector<double> np(R.size(), 0.0);
        for (Elem a = 0; a < R.size(); ++a) {
            if (p[a] == 0.0) continue;
            double w = p[a] / static_cast<double>(R.size());
            for (Elem h = 0; h < R.size(); ++h) np[R.mul(a, h)] += w;
        }
        p.swap(np);
    }
    auto ph = R.character_phase_table(chi);
    CSum s;
    for (Elem a = 0; a < R.size(); ++a)
        if (p[a] != 0.0) s.add(p[a] * R.roots()[ph[a]]);
    BoundedValue r;
    r.value = s.value();
    r.bound = static_cast<double>(m - 1) / static_cast<double>(R.lpf());
    return r;
}

BoundedValue char_sum(const Ring& R, const std::vector<IntPoly>& Q, const std::vector<std::uint64_t>& psi) {
    if (Q.empty() || Q.size() != psi.size()) throw SpecViolation("char_sum: need one character per polynomial");
    if (std::all_of(psi.begin(), psi.end(), [](std::uint64_t c) { return c == 0; }))
        throw TrivialCharacter("char_sum: all characters are trivial");
    unsigned n = Q[0].n_vars();
    for (auto& q : Q)
        if (q.n_vars() != n) throw SpecViolation("char_sum: mixed n_vars");
    std::uint64_t ny = R.tuple_count(n);
    auto tw = twist_table(R, Q, psi, ny);
    CSum s;
    for (auto& z : tw) s.add(z);
    BoundedValue r;
    r.value = s.value() / static_cast<double>(ny);
    int d = 0;
    for (auto& q : Q) d = std::max(d, q.degree());
    r.bound = std::pow(static_cast<double>(d - 1) / static_cast<double>(R.lpf()), std::ldexp(1.0, -d));
    std::ostringstream why;
    if (std::any_of(Q.begin(), Q.end(), [](const IntPoly& q) { return q.constant_term() != 0; }))
        why << "nonzero constant term; ";
    auto ind = independence_check(Q);
    if (!ind.independent) {
        why << "family not independent; ";
    } else {
        BigInt need = std::max<BigInt>(BigInt(std::max(2, d)), *ind.C1);
        if (BigInt(R.lpf()) <= need) why << "lpf N = " << R.lpf() << " <= max(2, d, C1) = " << need << "; ";
    }
    r.note = why.str();
    r.bound_applies = r.note.empty();
    return r;
}

RootCount root_bound(const Ring& R, const IntPoly& P) {
    int d = P.degree();
    if (d < 1) throw SpecViolation("count_roots: deg P must be >= 1");
    unsigned n = P.n_vars();
    double sz = static_cast<double>(R.size());
    double eps = std::ldexp(1.0, -d);
    double c = std::pow(static_cast<double>(d - 1), eps);
    RootCount r;
    r.bound = std::pow(sz, n - 1.0) + c * std::pow(sz, static_cast<double>(n)) / std::pow(static_cast<double>(R.lpf()), eps);
    auto ind = independence_check({P.without_constant()});
    BigInt need = std::max<BigInt>(BigInt(std::max(2, d)), ind.C1 ? *ind.C1 : BigInt(0));
    if (BigInt(R.lpf()) <= need) {
        std::ostringstream os;
        os << "lpf N = " << R.lpf() << " <= max(2, d, C1) = " << need;
        r.note = os.str();
        r.bound_applies = false;
    }
    return r;
}

RootCount count_roots(const Ring& R, const IntPoly& P) {
    RootCount r = root_bound(R, P);
    auto tab = R.value_table(P);
    r.count = static_cast<std::uint64_t>(std::count(tab.begin(), tab.end(), Elem(0)));
    return r;
}

LinearCount linear_solution_count(std::uint64_t N, std::int64_t B, std::int64_t C) {
    if (N < 2) throw SpecViolation("linear_solution_count: N must be >= 2");
    std::uint64_t b = mod(B, N), c = mod(C, N);
    if (b == 0) throw DegenerateB("linear_solution_count: B = 0 mod N");
    LinearCount r;
    for (std::uint64_t x = 0; x < N; ++x)
        if (mulmod(b, x, N) == c) ++r.count;
    r.bound = N / lpf(N);
    return r;
}

ConfigCount count_configurations(const Ring& R, const std::vector<IntPoly>& P,
                                 const std::vector<std::vector<Elem>>& A) {
    if (P.empty()) throw SpecViolation("count_configurations: empty family");
    if (A.size() != P.size() + 1) throw SpecViolation("count_configurations: need m + 1 sets");
    unsigned n = P[0].n_vars();
    std::uint64_t ny = R.tuple_count(n);
    require_budget(sat_mul(ny, R.size()), "count_configurations");
    std::size_t m = P.size();
    std::vector<std::vector<Elem>> tab(m);
    for (std::size_t i = 0; i < m; ++i) tab[i] = R.value_table(P[i]);
    std::vector<std::vector<char>> in;
    for (auto& s : A) in.push_back(membership(R, s));
    std::vector<std::uint64_t> per_y(ny, 0);
    std::vector<char> degen(ny, 0);
    parallel_for(ny, [&](std::uint64_t y) {
        std::vector<Elem> vals{0};
        for (std::size_t i = 0; i < m; ++i) vals.push_back(tab[i][y]);
        std::sort(vals.begin(), vals.end());
        degen[y] = std::adjacent_find(vals.begin(), vals.end()) != vals.end();
        std::uint64_t c = 0;
        for (Elem x = 0; x < R.size(); ++x) {
            if (!in[0][x]) continue;
            bool ok = true;
            for (std::size_t i = 0; i < m && ok; ++i) ok = in[i + 1][R.add(x, tab[i][y])];
            c += ok;
        }
        per_y[y] = c;
    });
    ConfigCount r;
    for (std::uint64_t y = 0; y < ny; ++y) {
        r.M += per_y[y];
        (degen[y] ? r.M2 : r.M1) += per_y[y];
    }
    r.S = static_cast<double>(r.M1) / (static_cast<double>(R.size()) * static_cast<double>(ny));
    return r;
}

DegenerateBound degenerate_bound(const Ring& R, const std::vector<IntPoly>& P, std::uint64_t A0_size) {
    if (P.empty()) throw SpecViolation("degenerate_bound: empty family");
    DegenerateBound r;
    unsigned n = P[0].n_vars();
    std::vector<IntPoly> all{IntPoly(n)};
    all.insert(all.end(), P.begin(), P.end());
    r.bound_applies = independence_check(P).independent;
    double total = 0;
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            IntPoly D = all[j] - all[i];
            if (D.degree() < 1) {
                r.bound_applies = false;
                total += std::pow(static_cast<double>(R.size()), static_cast<double>(n));
                continue;
            }
            RootCount rb = root_bound(R, D);
            r.bound_applies = r.bound_applies && rb.bound_applies;
            total += rb.bound;
        }
    r.bound = static_cast<double>(A0_size) * total;
    return r;
}

std::optional<Config> find_nontrivial_config(const Ring& R, const std::vector<IntPoly>& P,
                                             const std::vector<std::vector<Elem>>& A) {
    if (P.empty()) throw SpecViolation("find_nontrivial_config: empty family");
    if (A.size() != P.size() + 1) throw SpecViolation("find_nontrivial_config: need m + 1 sets");
    unsigned n = P[0].n_vars();
    std::uint64_t ny = R.tuple_count(n);
    require_budget(sat_mul(ny, R.size()), "find_nontrivial_config");
    std::size_t m = P.size();
    std::vector<std::vector<Elem>> tab(m);
    for (std::size_t i = 0; i < m; ++i) tab[i] = R.value_table(P[i]);
    std::vector<std::vector<char>> in;
    for (auto& s : A) in.push_back(membership(R, s));
    // lexicographic y order: y_1 most significant; value tables use y_1 least significant
    auto table_index = [&](const std::vector<Elem>& y) {
        std::uint64_t t = 0;
        for (unsigned i = n; i-- > 0;) t = t * R.size() + y[i];
        return t;
    };
    std::vector<char> nontrivial(ny);
    for (std::uint64_t t = 0; t < ny; ++t) {
        std::vector<Elem> vals{0};
        for (std::size_t i = 0; i < m; ++i) vals.push_back(tab[i][t]);
        std::sort(vals.begin(), vals.end());
        nontrivial[t] = std::adjacent_find(vals.begin(), vals.end()) == vals.end();
    }
    for (Elem x = 0; x < R.size(); ++x) {
        if (!in[0][x]) continue;
        std::vector<Elem> y(n, 0);
        for (std::uint64_t c = 0; c < ny; ++c) {
            std::uint64_t t = table_index(y);
            if (nontrivial[t]) {
                bool ok = true;
                for (std::size_t i = 0; i < m && ok; ++i) ok = in[i + 1][R.add(x, tab[i][t])];
                if (ok) return Config{x, y};
            }
            for (unsigned i = n; i-- > 0;) {
                if (++y[i] < R.size()) break;
                y[i] = 0;
            }
        }
    }
    return std::nullopt;
}

bool linear_ud_invertible(const Ring& R, const std::vector<std::vector<std::int64_t>>& a) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (auto v : a[i])
            if (!R.is_unit(R.embed(v))) return false;
        for (std::size_t j = 0; j < i; ++j)
            for (std::size_t k = 0; k < a[i].size(); ++k)
                if (!R.is_unit(R.embed(a[i][k] - a[j][k]))) return false;
    }
    return true;
}

InequalitySides linear_ud_check(const Ring& R, const std::vector<std::vector<std::int64_t>>& a,
                                const std::vector<FunctionOnRing>& F, bool enforce) {
    std::size_t d = a.size();
    if (d == 0) throw SpecViolation("linear_ud_check: need d >= 1");
    if (F.size() != d + 1) throw SpecViolation("linear_ud_check: need d + 1 functions");
    unsigned n = static_cast<unsigned>(a[0].size());
    if (n == 0) throw SpecViolation("linear_ud_check: empty coefficient vector");
    for (auto& v : a)
        if (v.size() != n) throw SpecViolation("linear_ud_check: coefficient vectors differ in length");
    if (enforce && !linear_ud_invertible(R, a))
        throw InvertibilityViolation("linear_ud_check: some a^(i) or a^(i) - a^(j) has a non-unit entry");
    std::uint64_t ny = R.tuple_count(n);
    require_budget(sat_mul(ny, R.size()), "linear_ud_check");
    std::vector<std::vector<Elem>> lin(d, std::vector<Elem>(ny));
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<Elem> coef(n);
        for (unsigned k = 0; k < n; ++k) coef[k] = R.embed(a[i][k]);
        for (std::uint64_t t = 0; t < ny; ++t) {
            std::uint64_t v = t;
            Elem s = 0;
            for (unsigned k = 0; k < n; ++k) {
                s = R.add(s, R.mul(coef[k], static_cast<Elem>(v % R.size())));
                v /= R.size();
            }
            lin[i][t] = s;
        }
    }
    cplx total = parallel_csum(R.size(), [&](std::uint64_t lo, std::uint64_t hi) {
        CSum acc;
        for (std::uint64_t x = lo; x < hi; ++x) {
            CSum inner;
            for (std::uint64_t y = 0; y < ny; ++y) {
                cplx t = 1.0;
                for (std::size_t i = 0; i < d; ++i) t *= F[i + 1](R.add(static_cast<Elem>(x), lin[i][y]));
                inner.add(t);
            }
            acc.add(F[0](static_cast<Elem>(x)) * inner.value());
        }
        return acc.value();
    });
    InequalitySides r;
    r.lhs = std::abs(total) / (static_cast<double>(R.size()) * static_cast<double>(ny));
    r.rhs = gowers_norm(F[d], static_cast<unsigned>(d));
    return r;
}

std::vector<ZnVec> vdc_window(std::uint64_t N, std::uint64_t H, unsigned n) {
    if (H == 0) throw SpecViolation("vdc window: H must be >= 1");
    std::set<std::uint64_t> base;
    for (std::uint64_t v = 0; v < H && v < N; ++v) base.insert(v);
    for (std::uint64_t v = 1; v < H && v < N; ++v) base.insert(N - v);
    std::vector<std::uint64_t> b(base.begin(), base.end());
    std::vector<ZnVec> out;
    std::uint64_t count = sat_pow(b.size(), n);
    require_budget(count, "vdc window");
    ZnVec idx(n, 0);
    for (std::uint64_t c = 0; c < count; ++c) {
        ZnVec h(n);
        for (unsigned i = 0; i < n; ++i) h[i] = b[idx[i]];
        out.push_back(h);
        for (unsigned i = n; i-- > 0;) {
            if (++idx[i] < b.size()) break;
            idx[i] = 0;
        }
    }
    return out;
}

double vdc_G(const Ring& R, const std::vector<cplx>& g, const ZnVec& h, unsigned n) {
    std::uint64_t ny = R.tuple_count(n);
    std::vector<Elem> he(n);
    for (unsigned i = 0; i < n; ++i) he[i] = R.embed(static_cast<std::int64_t>(h[i]));
    std::vector<std::uint64_t> shifted(ny);
    for (std::uint64_t t = 0; t < ny; ++t) {
        std::uint64_t v = t, out = 0, st = 1;
        for (unsigned i = 0; i < n; ++i) {
            out += st * R.add(static_cast<Elem>(v % R.size()), he[i]);
            v /= R.size();
            st *= R.size();
        }
        shifted[t] = out;
    }
    CSum s;
    std::uint64_t sz = R.size();
    for (std::uint64_t t = 0; t < ny; ++t)
        for (std::uint64_t x = 0; x < sz; ++x) s.add(g[x + sz * shifted[t]] * std::conj(g[x + sz * t]));
    return std::abs(s.value()) / (static_cast<double>(sz) * static_cast<double>(ny));
}

VdcResult vdc_select_h(const Ring& R, const std::vector<cplx>& g, std::uint64_t H,
                       const std::set<ZnVec>& excluded, unsigned n) {
    std::uint64_t ny = R.tuple_count(n);
    std::uint64_t sz = R.size();
    if (g.size() != sz * ny) throw SpecViolation("vdc_select_h: g must have |R|^{n+1} entries");
    std::vector<ZnVec> allowed;
    for (auto& h : vdc_window(R.characteristic(), H, n))
        if (!excluded.count(h)) allowed.push_back(h);
    if (allowed.empty()) throw EmptyAllowedSet("vdc_select_h: every window shift is excluded");
    require_budget(sat_mul(allowed.size(), sat_mul(ny, sz)), "vdc_select_h");

    VdcResult r;
    CSum lhs;
    for (std::uint64_t x = 0; x < sz; ++x) {
        CSum in;
        for (std::uint64_t t = 0; t < ny; ++t) in.add(g[x + sz * t]);
        lhs.add(std::norm(in.value() / static_cast<double>(ny)));
    }
    r.lhs = lhs.value().real() / static_cast<double>(sz);

    std::vector<double> G(allowed.size());
    parallel_for(allowed.size(), [&](std::uint64_t i) { G[i] = vdc_G(R, g, allowed[i], n); });
    std::size_t best = 0;
    for (std::size_t i = 1; i < G.size(); ++i)
        if (G[i] > G[best] + 1e-12) best = i;
    r.h = allowed[best];
    r.G = G[best];
    r.excluded_size = excluded.size();
    r.rhs = std::ldexp(1.0, static_cast<int>(n)) *
            (static_cast<double>(excluded.size()) / std::pow(static_cast<double>(H), static_cast<double>(n)) + r.G);
    return r;
}

Construction avoid_3y(unsigned m) {
    std::vector<RingSpec> parts(m, RingSpec::modint(3));
    parts.push_back(RingSpec::modint(9));
    Construction c;
    c.name = "avoid-3y(" + std::to_string(m) + ")";
    c.ring = make_ring(RingSpec::product(parts));
    std::size_t last = c.ring->components().size() - 1;
    std::vector<Elem> A;
    for (Elem x = 0; x < c.ring->size(); ++x)
        if (c.ring->component_value(x, last) < 3) A.push_back(x);
    c.family = {IntPoly::parse("3*y")};
    c.sets = {A, A};
    return c;
}

Construction avoid_y_y2p1(std::uint64_t p, unsigned k) {
    if (!is_prime(p) || k < 1) throw SpecViolation("avoid-y-y2p1: need prime p and k >= 1");
    Construction c;
    c.name = "avoid-y-y2p1(" + std::to_string(p) + "," + std::to_string(k) + ")";
    c.ring = make_ring(RingSpec::modint(sat_pow(p, k)));
    std::vector<Elem> A;
    for (Elem x = 0; x < c.ring->size(); x += static_cast<Elem>(p)) A.push_back(x);
    c.family = IntPoly::parse_family("y, y^2+1");
    c.sets = {A, A, A};
    return c;
}

Construction loper(std::uint64_t p, unsigned k) {
    Construction c;
    c.name = "loper(" + std::to_string(p) + "," + std::to_string(k) + ")";
    c.ring = make_ring(RingSpec::nilpotent(p, k));
    std::vector<Elem> A;
    for (Elem x = 0; x < c.ring->size(); ++x)
        if (c.ring->digits(x)[0] == 0) A.push_back(x);
    c.family = {IntPoly::parse("y^2")};
    c.sets = {A, A};
    return c;
}

}  // namespace polysz
