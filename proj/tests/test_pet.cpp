#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "polysz/errors.hpp"
#include "polysz/pet.hpp"
#include "support.hpp"

using namespace polysz;
using oracle::cplx;

namespace {

using WP = WeightPair;

std::vector<std::int64_t> coeffs(const IntPoly& p) {
    std::vector<std::int64_t> c(static_cast<std::size_t>(std::max(p.degree(), 0)) + 1, 0);
    for (auto& [e, v] : p.terms()) c[e[0]] = v.convert_to<std::int64_t>();
    return c;
}

// f_d(m), g_d(m) from the recursion, plain integers
std::uint64_t g_or(unsigned d, std::uint64_t m);
std::uint64_t f_or(unsigned d, std::uint64_t m) {
    if (d == 1) return m;
    std::uint64_t total = m, x = m;
    for (std::uint64_t i = 0; i <= m; ++i) {
        total += f_or(d - 1, x);
        if (i < m) x = 2 * g_or(d - 1, x);
    }
    return total;
}
std::uint64_t g_or(unsigned d, std::uint64_t m) {
    if (d == 1) return m << m;
    std::uint64_t x = m;
    for (std::uint64_t i = 0; i <= m; ++i) x = 2 * g_or(d - 1, x);
    return x;
}

std::vector<WP> pairs_up_to(std::uint64_t mmax, unsigned support) {
    std::vector<WP> out;
    for (std::uint64_t m = 1; m <= mmax; ++m) {
        std::vector<std::uint64_t> s(support, 0);
        std::function<void(unsigned, std::uint64_t)> rec = [&](unsigned i, std::uint64_t left) {
            if (i == support) {
                WP p(m, s);
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

bool induces_constant_oracle(const IntPoly& p, std::uint64_t N) {
    auto c = coeffs(p);
    std::int64_t v0 = oracle::peval(c, 0, static_cast<std::int64_t>(N));
    for (std::int64_t y = 1; y < static_cast<std::int64_t>(N); ++y)
        if (oracle::peval(c, y, static_cast<std::int64_t>(N)) != v0) return false;
    return true;
}

struct RandomStep {
    RingPtr ring;
    std::vector<IntPoly> family;
    std::vector<FunctionOnRing> F;
    std::uint64_t H;
};

RandomStep random_instance(std::mt19937_64& rng) {
    static const std::uint64_t primes[] = {11, 13, 17, 19, 23};
    RandomStep s;
    std::uint64_t p = primes[rng() % 5];
    s.ring = make_ring(RingSpec::modint(p));
    std::size_t m = 1 + rng() % 3;
    for (std::size_t i = 0; i < m; ++i) {
        int d = 1 + static_cast<int>(rng() % 3);
        std::vector<std::int64_t> c(d + 1, 0);
        for (int j = 1; j <= d; ++j) c[j] = static_cast<std::int64_t>(rng() % 7) - 3;
        if (c[d] == 0) c[d] = 1;
        s.family.push_back(IntPoly::from_coeffs(c));
    }
    std::stable_sort(s.family.begin(), s.family.end(), [](auto& a, auto& b) { return a.degree() < b.degree(); });
    for (std::size_t i = 0; i <= m; ++i) s.F.push_back(FunctionOnRing::random_bounded(s.ring, rng()));
    std::uint64_t lo = std::max<std::uint64_t>(2, m * m), hi = (p + 1) / 2;
    s.H = lo + rng() % (hi - lo + 1);
    return s;
}

}  // namespace

TEST_CASE("weight pair classes") {
    CHECK(classify(WP(2, {1, 1}), 1) == PairClass::General);
    CHECK_FALSE(is_lonely(WP(2, {1, 1}), 1));
    CHECK(is_lonely(WP(1, {0, 0, 1}), 1));
    CHECK(classify(WP(3, {2, 1}), 2) == PairClass::Deg1);
    CHECK(classify(WP(3, {}), 2) == PairClass::Deg0);
    CHECK(WP(3, {1, 0, 0}).seq == std::vector<std::uint64_t>{1});
    CHECK(WP(2, {1, 1}).to_string() == "(2,(1,1))");
    CHECK_FALSE(WP(1, {1, 1}).valid());
}

TEST_CASE("permissible successors") {
    auto s = permissible_successors(WP(1, {0, 1}), 1);
    CHECK(std::find(s.begin(), s.end(), WP(2, {1})) != s.end());
    for (auto& q : s) CHECK(is_permissible(WP(1, {0, 1}), q, 1));
    CHECK_THROWS_AS(permissible_successors(WP(2, {}), 1), Deg0Input);
    // non-lonely: a_{s'+1} drops by one, earlier entries filled with sum <= 2m
    auto t = permissible_successors(WP(2, {0, 1, 1}), 3);
    for (auto& q : t) {
        CHECK(q.a(2) == 0);
        CHECK(q.a(3) == 1);
        CHECK(q.a(1) <= 4);
    }
    // a degree-0 successor arises only from (m, (1, 0, ...))
    for (unsigned n = 1; n <= 3; ++n)
        for (auto& p : pairs_up_to(3, 3))
            for (auto& q : permissible_successors(p, n))
                if (q.seq.empty()) CHECK(p.seq == std::vector<std::uint64_t>{1});
}

TEST_CASE("t_bound") {
    CHECK(t_bound(1, 1).value == 1);
    CHECK(t_bound(3, 1).value == 3);
    CHECK(t_bound(1, 2).value == 6);
    CHECK(t_bound(2, 2).value == f_or(2, 2));
    CHECK(f_or(2, 2) == 2097172);
    // f_2(3) and f_3(1) already pass 2^4096
    CHECK(t_bound(3, 2).saturated);
    CHECK(t_bound(1, 3).saturated);
    auto big = t_bound(2, 3);
    CHECK((big.saturated || big.value > BigInt(1) << 64));
    CHECK(t_bound(3, 3).to_string().size() > 3);
    CHECK_THROWS_AS(t_bound(0, 2), SpecViolation);
}

TEST_CASE("max_path_length stays below t_bound") {
    CHECK(max_path_length(WP(1, {0, 1}), 1, 8) == 1);
    CHECK(max_path_length(WP(2, {2}), 1, 8) == 0);
    auto l = max_path_length(WP(2, {1, 1}), 1, 8);
    CHECK(l >= 1);
    CHECK(t_bound(2, 2).at_least(l));
    for (unsigned n = 1; n <= 3; ++n)
        for (auto& p : pairs_up_to(3, 3)) {
            unsigned d = static_cast<unsigned>(p.seq.size());
            auto len = max_path_length(p, n, 6);
            CAPTURE(p.to_string());
            CHECK(t_bound(p.m, d).at_least(len));
        }
}

TEST_CASE("differencing selection") {
    std::vector<MemberInfo> a{{2, 2, "1"}, {1, 1, "1"}, {2, 2, "3"}};
    auto s = select_differencing(a, SelectionPolicy::LowestIndex);
    CHECK(s.order[0] == 1);
    CHECK(s.ell == 2);
    std::vector<MemberInfo> b{{3, 3, "1"}, {2, 2, "5"}, {2, 2, "2"}, {3, 3, "1"}};
    auto t = select_differencing(b, SelectionPolicy::LowestIndex);
    CHECK(t.order[0] == 1);
    CHECK(t.ell == 1);
    CHECK_THROWS_AS(select_differencing(b, SelectionPolicy::Strict), AmbiguousSelection);
    auto f = select_differencing(b, SelectionPolicy::LowestIndex, 2);
    CHECK(f.order[0] == 2);
    // every ordering is a permutation
    for (auto* x : {&s, &t, &f}) {
        auto o = x->order;
        std::sort(o.begin(), o.end());
        for (std::size_t i = 0; i < o.size(); ++i) CHECK(o[i] == i);
    }
}

TEST_CASE("difference_family on {y, y^2}") {
    std::uint64_t p = 101;
    for (std::uint64_t h : {1u, 3u, 50u}) {
        auto fs = difference_family(IntPoly::parse_family("y, y^2"), p, {h});
        REQUIRE(fs.Q.size() == 2);
        // {y^2 - y, (y + h)^2 - y} without constants
        auto a = IntPoly::from_coeffs({0, -1, 1}).reduce_mod(p);
        auto b = IntPoly::from_coeffs({0, static_cast<std::int64_t>(2 * h) - 1, 1}).reduce_mod(p);
        CHECK(fs.Q[0].without_constant() == a);
        CHECK(fs.Q[1].without_constant() == b);
        CHECK(fs.g.back().kind == GSource::Plain);
        CHECK(fs.g.back().f == 2);
    }
    // second step gives the linear family {2h2 y, 2h1 y, 2(h1 + h2) y}
    std::uint64_t h1 = 3, h2 = 7;
    auto first = difference_family(IntPoly::parse_family("y, y^2"), p, {h1});
    auto second = difference_family(first.Q, p, {h2});
    REQUIRE(second.Q.size() == 3);
    std::vector<IntPoly> want{IntPoly::from_coeffs({0, static_cast<std::int64_t>(2 * h2)}),
                              IntPoly::from_coeffs({0, static_cast<std::int64_t>(2 * h1)}),
                              IntPoly::from_coeffs({0, static_cast<std::int64_t>(2 * (h1 + h2))})};
    for (std::size_t i = 0; i < 3; ++i) CHECK(second.Q[i].without_constant() == want[i].reduce_mod(p));
}

TEST_CASE("exclusion set: coefficient solver agrees with translate testing") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 40; ++t) {
        auto s = random_instance(rng);
        std::uint64_t N = s.ring->characteristic();
        std::vector<IntPoly> P;
        for (auto& q : s.family) P.push_back(q.reduce_mod(N));
        if (!essentially_distinct(P, N).ok) continue;
        std::vector<MemberInfo> info;
        for (auto& q : P) {
            auto z = zn_profile(q, N);
            if (!z.weight) continue;
            info.push_back({z.deg_zn, *z.weight, std::to_string(*z.leading_coeff)});
        }
        if (info.size() != P.size() || info.back().weight < info.front().weight) continue;
        Selection sel;
        try {
            sel = select_differencing(info, SelectionPolicy::LowestIndex);
        } catch (const Error&) {
            continue;
        }
        std::vector<IntPoly> R;
        for (auto i : sel.order) R.push_back(P[i]);
        auto a = exclusion_set(R, sel.ell, N, s.H, EqMethod::Coefficient);
        auto b = exclusion_set(R, sel.ell, N, s.H, EqMethod::BruteForce);
        CHECK(a == b);
        // every excluded shift really breaks distinctness, checked by evaluation
        for (auto& h : a) {
            std::vector<IntPoly> fam = R;
            for (std::size_t i = sel.ell - 1; i < R.size(); ++i) fam.push_back(R[i].shift({BigInt(h[0])}).reduce_mod(N));
            bool broken = false;
            for (std::size_t i = 0; i < fam.size() && !broken; ++i) {
                broken = induces_constant_oracle(fam[i], N);
                for (std::size_t j = i + 1; j < fam.size() && !broken; ++j)
                    broken = induces_constant_oracle(fam[i] - fam[j], N);
            }
            CHECK(broken);
        }
    }
}

TEST_CASE("randomized pet_step postconditions") {
    std::mt19937_64 rng(2024);
    int done = 0;
    for (int t = 0; t < 400 && done < 60; ++t) {
        auto s = random_instance(rng);
        PetStepResult r;
        try {
            r = pet_step(s.ring, s.family, s.F, s.H);
        } catch (const HypothesisViolation&) {
            continue;
        }
        ++done;
        std::uint64_t N = s.ring->characteristic();
        auto Ni = static_cast<std::int64_t>(N);
        CAPTURE(family_to_string(s.family));
        CHECK(r.checks.all());
        // lhs against the direct average
        std::vector<std::vector<std::int64_t>> Pc;
        std::vector<std::vector<cplx>> Fv;
        for (auto& q : s.family) Pc.push_back(coeffs(q));
        for (auto& f : s.F) Fv.push_back(f.values());
        CHECK(r.lhs == doctest::Approx(std::abs(oracle::lambda_zn(Pc, Fv, Ni))).epsilon(1e-9));
        // Lambda_Q(g) directly, and the inequality recomputed
        std::vector<std::vector<std::int64_t>> Qc;
        std::vector<std::vector<cplx>> Gv;
        for (auto& q : r.new_family) Qc.push_back(coeffs(q));
        for (auto& g : r.g) Gv.push_back(g.values());
        double lq = std::abs(oracle::lambda_zn(Qc, Gv, Ni));
        CHECK(r.lambda_Q == doctest::Approx(lq).epsilon(1e-9));
        double rhs = std::sqrt(2.0) * (std::sqrt(2.0) * static_cast<double>(s.family.size()) / std::sqrt(static_cast<double>(s.H)) + std::sqrt(lq));
        CHECK(r.lhs <= rhs + 1e-9);
        // traceability: the last new function is f_m itself
        CHECK(r.g.back().values() == s.F.back().values());
        // distinctness by evaluation
        for (std::size_t i = 0; i < r.new_family.size(); ++i) {
            CHECK_FALSE(induces_constant_oracle(r.new_family[i], N));
            for (std::size_t j = i + 1; j < r.new_family.size(); ++j)
                CHECK_FALSE(induces_constant_oracle(r.new_family[i] - r.new_family[j], N));
        }
        // height bound (k+1)^{2k} M H^k with n = 1
        std::uint64_t hmax = 0;
        for (auto& q : r.new_family)
            for (auto& [e, v] : q.terms()) hmax = std::max(hmax, zn_height(v, N));
        BigInt bound = boost::multiprecision::pow(BigInt(r.k + 1), 2 * r.k) * r.M * boost::multiprecision::pow(BigInt(s.H), r.k);
        CHECK(BigInt(hmax) <= bound);
        CHECK(is_permissible(r.before, r.after, 1));
        if (r.branch == 'e') {
            std::uint64_t wmax = 0;
            for (auto& q : r.new_family) wmax = std::max(wmax, *zn_profile(q, N).weight);
            CHECK(*zn_profile(r.new_family.back(), N).weight == wmax);
        }
    }
    CHECK(done >= 40);
}

TEST_CASE("pet_step on two variables and forced shifts") {
    auto R = make_ring(RingSpec::modint(11));
    auto fam = IntPoly::parse_family("y1, y1y2", 2);
    std::vector<FunctionOnRing> F;
    for (int i = 0; i < 3; ++i) F.push_back(FunctionOnRing::random_bounded(R, 40 + i));
    auto r = pet_step(R, fam, F, 4);
    CHECK(r.checks.all());
    CHECK(r.selected_h.size() == 2);
    auto forced = pet_transform(R, fam, F, 4, {1, 2});
    CHECK(forced.selected_h == ZnVec{1, 2});
    CHECK(forced.checks.permissible);
    CHECK(forced.checks.distinct);
    CHECK(forced.checks.traceable);
    CHECK_THROWS_AS(pet_transform(R, fam, F, 4, {0, 0}), HypothesisViolation);
    CHECK_THROWS_AS(pet_transform(R, fam, F, 4, {5, 0}), HypothesisViolation);
}

TEST_CASE("pet_step preconditions") {
    auto R = make_ring(RingSpec::modint(11));
    std::vector<FunctionOnRing> F3(3, FunctionOnRing::constant(R, 1.0));
    CHECK_THROWS_AS(pet_step(R, IntPoly::parse_family("y, 2y"), F3, 4), HypothesisViolation);   // linear
    CHECK_THROWS_AS(pet_step(R, IntPoly::parse_family("y^2, y"), F3, 4), HypothesisViolation);  // order
    CHECK_THROWS_AS(pet_step(R, IntPoly::parse_family("y, y^2"), F3, 1), HypothesisViolation);  // H
    CHECK_THROWS_AS(pet_step(R, IntPoly::parse_family("y^2, y^2+1"), F3, 4), HypothesisViolation);
    try {
        pet_step(R, IntPoly::parse_family("y, y^2"), F3, 100);
        FAIL("expected a violation");
    } catch (const HypothesisViolation& e) {
        CHECK(e.stage() == "pet_step");
        CHECK(std::string(e.what()).find("H = 100") != std::string::npos);
    }
    auto z3 = make_ring(RingSpec::modint(3));
    std::vector<FunctionOnRing> G(3, FunctionOnRing::constant(z3, 1.0));
    CHECK_THROWS_AS(pet_step(z3, IntPoly::parse_family("y^3, y^4"), G, 2), HypothesisViolation);
}

TEST_CASE("matrix regularization") {
    BigInt N = (BigInt(1) << 300) + 1;
    BigMatrix reg{{1, 2, 3}};
    auto r0 = matrix_regularize(reg, N, 3);
    CHECK(r0.B == reg);
    CHECK(r0.ops.empty());
    CHECK_THROWS_AS(matrix_regularize({{1, 1}, {2, 2}}, N, 3), HypothesisViolation);
    CHECK_THROWS_AS(matrix_regularize({{0, 1}, {0, 2}}, N, 3), HypothesisViolation);
    CHECK_THROWS_AS(matrix_regularize({{1, 0}, {0, 1}}, BigInt(101), 1), HypothesisViolation);

    BigMatrix A{{1, 0}, {2, 3}};
    BigInt N8 = (BigInt(1) << 1300) + 1;  // 2^8 (log2 3 + 3) < 1300
    auto r = matrix_regularize(A, N8, 3);
    CHECK(is_row_regular(r.B, N8));
    CHECK(replay_row_ops(A, r.ops, N8) == r.B);
    CHECK(r.height <= r.height_bound);

    std::mt19937_64 rng(77);
    int done = 0;
    while (done < 60) {
        std::size_t n = 1 + rng() % 3, m = 1 + rng() % 2;
        if (n == 1) m = 2 + rng() % 2;
        BigInt M0 = 1 + rng() % 4;
        BigMatrix B(n, std::vector<BigInt>(m));
        for (auto& row : B)
            for (auto& v : row) v = static_cast<std::int64_t>(rng() % (2 * M0.convert_to<unsigned>() + 1)) - M0.convert_to<std::int64_t>();
        unsigned nm2 = static_cast<unsigned>(n * m * m);
        BigInt NN = (BigInt(1) << static_cast<unsigned>((1U << nm2) * 5 + 8)) + 1;
        RegularizeResult res;
        try {
            res = matrix_regularize(B, NN, M0);
        } catch (const HypothesisViolation&) {
            continue;  // zero or repeated column
        }
        ++done;
        CHECK(is_row_regular(res.B, NN));
        CHECK(replay_row_ops(B, res.ops, NN) == res.B);
        CHECK(res.height <= res.height_bound);
        CHECK(res.ops.size() <= nm2);
        for (auto& row : res.B)
            for (std::size_t j = 0; j < row.size(); ++j) {
                CHECK(row[j] != 0);
                for (std::size_t k = j + 1; k < row.size(); ++k) CHECK(row[j] != row[k]);
            }
    }
}

TEST_CASE("us_control_trace") {
    auto R = make_ring(RingSpec::modint(101));
    // f2 mean-zero
    std::vector<cplx> v(101);
    for (int x = 0; x < 101; ++x) v[x] = oracle::e(7 * x, 101);
    std::vector<FunctionOnRing> F{FunctionOnRing::random_bounded(R, 1), FunctionOnRing::random_bounded(R, 2),
                                  FunctionOnRing(R, v)};
    auto tr = us_control_trace(R, IntPoly::parse_family("y, y^2"), F, 2, {4, 4});
    CHECK_FALSE(tr.linear_path);
    CHECK(tr.steps.size() == 2);
    for (auto& s : tr.steps) CHECK(s.checks.all());
    CHECK(tr.certified);
    CHECK(tr.ud_lhs <= tr.ud_rhs + 1e-9);
    CHECK(tr.lambda_abs == doctest::Approx(std::abs(oracle::lambda_zn({{0, 1}, {0, 0, 1}},
                                                                      {F[0].values(), F[1].values(), F[2].values()}, 101)))
                               .epsilon(1e-9));
    CHECK(replay_row_ops(tr.A, tr.ops, BigInt(101)) == tr.B);

    auto lin = us_control_trace(R, IntPoly::parse_family("y"), {F[0], F[2]}, 1);
    CHECK(lin.linear_path);
    CHECK(lin.certified);
    CHECK(lin.u1_bound < 1e-9);

    auto z3 = make_ring(RingSpec::modint(3));
    std::vector<FunctionOnRing> G(3, FunctionOnRing::constant(z3, 1.0));
    CHECK_THROWS_AS(us_control_trace(z3, IntPoly::parse_family("y^3, y^4"), G, 2), HypothesisViolation);
    CHECK_THROWS_AS(us_control_trace(R, IntPoly::parse_family("y, y^2+1"), F, 2), HypothesisViolation);
    CHECK_THROWS_AS(us_control_trace(R, IntPoly::parse_family("y, y^2"), F, 2, {2, 2}), HypothesisViolation);
    CHECK(default_H(101, 1) == 4);
    CHECK(default_H(101, 2) == 16);
}
