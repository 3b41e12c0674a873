#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "polysz/counting.hpp"
#include "polysz/errors.hpp"
#include "support.hpp"

using namespace polysz;
using oracle::cplx;

namespace {

RingPtr ring(const std::string& s) { return make_ring(RingSpec::parse(s)); }

std::vector<std::string> desk() {
    std::vector<std::string> out;
    for (int N = 3; N <= 30; ++N) out.push_back("zmod:" + std::to_string(N));
    for (auto s : {"gf:4", "gf:8", "gf:9", "gf:25", "gf:27", "pgr:6:x^2-2", "prod:(zmod:3,zmod:9)", "nilp:3:2"})
        out.push_back(s);
    return out;
}

// root count through ring arithmetic only
std::uint64_t roots_oracle(const Ring& R, const IntPoly& P) {
    return oracle::count_configs(R, {P}, {std::vector<Elem>{0}, std::vector<Elem>{0}}).M;
}

}  // namespace

TEST_CASE("Hadamard character sums") {
    for (std::uint64_t p : {3u, 5u, 7u, 11u, 13u}) {
        auto R = make_ring(RingSpec::modint(p));
        for (std::uint64_t a = 1; a < p; ++a) {
            auto r = hadamard_char_sum(*R, a, 2);
            CHECK(std::abs(r.value - oracle::hadamard_zn(static_cast<std::int64_t>(a), p)) < 1e-12);
            CHECK(std::abs(r.value - 1.0 / static_cast<double>(p)) < 1e-12);
        }
        auto one = hadamard_char_sum(*R, 1, 1);
        CHECK(std::abs(one.value) < 1e-12);
        CHECK(one.bound == 0);
    }
    // composite moduli against the oracle; bound 1/lpf
    for (std::uint64_t N : {4u, 6u, 12u, 15u}) {
        auto R = make_ring(RingSpec::modint(N));
        for (std::uint64_t a = 1; a < N; ++a) {
            auto r = hadamard_char_sum(*R, a, 2);
            CHECK(std::abs(r.value - oracle::hadamard_zn(static_cast<std::int64_t>(a), N)) < 1e-12);
            CHECK(std::abs(r.value) <= r.bound + 1e-9);
        }
    }
    auto R = ring("prod:(zmod:3,zmod:9)");
    for (std::uint64_t c = 1; c < R->num_characters(); ++c) CHECK(std::abs(hadamard_char_sum(*R, c, 2).value) <= 1.0 / 3 + 1e-9);
    // three factors: bound 2/lpf
    auto z7 = ring("zmod:7");
    CHECK(std::abs(hadamard_char_sum(*z7, 3, 3).value) <= 2.0 / 7 + 1e-9);
    CHECK_THROWS_AS(hadamard_char_sum(*z7, 0, 2), TrivialCharacter);
}

TEST_CASE("character sums of polynomial arguments") {
    for (std::uint64_t p : {3u, 5u, 7u, 11u, 13u, 17u}) {
        auto R = make_ring(RingSpec::modint(p));
        for (std::uint64_t a = 1; a < p; ++a) {
            auto r = char_sum(*R, IntPoly::parse_family("y^2"), {a});
            CHECK(std::abs(r.value - oracle::gauss_zn(static_cast<std::int64_t>(a), p)) < 1e-12);
            CHECK(std::abs(r.value) == doctest::Approx(1.0 / std::sqrt(static_cast<double>(p))).epsilon(1e-9));
            CHECK(r.bound_applies);
            CHECK(std::abs(r.value) <= r.bound + 1e-12);
        }
    }
    auto R = ring("zmod:5");
    CHECK_THROWS_AS(char_sum(*R, IntPoly::parse_family("y^2"), {0}), TrivialCharacter);
    auto Q = IntPoly::parse_family("y1, y1y2", 2);
    for (std::uint64_t a = 0; a < 5; ++a)
        for (std::uint64_t b = 0; b < 5; ++b) {
            if (a == 0 && b == 0) continue;
            auto r = char_sum(*R, Q, {a, b});
            CHECK(std::abs(r.value) <= std::pow(0.2, 0.25) + 1e-9);
        }
}

TEST_CASE("root counts") {
    CHECK(count_roots(*ring("zmod:15"), IntPoly::parse("y^2-1")).count == 4);
    for (auto& s : desk()) {
        auto R = ring(s);
        CHECK(count_roots(*R, IntPoly::parse("y")).count == 1);
        for (auto p : {"y^2", "y^2-1", "y^3-y"}) {
            auto P = IntPoly::parse(p);
            auto r = count_roots(*R, P);
            CHECK(r.count == roots_oracle(*R, P));
            if (r.bound_applies) CHECK(static_cast<double>(r.count) <= r.bound + 1e-9);
        }
    }
    for (auto [p, k] : std::vector<std::pair<std::uint64_t, unsigned>>{{3, 1}, {3, 2}, {5, 1}, {5, 2}}) {
        auto R = make_ring(RingSpec::nilpotent(p, k));
        std::uint64_t want = 1;
        for (unsigned i = 0; i < k; ++i) want *= p;
        CHECK(count_roots(*R, IntPoly::parse("y^2")).count == want);
    }
    auto two = count_roots(*ring("zmod:7"), IntPoly::parse("y1y2", 2));
    CHECK(two.count == 13);
}

TEST_CASE("linear congruences") {
    auto a = linear_solution_count(6, 2, 0);
    CHECK(a.count == 2);
    CHECK(a.bound == 3);
    CHECK(linear_solution_count(13, 5, 7).count == 1);
    auto b = linear_solution_count(12, 4, 2);
    CHECK(b.count == 0);
    CHECK(b.bound == 6);
    CHECK_THROWS_AS(linear_solution_count(6, 6, 1), DegenerateB);
    for (std::uint64_t N = 2; N < 40; ++N)
        for (std::int64_t B = 1; B < static_cast<std::int64_t>(N); ++B) {
            auto r = linear_solution_count(N, B, 1);
            CHECK(r.count <= r.bound);
        }
}

TEST_CASE("configuration counts match lambda of indicators") {
    std::mt19937_64 rng(13);
    const std::vector<std::string> rings = {"zmod:7", "zmod:8", "zmod:9", "gf:4", "zmod:10", "pgr:6:x^2-2", "nilp:2:2"};
    const std::vector<std::string> fams = {"y", "y^2", "y, y^2", "y, 2y", "3y", "y^2, y^3", "y1y2", "y1, y2"};
    for (int t = 0; t < 30; ++t) {
        auto R = ring(rings[rng() % rings.size()]);
        auto fam = IntPoly::parse_family(fams[rng() % fams.size()]);
        if (fam[0].n_vars() == 2 && R->size() > 10) continue;
        std::vector<std::vector<Elem>> A;
        std::vector<FunctionOnRing> F;
        for (std::size_t i = 0; i <= fam.size(); ++i) {
            A.push_back(oracle::random_subset(R->size(), 0.6, rng));
            F.push_back(FunctionOnRing::indicator(R, A.back()));
        }
        auto c = count_configurations(*R, fam, A);
        auto want = oracle::count_configs(*R, fam, A);
        CHECK(c.M == want.M);
        CHECK(c.M1 == want.M1);
        CHECK(c.M == c.M1 + c.M2);
        double total = std::pow(static_cast<double>(R->size()), fam[0].n_vars() + 1.0);
        LambdaQuery q{R, fam, F, {}, {}};
        CHECK(std::abs(total * lambda(q).real() - static_cast<double>(c.M)) < 1e-6);
        CHECK(c.S == doctest::Approx(static_cast<double>(c.M1) / total));
        auto w = find_nontrivial_config(*R, fam, A);
        CHECK(w.has_value() == (c.M1 > 0));
    }
    auto R = ring("zmod:5");
    std::vector<Elem> all{0, 1, 2, 3, 4};
    CHECK(count_configurations(*R, IntPoly::parse_family("y"), {all, all}).M == 25);
}

TEST_CASE("avoidance constructions") {
    for (unsigned m : {1u, 2u}) {
        auto c = avoid_3y(m);
        auto r = count_configurations(*c.ring, c.family, c.sets);
        CHECK(r.M1 == 0);
        CHECK(r.M > 0);
        CHECK_FALSE(find_nontrivial_config(*c.ring, c.family, c.sets));
    }
    for (auto [p, k] : std::vector<std::pair<std::uint64_t, unsigned>>{{3, 2}, {5, 2}, {3, 3}}) {
        auto c = avoid_y_y2p1(p, k);
        auto r = count_configurations(*c.ring, c.family, c.sets);
        CHECK(r.M1 == 0);
        if (k == 2) CHECK(r.M == 0);
    }
    auto l = loper(3, 2);
    auto r = count_configurations(*l.ring, l.family, l.sets);
    CHECK(r.M1 == 0);
    auto any = find_nontrivial_config(*ring("zmod:5"), IntPoly::parse_family("y"),
                                      {{0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}});
    REQUIRE(any);
    CHECK(any->x == 0);
    CHECK(any->y == std::vector<Elem>{1});
}

TEST_CASE("degenerate configuration bound") {
    std::mt19937_64 rng(3);
    for (std::uint64_t p : {5u, 7u, 11u}) {
        auto R = make_ring(RingSpec::modint(p));
        auto fam = IntPoly::parse_family("y, y^2");
        auto A = oracle::random_subset(p, 0.5, rng);
        std::vector<Elem> all(p);
        for (Elem i = 0; i < p; ++i) all[i] = i;
        auto c = count_configurations(*R, fam, {A, all, all});
        auto b = degenerate_bound(*R, fam, A.size());
        CHECK(b.bound_applies);
        CHECK(static_cast<double>(c.M2) <= b.bound + 1e-9);
    }
    auto R = ring("nilp:3:3");
    std::vector<Elem> all(R->size());
    for (Elem i = 0; i < R->size(); ++i) all[i] = i;
    auto c = count_configurations(*R, IntPoly::parse_family("y^2"), {all, all});
    CHECK(c.M2 == R->size() * count_roots(*R, IntPoly::parse("y^2")).count);
}

TEST_CASE("linear Ud control") {
    std::mt19937_64 rng(21);
    // Z_7, a = 1, 2, 3 against the direct average and the U^3 norm from the definition
    auto R = ring("zmod:7");
    for (int t = 0; t < 5; ++t) {
        std::vector<std::vector<cplx>> F;
        std::vector<FunctionOnRing> FF;
        for (int i = 0; i < 4; ++i) {
            F.push_back(oracle::random_bounded(7, rng));
            FF.emplace_back(R, F.back());
        }
        auto s = linear_ud_check(*R, {{1}, {2}, {3}}, FF);
        double lhs = std::abs(oracle::lambda_zn({{0, 1}, {0, 2}, {0, 3}}, F, 7));
        CHECK(s.lhs == doctest::Approx(lhs).epsilon(1e-9));
        CHECK(s.rhs == doctest::Approx(std::pow(oracle::gowers_power_zn(F[3], 3), 1.0 / 8)).epsilon(1e-9));
        CHECK(s.lhs <= s.rhs + 1e-12);
    }
    // mean-zero f_1 kills the d = 1 average
    std::vector<cplx> mz{1.0, -1.0, 1.0, -1.0, cplx(0, 1), cplx(0, -1), 0.0};
    auto z = linear_ud_check(*R, {{1}}, {FunctionOnRing::random_bounded(R, 1), FunctionOnRing(R, mz)});
    CHECK(z.lhs < 1e-8);
    CHECK(z.rhs < 1e-8);
    // Z_6 with a = 3 is not invertible
    auto [f1, f0] = z6_counterexample();
    auto& z6 = f1.ring();
    CHECK_FALSE(linear_ud_invertible(z6, {{3}}));
    CHECK_THROWS_AS(linear_ud_check(z6, {{3}}, {f0, f1}), InvertibilityViolation);
    auto raw = linear_ud_check(z6, {{3}}, {f0, f1}, false);
    CHECK(raw.lhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(raw.lhs > raw.rhs);
    CHECK_FALSE(linear_ud_invertible(*R, {{1}, {1}}));
    CHECK(linear_ud_invertible(*R, {{1, 2}, {3, 4}}));
}

TEST_CASE("van der Corput selection") {
    auto w = vdc_window(7, 3, 1);
    CHECK(w == std::vector<ZnVec>{{0}, {1}, {2}, {5}, {6}});
    CHECK(vdc_window(7, 2, 2).size() == 9);
    auto R = ring("zmod:7");
    auto f = FunctionOnRing::random_bounded(R, 4);
    std::vector<cplx> g(49);
    for (Elem y = 0; y < 7; ++y)
        for (Elem x = 0; x < 7; ++x) g[x + 7 * y] = f((x + y * y) % 7);
    auto r = vdc_select_h(*R, g, 3, {{0}}, 1);
    CHECK(r.h != ZnVec{0});
    CHECK(r.lhs <= r.rhs + 1e-12);
    // argmax over the allowed set, computed independently
    double best = -1;
    ZnVec arg;
    for (auto& h : w) {
        if (h == ZnVec{0}) continue;
        cplx s = 0;
        for (Elem x = 0; x < 7; ++x)
            for (Elem y = 0; y < 7; ++y) s += g[x + 7 * ((y + h[0]) % 7)] * std::conj(g[x + 7 * y]);
        double G = std::abs(s) / 49;
        if (G > best + 1e-12) {
            best = G;
            arg = h;
        }
    }
    CHECK(r.h == arg);
    CHECK(r.G == doctest::Approx(best).epsilon(1e-12));
    // g independent of y: G(h) = avg |g|^2 for every h
    std::vector<cplx> flat(49);
    for (Elem y = 0; y < 7; ++y)
        for (Elem x = 0; x < 7; ++x) flat[x + 7 * y] = f(x);
    double l2 = 0;
    for (auto v : f.values()) l2 += std::norm(v) / 7;
    for (auto& h : w) CHECK(vdc_G(*R, flat, h, 1) == doctest::Approx(l2).epsilon(1e-12));
    std::set<ZnVec> everything(w.begin(), w.end());
    CHECK_THROWS_AS(vdc_select_h(*R, g, 3, everything, 1), EmptyAllowedSet);
}
