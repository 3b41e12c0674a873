#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "polysz/budget.hpp"
#include "polysz/counting.hpp"
#include "polysz/errors.hpp"
#include "polysz/fourier.hpp"
#include "polysz/numtheory.hpp"
#include "polysz/sweep.hpp"
#include "support.hpp"

using namespace polysz;

namespace {

// bound formulas written out again from the statements, independently of sweep_bound
double square_bound(double p) { return 2.0 / std::pow(p, 0.25); }
double single_bound(double p, int d) { return 3.0 * std::pow((d - 1) / p, 1.0 / std::pow(2.0, d)); }

std::vector<std::string> csv_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("ring patterns") {
    auto a = expand_ring_pattern("primes:5..30");
    std::vector<std::string> names;
    for (auto& s : a) names.push_back(s.to_string());
    CHECK(names == std::vector<std::string>{"zmod:5", "zmod:7", "zmod:11", "zmod:13", "zmod:17", "zmod:19", "zmod:23",
                                            "zmod:29"});
    auto b = expand_ring_pattern("primes-after:3:12");
    REQUIRE(b.size() == 12);
    CHECK(b.front().to_string() == "zmod:5");
    CHECK(b.back().to_string() == "zmod:43");
    CHECK(expand_ring_pattern("pgr:4:x^2+x+1").size() == 1);
    CHECK_THROWS_AS(expand_ring_pattern("primes-after:3"), ParseError);
}

TEST_CASE("bound column matches the formulas") {
    for (std::uint64_t p : {5, 7, 11, 13, 29, 61}) {
        auto R = make_ring(RingSpec::modint(p));
        auto sq = sweep_bound(*R, {IntPoly::parse("y^2")});
        CHECK(sq.bound == doctest::Approx(square_bound(p)).epsilon(1e-12));
        CHECK(sq.bound_applies);
        for (int d = 2; d <= 3; ++d) {
            auto P = IntPoly::parse(d == 2 ? "y^2+y" : "y^3+2y");
            auto b = sweep_bound(*R, {P});
            CHECK(b.bound == doctest::Approx(single_bound(p, d)).epsilon(1e-12));
            CHECK(b.bound_applies);
        }
    }
    auto Z2 = make_ring(RingSpec::modint(2));
    CHECK_FALSE(sweep_bound(*Z2, {IntPoly::parse("y^2")}).bound_applies);
    auto Z3 = make_ring(RingSpec::modint(3));
    CHECK_FALSE(sweep_bound(*Z3, {IntPoly::parse("y^3+y")}).bound_applies);  // lpf = d
    CHECK_FALSE(sweep_bound(*Z3, {IntPoly::parse("3y")}).bound_applies);
    auto Z7 = make_ring(RingSpec::modint(7));
    CHECK_FALSE(sweep_bound(*Z7, {IntPoly::parse("7y^2")}).bound_applies);
    CHECK_FALSE(sweep_bound(*Z7, IntPoly::parse_family("y, y^2")).bound_applies);
}

TEST_CASE("rows recomputed from the derived seeds") {
    SweepConfig cfg;
    cfg.rings = {"zmod:7", "zmod:11"};
    cfg.family = {IntPoly::parse("y^2")};
    cfg.trials = 3;
    cfg.seed = 42;
    auto res = sweep(cfg);
    REQUIRE(res.rows.size() == 6);
    REQUIRE(res.summary.size() == 2);
    for (std::size_t r = 0; r < 2; ++r) {
        std::uint64_t p = r == 0 ? 7 : 11;
        auto R = make_ring(RingSpec::modint(p));
        double mx = 0;
        for (unsigned t = 0; t < 3; ++t) {
            auto f0 = FunctionOnRing::random_bounded(R, derive_seed(42, r, t, 0)).values();
            auto f1 = FunctionOnRing::random_bounded(R, derive_seed(42, r, t, 1)).values();
            auto lam = oracle::lambda_zn({{0, 0, 1}}, {f0, f1}, p);
            cplx m0 = 0, m1 = 0;
            for (std::uint64_t x = 0; x < p; ++x) m0 += f0[x], m1 += f1[x];
            double disc = std::abs(lam - m0 * m1 / double(p * p));
            const auto& row = res.rows[r * 3 + t];
            CHECK(row.ring == "zmod:" + std::to_string(p));
            CHECK(row.trial == t);
            CHECK(row.N == p);
            CHECK(row.size == p);
            CHECK(row.discrepancy == doctest::Approx(disc).epsilon(1e-9));
            CHECK(row.discrepancy <= square_bound(p) + 1e-8);
            mx = std::max(mx, disc);
        }
        CHECK(res.summary[r].discrepancy == doctest::Approx(mx).epsilon(1e-9));
    }
}

TEST_CASE("identical config and seed give identical CSV") {
    SweepConfig cfg;
    cfg.rings = {"primes:5..23", "prod:(zmod:3,zmod:5)"};
    cfg.family = IntPoly::parse_family("y, y^2");
    cfg.trials = 4;
    cfg.seed = 9;
    cfg.functions = SweepConfig::Functions::Indicator;
    auto a = sweep(cfg).to_csv();
    auto b = sweep(cfg).to_csv();
    CHECK(a == b);
    cfg.seed = 10;
    CHECK(sweep(cfg).to_csv() != a);
    auto lines = csv_lines(a);
    CHECK(lines.front() == "ring,N,lpf,size,trial,discrepancy,bound,bound_applies,error");
    // 8 rings x 4 trials, then one summary row per ring
    CHECK(lines.size() == 1 + 32 + 8);
}

TEST_CASE("indicator trials have the requested size") {
    SweepConfig cfg;
    cfg.rings = {"zmod:13"};
    cfg.family = {IntPoly::parse("y")};
    cfg.trials = 2;
    cfg.functions = SweepConfig::Functions::Indicator;
    cfg.density = 0.5;
    auto res = sweep(cfg);
    // for P = {y}, lambda is the product of the densities, so the discrepancy vanishes
    for (auto& row : res.rows) CHECK(row.discrepancy < 1e-12);
    cfg.density = 1.5;
    CHECK_THROWS_AS(sweep(cfg), SpecViolation);
}

TEST_CASE("errors and degenerate rows") {
    SweepConfig cfg;
    cfg.family = {IntPoly::parse("y^2")};
    cfg.rings = {"zmod:5"};
    cfg.trials = 0;
    CHECK_THROWS_AS(sweep(cfg), SpecViolation);
    cfg.trials = 1;
    cfg.rings.clear();
    CHECK_THROWS_AS(sweep(cfg), SpecViolation);

    cfg.rings = {"zmod:5", "zmod:100003"};
    {
        BudgetScope scope(1000000);
        auto res = sweep(cfg);
        REQUIRE(res.rows.size() == 2);
        CHECK(res.rows[0].error.empty());
        CHECK_FALSE(res.rows[1].error.empty());
        CHECK(res.summary[1].error == res.rows[1].error);
    }

    cfg.rings = {"zmod:3", "zmod:9", "gf:9"};
    cfg.family = {IntPoly::parse("3y")};
    auto res = sweep(cfg);
    for (auto& row : res.rows) {
        CHECK(row.error.empty());
        CHECK_FALSE(row.bound.bound_applies);
    }
    // the degenerate regime reaches discrepancy 1
    auto Z3 = make_ring(RingSpec::modint(3));
    auto chi = FunctionOnRing::character(Z3, 1);
    LambdaQuery q{Z3, {IntPoly::parse("3y")}, {chi, chi.conj()}, {}, {}};
    CHECK(main_discrepancy(q) == doctest::Approx(1.0));
}
