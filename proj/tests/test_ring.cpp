#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "polysz/budget.hpp"
#include "polysz/errors.hpp"
#include "polysz/numtheory.hpp"
#include "polysz/parallel.hpp"
#include "polysz/ring.hpp"

using namespace polysz;

namespace {

std::vector<std::string> desk_specs() {
    return {"zmod:2",  "zmod:6",  "zmod:15", "zmod:12", "gf:4",      "gf:8",         "gf:9",
            "gf:25",   "gf:27",   "pgr:6:x^2-2", "prod:(zmod:3,zmod:9)", "nilp:3:2", "nilp:2:3",
            "prod:(zmod:2,gf:4)"};
}

// brute-force characteristic: least k with k*1 = 0
std::uint64_t char_oracle(const Ring& R) {
    Elem acc = R.one();
    for (std::uint64_t k = 1;; ++k) {
        if (acc == R.zero()) return k;
        acc = R.add(acc, R.one());
    }
}

}  // namespace

TEST_CASE("number theory helpers") {
    CHECK(is_prime(2));
    CHECK(is_prime(101));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(91));
    CHECK(lpf(91) == 7);
    CHECK(lpf(2 * 3 * 5) == 2);
    CHECK(prime_divisors(360) == std::vector<std::uint64_t>{2, 3, 5});
    CHECK(primes_between(5, 20) == std::vector<std::uint64_t>{5, 7, 11, 13, 17, 19});
    CHECK(largest_prime_factor(BigInt(15)) == 5);
    CHECK(largest_prime_factor(BigInt(-1)) == 1);
    CHECK(zn_height(5, 15) == 5);
    CHECK(zn_height(9, 15) == 6);
    CHECK(zn_height(BigInt(-6), 101) == 6);
    CHECK(symmetric_residue(14, 15) == -1);
    CHECK(symmetric_residue(3, 6) == 3);
    CHECK(binomial(10, 3) == 120);
    CHECK(powmod(3, 100, 101) == 1);
    for (std::uint64_t n = 2; n < 500; ++n) {
        std::uint64_t prod = 1;
        for (auto [p, e] : factorize(n)) {
            CHECK(is_prime(p));
            for (unsigned i = 0; i < e; ++i) prod *= p;
        }
        CHECK(prod == n);
    }
}

TEST_CASE("budget scope restores the cap") {
    auto before = Budget::enumeration();
    {
        BudgetScope s(10);
        CHECK(Budget::enumeration() == 10);
        CHECK_THROWS_AS(require_budget(11, "x"), BudgetExceeded);
        CHECK_NOTHROW(require_budget(10, "x"));
    }
    CHECK(Budget::enumeration() == before);
    CHECK(sat_pow(10, 30) == UINT64_MAX);
    CHECK(sat_mul(1ULL << 40, 1ULL << 40) == UINT64_MAX);
}

TEST_CASE("parallel reductions are order-stable") {
    auto body = [](std::uint64_t lo, std::uint64_t hi) {
        double s = 0;
        for (auto i = lo; i < hi; ++i) s += 1.0 / static_cast<double>(i + 1);
        return s;
    };
    double a = parallel_dsum(100000, body), b = parallel_dsum(100000, body);
    CHECK(a == b);
    double seq = 0;
    for (int i = 0; i < 100000; ++i) seq += 1.0 / (i + 1);
    CHECK(a == doctest::Approx(seq).epsilon(1e-12));
    CHECK(parallel_usum(10000, [](auto lo, auto hi) { return hi - lo; }) == 10000);
    std::vector<int> out(5000, 0);
    parallel_for(out.size(), [&](std::uint64_t i) { out[i] = static_cast<int>(i); });
    CHECK(std::accumulate(out.begin(), out.end(), 0LL) == 4999LL * 5000 / 2);
}

TEST_CASE("make_ring metadata") {
    auto z15 = make_ring(RingSpec::modint(15));
    CHECK(z15->size() == 15);
    CHECK(z15->characteristic() == 15);
    CHECK(z15->lpf() == 3);

    auto pgr = make_ring(RingSpec::parse("pgr:6:x^2-2"));
    CHECK(pgr->size() == 36);
    CHECK(pgr->characteristic() == 6);
    CHECK(pgr->lpf() == 2);
    CHECK(pgr->additive().invariant_factors == std::vector<std::uint64_t>{6, 6});

    auto nil = make_ring(RingSpec::nilpotent(3, 2));
    CHECK(nil->size() == 27);
    CHECK(nil->characteristic() == 3);
    CHECK(nil->additive().invariant_factors == std::vector<std::uint64_t>{3, 3, 3});

    auto prod = make_ring(RingSpec::parse("prod:(zmod:3,zmod:9)"));
    CHECK(prod->size() == 27);
    CHECK(prod->characteristic() == 9);
    CHECK(prod->lpf() == 3);
    CHECK(prod->additive().invariant_factors == std::vector<std::uint64_t>{3, 9});

    auto f8 = make_ring(RingSpec::galois_field(8));
    CHECK(f8->size() == 8);
    CHECK(f8->characteristic() == 2);
}

TEST_CASE("spec strings round trip") {
    for (auto& s : desk_specs()) {
        auto spec = RingSpec::parse(s);
        auto again = RingSpec::parse(spec.to_string());
        CHECK(make_ring(again)->size() == make_ring(spec)->size());
    }
    CHECK_THROWS_AS(RingSpec::parse("zmod"), ParseError);
    CHECK_THROWS_AS(RingSpec::parse("foo:3"), ParseError);
    CHECK_THROWS_AS(RingSpec::parse("prod:(zmod:3,zmod:9"), ParseError);
    CHECK_THROWS_AS(make_ring(RingSpec::nilpotent(4, 1)), SpecViolation);
}

TEST_CASE("ring axioms hold exhaustively on small rings") {
    for (auto& s : desk_specs()) {
        auto R = make_ring(RingSpec::parse(s));
        if (R->size() > 36) continue;
        CAPTURE(s);
        CHECK(char_oracle(*R) == R->characteristic());
        bool ok = true;
        for (Elem a = 0; a < R->size() && ok; ++a) {
            ok = ok && R->add(a, R->neg(a)) == R->zero() && R->mul(a, R->one()) == a;
            for (Elem b = 0; b < R->size() && ok; ++b) {
                ok = ok && R->add(a, b) == R->add(b, a) && R->mul(a, b) == R->mul(b, a);
                for (Elem c = 0; c < R->size() && ok; ++c) {
                    ok = ok && R->mul(R->mul(a, b), c) == R->mul(a, R->mul(b, c));
                    ok = ok && R->mul(a, R->add(b, c)) == R->add(R->mul(a, b), R->mul(a, c));
                    ok = ok && R->add(R->add(a, b), c) == R->add(a, R->add(b, c));
                }
            }
        }
        CHECK(ok);
        // lpf is the least additive order of a nonzero element
        std::uint64_t least = UINT64_MAX;
        for (Elem a = 1; a < R->size(); ++a) least = std::min(least, R->additive_order(a));
        CHECK(least == R->lpf());
    }
}

TEST_CASE("ModInt matches integer arithmetic") {
    for (std::uint64_t N : {2u, 7u, 15u, 60u}) {
        auto R = make_ring(RingSpec::modint(N));
        for (Elem a = 0; a < N; ++a)
            for (Elem b = 0; b < N; ++b) {
                CHECK(R->add(a, b) == (a + b) % N);
                CHECK(R->mul(a, b) == (a * b) % N);
            }
    }
}

TEST_CASE("quotient arithmetic: x^2 = 2 in PGR(6, x^2-2)") {
    auto R = make_ring(RingSpec::parse("pgr:6:x^2-2"));
    Elem x = R->from_digits({0, 1});
    CHECK(R->mul(x, x) == R->embed(2));
    // (a + bx)(c + dx) = (ac + 2bd) + (ad + bc)x
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        std::uint64_t a = rng() % 6, b = rng() % 6, c = rng() % 6, d = rng() % 6;
        Elem p = R->mul(R->from_digits({a, b}), R->from_digits({c, d}));
        CHECK(R->digits(p) == std::vector<std::uint64_t>{(a * c + 2 * b * d) % 6, (a * d + b * c) % 6});
    }
    // x * x = 2 * 1 in the additive basis (x, 1)
    auto& A = R->additive();
    CHECK(A.generators.back() == R->one());
}

TEST_CASE("nilpotent extension products vanish") {
    auto R = make_ring(RingSpec::nilpotent(3, 2));
    Elem x1 = R->from_digits({0, 1, 0}), x2 = R->from_digits({0, 0, 1});
    CHECK(R->mul(x1, x1) == 0);
    CHECK(R->mul(x1, x2) == 0);
    CHECK(R->mul(x2, x2) == 0);
    Elem u = R->from_digits({1, 1, 0});
    CHECK(R->is_unit(u));
    CHECK(R->mul(u, R->from_digits({1, 2, 0})) == R->one());  // inverse 1 - x1
    CHECK_FALSE(R->is_unit(x1));
    // every y^2 of an element with zero constant term is 0
    for (Elem a = 0; a < R->size(); ++a)
        if (R->digits(a)[0] == 0) CHECK(R->mul(a, a) == 0);
}

TEST_CASE("embed and units") {
    auto z6 = make_ring(RingSpec::modint(6));
    CHECK(z6->embed(7) == z6->one());
    CHECK(z6->embed(-1) == 5);
    CHECK(z6->is_unit(z6->embed(5)));
    CHECK_FALSE(z6->is_unit(z6->embed(3)));
    auto pgr = make_ring(RingSpec::parse("pgr:6:x^2-2"));
    CHECK(pgr->embed(6) == pgr->zero());
    auto prod = make_ring(RingSpec::parse("prod:(zmod:3,zmod:9)"));
    Elem three = prod->embed(3);
    CHECK(prod->component_value(three, 0) == 0);
    CHECK(prod->component_value(three, 1) == 3);
}

TEST_CASE("embed is a ring homomorphism from Z") {
    std::mt19937_64 rng(11);
    for (auto& s : desk_specs()) {
        auto R = make_ring(RingSpec::parse(s));
        for (int t = 0; t < 100; ++t) {
            std::int64_t a = static_cast<std::int64_t>(rng() % 2001) - 1000;
            std::int64_t b = static_cast<std::int64_t>(rng() % 2001) - 1000;
            CHECK(R->embed(a + b) == R->add(R->embed(a), R->embed(b)));
            CHECK(R->embed(a * b) == R->mul(R->embed(a), R->embed(b)));
        }
    }
}

TEST_CASE("additive coordinates are a group isomorphism") {
    for (auto& s : desk_specs()) {
        auto R = make_ring(RingSpec::parse(s));
        auto& A = R->additive();
        std::uint64_t prod = 1;
        for (std::size_t i = 0; i < A.rank(); ++i) {
            prod *= A.invariant_factors[i];
            if (i + 1 < A.rank()) CHECK(A.invariant_factors[i + 1] % A.invariant_factors[i] == 0);
        }
        CHECK(prod == R->size());
        CHECK(A.invariant_factors.back() == R->characteristic());
        for (Elem a = 0; a < R->size(); ++a) {
            CHECK(R->from_coords(R->coords(a)) == a);
            Elem b = static_cast<Elem>((a * 7 + 3) % R->size());
            auto ca = R->coords(a), cb = R->coords(b), cs = R->coords(R->add(a, b));
            for (std::size_t i = 0; i < A.rank(); ++i)
                CHECK(cs[i] == (ca[i] + cb[i]) % A.invariant_factors[i]);
        }
        // structure constants reproduce products of generators
        for (std::size_t i = 0; i < A.rank(); ++i)
            for (std::size_t j = 0; j < A.rank(); ++j) {
                Elem acc = R->zero();
                for (std::size_t k = 0; k < A.rank(); ++k)
                    acc = R->add(acc, R->scale(A.structure_constants[i][j][k], A.generators[k]));
                CHECK(acc == R->mul(A.generators[i], A.generators[j]));
            }
    }
}

TEST_CASE("characters are homomorphisms with the right count") {
    for (auto& s : desk_specs()) {
        auto R = make_ring(RingSpec::parse(s));
        CHECK(R->num_characters() == R->size());
        for (std::uint64_t c = 0; c < R->num_characters(); ++c) {
            CHECK(R->character_index(R->character_coords(c)) == c);
            for (Elem a = 0; a < R->size(); a += 3)
                for (Elem b = 0; b < R->size(); b += 5) {
                    auto lhs = R->character_value(c, R->add(a, b));
                    auto rhs = R->character_value(c, a) * R->character_value(c, b);
                    CHECK(std::abs(lhs - rhs) < 1e-9);
                }
            auto cc = R->conjugate_character(c);
            for (Elem a = 0; a < R->size(); ++a)
                CHECK(std::abs(R->character_value(cc, a) - std::conj(R->character_value(c, a))) < 1e-9);
        }
    }
}
