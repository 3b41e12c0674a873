#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polysz/numtheory.hpp"

namespace polysz {

constexpr unsigned kMaxVars = 9;
using Exps = std::array<std::uint8_t, kMaxVars>;

unsigned total_degree(const Exps& a);

// Strict "heavier than" in the graded order: total degree first, then the first
// differing coordinate decides. The zero vector is the lightest element.
struct Heavier {
    bool operator()(const Exps& a, const Exps& b) const;
};

// π(α): 1 + number of nonzero exponent vectors strictly lighter than α.
std::uint64_t weight_order_rank(const Exps& alpha, unsigned n_vars);
std::uint64_t weight_order_rank(const std::vector<unsigned>& alpha);  // n_vars = alpha.size()

// Sparse multivariate polynomial with exact integer coefficients.
class IntPoly {
public:
    using TermMap = std::map<Exps, BigInt, Heavier>;

    IntPoly() : IntPoly(1) {}
    explicit IntPoly(unsigned n_vars);

    static IntPoly constant(unsigned n_vars, const BigInt& c);
    static IntPoly variable(unsigned n_vars, unsigned index, const BigInt& c = 1);
    static IntPoly monomial(unsigned n_vars, const Exps& e, const BigInt& c);
    // Univariate from ascending coefficient list.
    static IntPoly from_coeffs(const std::vector<std::int64_t>& asc);

    // Grammar: terms joined by + or -; a term is a product of an integer and
    // factors y1..y9 (y and x alias y1), each with optional ^exp; '*' optional.
    static IntPoly parse(const std::string& text, unsigned n_vars = 0);
    static std::vector<IntPoly> parse_family(const std::string& text, unsigned n_vars = 0);

    unsigned n_vars() const { return n_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;  // -1 for the zero polynomial
    BigInt coeff(const Exps& e) const;
    BigInt constant_term() const;
    IntPoly without_constant() const;
    IntPoly with_n_vars(unsigned n) const;

    void add_term(const Exps& e, const BigInt& c);

    IntPoly operator-() const;
    IntPoly& operator+=(const IntPoly& o);
    IntPoly& operator-=(const IntPoly& o);
    friend IntPoly operator+(IntPoly a, const IntPoly& b) { return a += b; }
    friend IntPoly operator-(IntPoly a, const IntPoly& b) { return a -= b; }
    friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
    friend IntPoly operator*(const BigInt& c, const IntPoly& a);
    bool operator==(const IntPoly& o) const { return n_ == o.n_ && terms_ == o.terms_; }
    bool operator!=(const IntPoly& o) const { return !(*this == o); }

    IntPoly reduce_mod(std::uint64_t N) const;        // coefficients in [0, N)
    IntPoly reduce_symmetric(std::uint64_t N) const;  // coefficients in (-N/2, N/2]
    IntPoly shift(const std::vector<BigInt>& h) const;  // P(y + h)

    BigInt eval(const std::vector<BigInt>& y) const;
    std::uint64_t eval_mod(const std::vector<std::uint64_t>& y, std::uint64_t N) const;

    std::string to_string() const;

private:
    unsigned n_;
    TermMap terms_;
};

std::string family_to_string(const std::vector<IntPoly>& fam);

// Weight and leading coefficient over Z (nonconstant P).
std::uint64_t weight(const IntPoly& p);
BigInt leading_coeff(const IntPoly& p);

struct ZnProfile {
    std::uint64_t N = 0;
    int deg_zn = -1;
    std::uint64_t height = 0;
    std::optional<std::uint64_t> weight;
    std::optional<std::uint64_t> leading_coeff;
};

ZnProfile zn_profile(const IntPoly& p, std::uint64_t N);

// Entry r-1 counts distinct leading coefficients among weight-r members.
std::vector<std::uint64_t> weight_sequence(const std::vector<IntPoly>& family,
                                           std::optional<std::uint64_t> N = std::nullopt);

struct IndependenceResult {
    bool independent = false;
    std::optional<BigInt> C1;       // largest prime of the chosen minor, 1 if the minor is a unit
    BigInt minor = 0;
    std::vector<Exps> minor_rows;   // monomials of the chosen rows
};
IndependenceResult independence_check(const std::vector<IntPoly>& family);

// Least l with N | l!.
unsigned singmaster_ell(std::uint64_t N);
IntPoly singmaster_canonical(const IntPoly& p, std::uint64_t N);

enum class EqMethod { Auto, Coefficient, BruteForce };

bool function_equal_mod(const IntPoly& p, const IntPoly& q, std::uint64_t N,
                        EqMethod method = EqMethod::Auto);
bool induces_constant(const IntPoly& p, std::uint64_t N, EqMethod method = EqMethod::Auto);

struct DistinctnessResult {
    bool ok = true;
    // first violation in index order: (i, i) for a constant member, (i, j) with i < j for a pair
    std::optional<std::pair<std::size_t, std::size_t>> witness;
};
DistinctnessResult essentially_distinct(const std::vector<IntPoly>& family, std::uint64_t N,
                                        EqMethod method = EqMethod::Auto);

IntPoly shift_difference(const IntPoly& p, const IntPoly& q, const std::vector<BigInt>& h);

struct IntersectiveResult {
    bool ok = true;
    std::optional<std::uint64_t> first_failure;
};
IntersectiveResult jointly_intersective_up_to(const std::vector<IntPoly>& family,
                                              std::uint64_t k_max);

struct HeightArithmetic {
    std::uint64_t sum_height = 0, prod_height = 0;
    std::uint64_t sum_bound = 0, prod_bound = 0;
};
HeightArithmetic height_arithmetic_bounds(const BigInt& a, const BigInt& b, std::uint64_t N);

std::uint64_t family_height(const std::vector<IntPoly>& fam, std::uint64_t N);

}  // namespace polysz
