#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "polysz/poly.hpp"

namespace polysz {

struct RingSpec {
    enum class Kind { ModInt, Quotient, Product, NilpotentExt };

    Kind kind = Kind::ModInt;
    std::uint64_t N = 2;  // modulus for ModInt/Quotient, the prime p for NilpotentExt
    IntPoly f{1};         // Quotient only
    unsigned k = 0;       // NilpotentExt only
    std::vector<RingSpec> parts;

    static RingSpec modint(std::uint64_t N);
    static RingSpec quotient(std::uint64_t N, const IntPoly& f);
    static RingSpec product(std::vector<RingSpec> parts);
    static RingSpec nilpotent(std::uint64_t p, unsigned k);
    // F_q: Z_p, or Z_p[x]/(g) with g the first monic irreducible of degree r in
    // ascending coefficient order.
    static RingSpec galois_field(std::uint64_t q);

    // zmod:N | pgr:N:<poly in x> | prod:(spec,spec,...) | nilp:p:k | gf:q
    static RingSpec parse(const std::string& text);
    std::string to_string() const;
};

// Smallest monic irreducible polynomial of degree r over F_p (ascending coefficient order).
IntPoly first_monic_irreducible(std::uint64_t p, unsigned r);
bool irreducible_mod_prime(const IntPoly& f, std::uint64_t p);

using Elem = std::uint32_t;

class Ring;

struct AdditiveStructure {
    std::vector<std::uint64_t> invariant_factors;  // b_1 | ... | b_r = N
    std::vector<Elem> generators;                  // g_r = 1
    // structure_constants[i][j][k] = c_k^{(i,j)}
    std::vector<std::vector<std::vector<std::uint64_t>>> structure_constants;

    std::size_t rank() const { return invariant_factors.size(); }
};

class Ring {
public:
    static constexpr std::uint64_t kMaxSize = 1'000'000;
    static constexpr std::uint64_t kTableSize = 1024;

    explicit Ring(const RingSpec& spec);

    const RingSpec& spec() const { return spec_; }
    std::uint64_t size() const { return size_; }
    std::uint64_t characteristic() const { return char_; }
    std::uint64_t lpf() const { return lpf_; }

    Elem zero() const { return 0; }
    Elem one() const { return one_; }
    Elem add(Elem a, Elem b) const;
    Elem neg(Elem a) const;
    Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
    Elem mul(Elem a, Elem b) const;
    Elem scale(std::uint64_t k, Elem a) const;  // k·a as repeated addition, k reduced mod N
    Elem embed(std::int64_t a) const;
    Elem embed(const BigInt& a) const;

    bool is_unit(Elem x) const;
    std::uint64_t additive_order(Elem x) const;
    std::string element_to_string(Elem x) const;

    // Digit decomposition: each flat component contributes one or more Z_M digits.
    std::vector<std::uint64_t> digits(Elem x) const;
    Elem from_digits(const std::vector<std::uint64_t>& d) const;
    const std::vector<std::uint64_t>& digit_radix() const { return radix_; }

    // Flat components (ModInt, Quotient, NilpotentExt) in product order.
    const std::vector<RingSpec>& components() const { return comps_; }
    Elem component_value(Elem x, std::size_t c) const;  // index within component c

    // Additive structure, coordinates and characters
    const AdditiveStructure& additive() const { return add_; }
    std::vector<std::uint64_t> coords(Elem x) const;
    Elem from_coords(const std::vector<std::uint64_t>& a) const;

    // Characters are indexed by a in prod Z_{b_i}, mixed radix with a_1 least significant.
    std::uint64_t num_characters() const { return size_; }
    std::vector<std::uint64_t> character_coords(std::uint64_t idx) const;
    std::uint64_t character_index(const std::vector<std::uint64_t>& a) const;
    std::uint64_t conjugate_character(std::uint64_t idx) const;
    // Per-coordinate weights w_i = (N/b_i)·a_i mod N so that phase(x) = sum_i w_i x_i mod N.
    std::vector<std::uint64_t> character_weights(std::uint64_t idx) const;
    std::uint64_t character_phase(const std::vector<std::uint64_t>& weights, Elem x) const;
    std::uint64_t character_phase(std::uint64_t idx, Elem x) const;
    std::complex<double> character_value(std::uint64_t idx, Elem x) const;
    // Full table of phases for one character over all elements.
    std::vector<std::uint32_t> character_phase_table(std::uint64_t idx) const;
    // e_N(t) for t in Z_N.
    const std::vector<std::complex<double>>& roots() const { return roots_; }

    // Polynomial evaluation at y in R^n.
    Elem eval(const IntPoly& p, const std::vector<Elem>& y) const;
    // Values of p on R^n with y_1 as the least significant position.
    std::vector<Elem> value_table(const IntPoly& p) const;
    std::uint64_t tuple_count(unsigned n) const;  // |R|^n, throws BudgetExceeded past the cap

private:
    Elem mul_slow(Elem a, Elem b) const;
    Elem add_slow(Elem a, Elem b) const;
    void build_additive();

    RingSpec spec_;
    std::vector<RingSpec> comps_;
    std::vector<std::size_t> comp_first_digit_;
    std::vector<std::uint64_t> radix_;
    std::vector<std::uint64_t> stride_;
    std::uint64_t size_ = 0, char_ = 0, lpf_ = 0;
    Elem one_ = 0;
    bool cyclic_ = false;  // single ModInt component
    std::vector<Elem> add_tab_, mul_tab_, neg_tab_;
    AdditiveStructure add_;
    std::vector<std::uint32_t> coord_flat_;  // size * rank
    std::vector<std::uint64_t> char_scale_;  // N / b_i
    std::vector<std::complex<double>> roots_;
};

using RingPtr = std::shared_ptr<const Ring>;
RingPtr make_ring(const RingSpec& spec);

}  // namespace polysz
