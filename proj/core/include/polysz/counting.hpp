#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polysz/fourier.hpp"

namespace polysz {

cplx lambda(const LambdaQuery& q);
double main_discrepancy(const LambdaQuery& q);

struct BoundedValue {
    cplx value;
    double bound = 0;
    bool bound_applies = true;
    std::string note;  // why the bound does not apply, when it does not
};

// avg over (h_1..h_m) in R^m of chi(h_1 ... h_m); bound (m-1)/lpf N.
BoundedValue hadamard_char_sum(const Ring& ring, std::uint64_t chi, unsigned m);

// avg_y prod psi_j(Q_j(y)); bound ((d-1)/lpf N)^{2^{-d}}.
BoundedValue char_sum(const Ring& ring, const std::vector<IntPoly>& Q, const std::vector<std::uint64_t>& psi);

struct RootCount {
    std::uint64_t count = 0;
    double bound = 0;
    bool bound_applies = true;
    std::string note;
};
// Roots of P on R^n (n = P.n_vars()); bound |R|^{n-1} + c|R|^n / lpf^eps, eps = 2^{-d}, c = (d-1)^eps.
RootCount count_roots(const Ring& ring, const IntPoly& P);
// The bound only, with its applicability flag.
RootCount root_bound(const Ring& ring, const IntPoly& P);

struct LinearCount {
    std::uint64_t count = 0;
    std::uint64_t bound = 0;
};
LinearCount linear_solution_count(std::uint64_t N, std::int64_t B, std::int64_t C);

struct ConfigCount {
    std::uint64_t M = 0, M1 = 0, M2 = 0;
    double S = 0;  // M1 / |R|^{n+1}
};
ConfigCount count_configurations(const Ring& ring, const std::vector<IntPoly>& P,
                                 const std::vector<std::vector<Elem>>& A);

struct DegenerateBound {
    double bound = 0;
    bool bound_applies = true;
};
DegenerateBound degenerate_bound(const Ring& ring, const std::vector<IntPoly>& P, std::uint64_t A0_size);

struct Config {
    Elem x;
    std::vector<Elem> y;
};
// First witness in lexicographic order of (x, y_1, ..., y_n).
std::optional<Config> find_nontrivial_config(const Ring& ring, const std::vector<IntPoly>& P,
                                             const std::vector<std::vector<Elem>>& A);

struct InequalitySides {
    double lhs = 0, rhs = 0;
};
// coeffs: d vectors in Z_N^n; F: d + 1 functions. With enforce, throws
// InvertibilityViolation when some a^(i) or difference has a non-unit entry.
InequalitySides linear_ud_check(const Ring& ring, const std::vector<std::vector<std::int64_t>>& coeffs,
                                const std::vector<FunctionOnRing>& F, bool enforce = true);
// Whether all entries of each a^(i) and of a^(i) - a^(j) are units of the ring.
bool linear_ud_invertible(const Ring& ring, const std::vector<std::vector<std::int64_t>>& coeffs);

using ZnVec = std::vector<std::uint64_t>;

// Window ({0..H-1} u {N-H+1..N-1})^n in lexicographic order (as residues, deduplicated).
std::vector<ZnVec> vdc_window(std::uint64_t N, std::uint64_t H, unsigned n);

struct VdcResult {
    ZnVec h;
    double lhs = 0, rhs = 0, G = 0;
    std::uint64_t excluded_size = 0;
};
// g has |R|^{n+1} entries indexed x + |R| * yindex (y_1 least significant).
VdcResult vdc_select_h(const Ring& ring, const std::vector<cplx>& g, std::uint64_t H,
                       const std::set<ZnVec>& excluded, unsigned n);
// G(h) = |avg_{x,y} g(x, y + h) conj g(x, y)|
double vdc_G(const Ring& ring, const std::vector<cplx>& g, const ZnVec& h, unsigned n);

struct Construction {
    std::string name;
    RingPtr ring;
    std::vector<IntPoly> family;
    std::vector<std::vector<Elem>> sets;
};
Construction avoid_3y(unsigned m);                  // Z_3^m x Z_9, A = Z_3^m x {0,1,2}, {3y}
Construction avoid_y_y2p1(std::uint64_t p, unsigned k);  // Z_{p^k}, A = pZ, {y, y^2+1}
Construction loper(std::uint64_t p, unsigned k);    // nilpotent ring, A = {c_0 = 0}, {y^2}

}  // namespace polysz
