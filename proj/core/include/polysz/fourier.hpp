#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polysz/parallel.hpp"
#include "polysz/ring.hpp"

namespace polysz {

// Complex table indexed by ring elements.
class FunctionOnRing {
public:
    FunctionOnRing(RingPtr ring, std::vector<cplx> values);

    static FunctionOnRing constant(RingPtr ring, cplx c);
    static FunctionOnRing indicator(RingPtr ring, const std::vector<Elem>& set);
    static FunctionOnRing character(RingPtr ring, std::uint64_t idx);
    // Uniform on the closed unit disc, deterministic in `seed`.
    static FunctionOnRing random_bounded(RingPtr ring, std::uint64_t seed);

    const Ring& ring() const { return *ring_; }
    const RingPtr& ring_ptr() const { return ring_; }
    const std::vector<cplx>& values() const { return v_; }
    cplx operator()(Elem x) const { return v_[x]; }
    bool bounded_by_one() const { return bounded_; }

    FunctionOnRing conj() const;
    FunctionOnRing translate(Elem h) const;  // x -> f(x + h)
    FunctionOnRing operator*(const FunctionOnRing& o) const;
    cplx mean() const;

private:
    RingPtr ring_;
    std::vector<cplx> v_;
    bool bounded_ = false;
};

// Characters are listed by index; coordinates a in prod Z_{b_i}.
std::vector<std::vector<std::uint64_t>> characters(const Ring& ring);

std::vector<cplx> fourier_transform(const FunctionOnRing& f);
FunctionOnRing inverse_fourier(RingPtr ring, const std::vector<cplx>& fhat);

FunctionOnRing discrete_derivative(const FunctionOnRing& f, const std::vector<Elem>& h);

enum class GowersMethod { Auto, Direct, Recursive };

// Returns the 2^s-th power avg_{x,h} Delta_h f(x) (real part, clamped at 0).
double gowers_power(const FunctionOnRing& f, unsigned s, GowersMethod m = GowersMethod::Auto);
double gowers_norm(const FunctionOnRing& f, unsigned s, GowersMethod m = GowersMethod::Auto);
// sum |f^|^4 / |R|^4, the fourth power of the U^2 norm
double u2_power_fourier(const FunctionOnRing& f);

// Lambda query shared with the counting module: average over (x, y) in R x R^n of
// f0(x) prod f_i(x + P_i(y)) prod psi_j(Q_j(y)).
struct LambdaQuery {
    RingPtr ring;
    std::vector<IntPoly> P;
    std::vector<FunctionOnRing> F;  // m1 + 1 entries
    std::vector<IntPoly> Q;
    std::vector<std::uint64_t> Psi;  // character indices, one per Q_j

    unsigned n_vars() const;
    void validate() const;
};

// g(x) = avg_y prod_{i != k} f_i(x + P_i(y) - P_k(y)) prod psi_j(Q_j(y)), with P_0 = 0.
FunctionOnRing dual_function(const LambdaQuery& q, std::size_t k);

struct Pel51Result {
    double lhs = 0, rhs = 0;
};
// xi[i] has |R|^{n+1} entries indexed x + |R| * yindex.
Pel51Result pel51_check(RingPtr ring, const std::vector<std::vector<cplx>>& xi, unsigned n, unsigned s);

// The two phase functions on Z_6 of the non-invertible counterexample: f1 and f0 = 1/f1.
// f1 has period 3 with phases pi/4, -pi/4 and phi2 on the classes of 0, 1, 2. The
// default phi2 = 3pi/4 is the value the derivative table is computed from; AsPrinted
// uses phi2 = 3pi/8 from the definition as written.
enum class Z6Variant { TableConsistent, AsPrinted };
std::pair<FunctionOnRing, FunctionOnRing> z6_counterexample(Z6Variant v = Z6Variant::TableConsistent);

// csv:<path> (index,re,im) | indicator:<path> (one element index per line or comma list)
// | random:<seed> | const:<re>[,<im>] | z6-counterexample:f0 | z6-counterexample:f1
// | z6-counterexample:f0-printed | z6-counterexample:f1-printed
FunctionOnRing function_from_source(RingPtr ring, const std::string& src);

}  // namespace polysz
