#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polysz/counting.hpp"
#include "polysz/fourier.hpp"
#include "polysz/poly.hpp"

namespace polysz {

// ---- weight pairs ---------------------------------------------------------

struct WeightPair {
    std::uint64_t m = 1;
    std::vector<std::uint64_t> seq;  // seq[i] is a_{i+1}; trailing zeros trimmed

    WeightPair() = default;
    WeightPair(std::uint64_t m_, std::vector<std::uint64_t> s);

    std::uint64_t a(std::size_t i) const { return i >= 1 && i <= seq.size() ? seq[i - 1] : 0; }  // 1-based
    std::uint64_t total() const;
    bool valid() const;  // m >= 1 and sum <= m
    std::string to_string() const;

    friend bool operator==(const WeightPair&, const WeightPair&) = default;
    friend auto operator<=>(const WeightPair&, const WeightPair&) = default;
};

enum class PairClass { Deg0, Deg1, General };
const char* to_string(PairClass c);

PairClass classify(const WeightPair& p, unsigned n);
bool is_lonely(const WeightPair& p, unsigned n);

bool is_permissible(const WeightPair& from, const WeightPair& to, unsigned n);
// Throws Deg0Input on a degree-0 pair.
std::vector<WeightPair> permissible_successors(const WeightPair& p, unsigned n);

struct TBound {
    BigInt value;            // exact unless saturated
    bool saturated = false;  // true when the value exceeds 2^kSaturationBits
    static constexpr unsigned kSaturationBits = 4096;
    std::string to_string() const;
    bool at_least(const BigInt& x) const { return saturated || value >= x; }
};
TBound t_bound(std::uint64_t m, unsigned d);

// Longest chain of permissible operations from p to a degree-1 pair, over the
// subgraph of pairs whose m stays <= cap. Throws SearchBudgetExceeded when the
// explored state count passes max_states.
std::uint64_t max_path_length(const WeightPair& p, unsigned n, std::uint64_t cap,
                              std::uint64_t max_states = 2'000'000);

// ---- differencing selection ----------------------------------------------

enum class SelectionPolicy { LowestIndex, Strict };

struct MemberInfo {
    int degree = 0;
    std::uint64_t weight = 0;
    std::string lc;  // leading coefficient, compared for equality only
};

struct Selection {
    std::vector<std::size_t> order;  // order[new] = old index; order[0] is the differencing member
    std::size_t ell = 1;             // number of degree-one members + 1
};

// The last member must have maximal weight. `forced` picks the differencing
// member by its current index, bypassing the policy (it must still be eligible).
Selection select_differencing(const std::vector<MemberInfo>& members, SelectionPolicy policy,
                              std::optional<std::size_t> forced = std::nullopt);

// ---- numeric inductive step ----------------------------------------------

struct GSource {
    enum Kind { Delta, Conj, Plain } kind = Plain;
    std::size_t f = 0;       // index into the input functions f_0..f_m
    std::uint64_t a = 0;     // Delta shift as a residue mod N
};

struct FamilyStep {
    std::vector<IntPoly> reindexed;  // input after reordering, mod N
    Selection sel;
    std::vector<IntPoly> Q;          // output family, mod N
    std::vector<GSource> g;          // g_0..g_{m'}
    char branch = 'a';
    std::optional<std::size_t> i_prime;  // 1-based, branch (e) only
};

// Family part of the inductive step for a given shift h (no functions involved).
FamilyStep difference_family(const std::vector<IntPoly>& P, std::uint64_t N, const ZnVec& h,
                             SelectionPolicy policy = SelectionPolicy::LowestIndex,
                             std::optional<std::size_t> forced_pivot = std::nullopt);

// Shifts h in the window for which {P_1..P_m, P_ell(y+h)..P_m(y+h)} is not essentially
// distinct. P must already be reindexed.
std::set<ZnVec> exclusion_set(const std::vector<IntPoly>& P, std::size_t ell, std::uint64_t N,
                              std::uint64_t H, EqMethod method = EqMethod::Coefficient);

struct PetChecks {
    bool permissible = false;
    bool distinct = false;
    bool height = false;
    bool traceable = false;
    bool inequality = false;
    bool shape = false;  // max degree <= k and the last member has maximal weight
    bool all() const { return permissible && distinct && height && traceable && inequality && shape; }
};

struct PetOptions {
    SelectionPolicy policy = SelectionPolicy::LowestIndex;
    std::optional<ZnVec> forced_h;
    std::optional<std::size_t> forced_pivot;
    std::vector<std::string> labels;  // names of f_0..f_m; default "f0".."fm"
};

struct PetStepResult {
    unsigned m_prime = 0;
    std::vector<IntPoly> new_family;
    std::vector<std::string> new_function_labels;
    std::vector<FunctionOnRing> g;
    ZnVec selected_h;
    char branch = 'a';
    double lhs = 0;       // |Lambda_P(F)|
    double rhs = 0;       // 2^{n/2}[2^{n/2} m / H^{1/2} + |Lambda_Q(g)|^{1/2}]
    double lambda_Q = 0;  // |Lambda_Q(g)|
    double vdc_G = 0;
    std::uint64_t excluded_size = 0;
    std::uint64_t M = 0, H = 0;
    unsigned k = 0;
    std::uint64_t new_height = 0;
    BigInt height_bound;
    WeightPair before, after;
    FamilyStep detail;
    PetChecks checks;
};

// Throws HypothesisViolation naming the failed precondition.
PetStepResult pet_step(const RingPtr& ring, const std::vector<IntPoly>& family,
                       const std::vector<FunctionOnRing>& F, std::uint64_t H, const PetOptions& opt = {});
// Same step with a prescribed shift (it must avoid the exclusion set).
PetStepResult pet_transform(const RingPtr& ring, const std::vector<IntPoly>& family,
                            const std::vector<FunctionOnRing>& F, std::uint64_t H, const ZnVec& h,
                            PetOptions opt = {});

// ---- matrix regularization ------------------------------------------------

using BigMatrix = std::vector<std::vector<BigInt>>;

struct RowOp {
    std::size_t target = 0, source = 0;
    BigInt C;  // row[target] += C * row[source]
};

struct RegularizeResult {
    BigMatrix B;
    std::vector<RowOp> ops;
    BigInt height;        // Z_N-height of B
    BigInt height_bound;  // (8 M0)^{2^{n m^2}}
};

BigInt big_height(const BigInt& x, const BigInt& N);
BigInt matrix_height(const BigMatrix& A, const BigInt& N);
bool is_row_regular(const BigMatrix& A, const BigInt& N);  // each row: entries nonzero and pairwise distinct
BigMatrix replay_row_ops(BigMatrix A, const std::vector<RowOp>& ops, const BigInt& N);
RegularizeResult matrix_regularize(const BigMatrix& A, const BigInt& N, const BigInt& M0);

// ---- Us-control trace -----------------------------------------------------

struct UsTrace {
    std::size_t target = 0;
    bool linear_path = false;
    std::vector<IntPoly> start_family;           // family after the rearrangement for the target
    std::vector<std::string> start_labels;
    std::vector<PetStepResult> steps;
    std::vector<std::uint64_t> H;
    std::vector<IntPoly> linear_family;
    BigMatrix A, B;
    std::vector<RowOp> ops;
    std::vector<std::vector<std::int64_t>> ud_coeffs;
    double ud_lhs = 0, ud_rhs = 0;
    unsigned m_D = 0;
    double lambda_abs = 0;
    double final_bound = 0;
    double u1_bound = 0;  // linear path
    BigInt gauss_jordan_max;  // largest |p|, |q| among the scale factors (linear path)
    bool certified = false;   // every intermediate inequality held
    std::vector<std::string> notes;
};

// Default step sizes H_i = 2^{2i-2} * ceil(lpf^{1/4}).
std::uint64_t default_H(std::uint64_t lpf, unsigned i);

UsTrace us_control_trace(const RingPtr& ring, const std::vector<IntPoly>& family,
                         const std::vector<FunctionOnRing>& F, std::size_t target,
                         const std::vector<std::uint64_t>& H_overrides = {});

}  // namespace polysz
