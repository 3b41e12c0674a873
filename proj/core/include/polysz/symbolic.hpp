#pragma once

#include <climits>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polysz/pet.hpp"
#include "polysz/poly.hpp"

namespace polysz {

// Parameter h_s with `var` primes (h1, h1', h1'', ...). Ids are step * 16 + var.
using ParamId = std::uint16_t;
inline ParamId param_id(unsigned step, unsigned var) { return static_cast<ParamId>(step * 16 + var); }
inline unsigned param_step(ParamId p) { return p / 16; }
inline unsigned param_var(ParamId p) { return p % 16; }
std::string param_name(ParamId p);

// Integer polynomial in the h-parameters.
class HPoly {
public:
    using Mono = std::vector<ParamId>;  // sorted multiset of parameters
    struct MonoOrder {
        bool operator()(const Mono& a, const Mono& b) const;  // printing order: heavier first
    };
    using TermMap = std::map<Mono, BigInt, MonoOrder>;

    HPoly() = default;
    HPoly(const BigInt& c);  // NOLINT: implicit integer constants
    static HPoly param(ParamId p);
    static HPoly parse(const std::string& text);

    const TermMap& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    BigInt constant_value() const;
    bool mentions(ParamId p) const;
    std::vector<ParamId> params() const;

    HPoly operator-() const;
    HPoly& operator+=(const HPoly& o);
    HPoly& operator-=(const HPoly& o);
    friend HPoly operator+(HPoly a, const HPoly& b) { return a += b; }
    friend HPoly operator-(HPoly a, const HPoly& b) { return a -= b; }
    friend HPoly operator*(const HPoly& a, const HPoly& b);
    bool operator==(const HPoly& o) const { return t_ == o.t_; }
    bool operator!=(const HPoly& o) const { return !(*this == o); }

    // values[p] is the residue chosen for parameter p
    std::uint64_t eval_mod(const std::map<ParamId, std::uint64_t>& values, std::uint64_t N) const;

    std::string to_string() const;

private:
    void add_term(const Mono& m, const BigInt& c);
    TermMap t_;
};

// Polynomial in y_1..y_n with HPoly coefficients.
class SymbolicPoly {
public:
    using TermMap = std::map<Exps, HPoly, Heavier>;

    SymbolicPoly() : SymbolicPoly(1) {}
    explicit SymbolicPoly(unsigned n_y) : n_(n_y) {}
    static SymbolicPoly from_int(const IntPoly& p);
    static SymbolicPoly parse(const std::string& text, unsigned n_y = 0);

    unsigned n_y() const { return n_; }
    const TermMap& terms() const { return t_; }
    void add_term(const Exps& e, const HPoly& c);
    bool is_zero() const { return t_.empty(); }
    int degree() const;
    std::uint64_t weight() const;
    const HPoly& leading_coeff() const;
    SymbolicPoly without_constant() const;
    SymbolicPoly shift(unsigned step) const;  // P(y + h_step)
    bool mentions(ParamId p) const;

    SymbolicPoly operator-() const;
    SymbolicPoly& operator+=(const SymbolicPoly& o);
    SymbolicPoly& operator-=(const SymbolicPoly& o);
    friend SymbolicPoly operator+(SymbolicPoly a, const SymbolicPoly& b) { return a += b; }
    friend SymbolicPoly operator-(SymbolicPoly a, const SymbolicPoly& b) { return a -= b; }
    bool operator==(const SymbolicPoly& o) const { return n_ == o.n_ && t_ == o.t_; }

    // Instantiates the parameters; coefficients reduced into [0, N).
    IntPoly eval_mod(const std::map<ParamId, std::uint64_t>& values, std::uint64_t N) const;

    std::string to_string() const;

    template <class F>
    SymbolicPoly map_coeffs(F&& f) const {
        SymbolicPoly r(n_);
        for (auto& [e, c] : t_) r.add_term(e, f(c));
        return r;
    }

private:
    unsigned n_;
    TermMap t_;
};

std::string family_to_string(const std::vector<SymbolicPoly>& fam);

// k * param := value, rewritten wherever a term's coefficient is divisible by k.
struct Substitution {
    ParamId param = 0;
    BigInt k = 1;
    HPoly value;
    static Substitution parse(const std::string& text);  // e.g. "3h1=1", "h2=-h1"
    std::string to_string() const;
    HPoly apply(const HPoly& c) const;
};

// Recorded non-degeneracy assumption: lhs != rhs.
struct Constraint {
    HPoly lhs, rhs;
    static Constraint parse(const std::string& text);  // e.g. "3h1!=1"
    std::string to_string() const;
    unsigned step() const;  // latest step among mentioned parameters
    bool holds(const std::map<ParamId, std::uint64_t>& values, std::uint64_t N) const;
};

struct DiagramOptions {
    SelectionPolicy policy = SelectionPolicy::LowestIndex;
    std::map<unsigned, std::size_t> forced;  // step -> index of the differencing member
    std::vector<Substitution> substitutions;
    std::vector<Constraint> constraints;
    unsigned max_steps = 64;
};

struct DiagramStep {
    unsigned index = 0;                  // 1-based step number
    std::vector<SymbolicPoly> family;    // family being differenced
    std::size_t pivot = 0;               // underlined member, index into `family`
    Selection sel;
    char branch = 'a';
    std::vector<std::string> params_introduced;
    std::vector<SymbolicPoly> raw;       // differenced family, constants dropped
    std::vector<std::string> applied;    // substitutions applied after the step
    std::vector<std::string> constraints;
};

struct Diagram {
    unsigned n = 1;
    std::vector<SymbolicPoly> start;     // input after moving a maximal-weight member last
    std::vector<DiagramStep> steps;
    std::vector<SymbolicPoly> final_family;
    std::vector<std::string> constraints;  // every declared constraint
    std::size_t step_count() const { return steps.size(); }

    std::string to_text() const;
    std::string to_json(int indent = 2) const;
};

// Throws AmbiguousSelection (Strict policy), HypothesisViolation when a step
// produces a constant or repeated member, SpecViolation on bad options.
Diagram symbolic_diagram(const std::vector<IntPoly>& family, const DiagramOptions& opt = {});

// Runs the same steps numerically with pet_transform on Z_N (N prime) at the given
// parameter values; returns an empty string when every family matches after dropping
// constants, otherwise a description of the first mismatch.
std::string diagram_step_match(const Diagram& d, std::uint64_t N, const std::map<ParamId, std::uint64_t>& values,
                               std::uint64_t seed = 1, unsigned max_steps = UINT_MAX);

}  // namespace polysz
