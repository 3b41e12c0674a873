#pragma once

#include <stdexcept>
#include <string>

namespace polysz {

// Base for every library error. `kind()` is a stable short name used by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define POLYSZ_ERROR(Name)                                                   \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    }

POLYSZ_ERROR(SpecViolation);
POLYSZ_ERROR(BudgetExceeded);
POLYSZ_ERROR(ZeroExponent);
POLYSZ_ERROR(ConstantMember);
POLYSZ_ERROR(TrivialCharacter);
POLYSZ_ERROR(DegenerateB);
POLYSZ_ERROR(InvertibilityViolation);
POLYSZ_ERROR(EmptyAllowedSet);
POLYSZ_ERROR(Deg0Input);
POLYSZ_ERROR(SearchBudgetExceeded);
POLYSZ_ERROR(AmbiguousSelection);
POLYSZ_ERROR(ParseError);

#undef POLYSZ_ERROR

// A mathematical hypothesis of some bound or step failed. `stage` names where.
class HypothesisViolation : public Error {
public:
    HypothesisViolation(std::string stage, const std::string& what)
        : Error("HypothesisViolation", stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace polysz
