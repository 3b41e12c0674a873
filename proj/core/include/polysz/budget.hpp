#pragma once

#include <cstdint>
#include <string>

namespace polysz {

// Global enumeration caps. Operations refuse work above these instead of sampling.
struct Budget {
    static constexpr std::uint64_t kDefaultEnumeration = 100'000'000ULL;
    static constexpr std::uint64_t kDefaultPolyEquality = 10'000'000ULL;

    static std::uint64_t enumeration();
    static void set_enumeration(std::uint64_t cap);
    static std::uint64_t poly_equality();
    static void set_poly_equality(std::uint64_t cap);
};

// Saturating product a^e; returns UINT64_MAX on overflow.
std::uint64_t sat_pow(std::uint64_t a, unsigned e);
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b);

// Throws BudgetExceeded when `work` exceeds the enumeration cap.
void require_budget(std::uint64_t work, const std::string& what);

// Scoped override, used by tests and the CLI --budget flag.
class BudgetScope {
public:
    explicit BudgetScope(std::uint64_t cap);
    ~BudgetScope();
    BudgetScope(const BudgetScope&) = delete;
    BudgetScope& operator=(const BudgetScope&) = delete;

private:
    std::uint64_t saved_;
};

}  // namespace polysz
