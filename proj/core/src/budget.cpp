#include "polysz/budget.hpp"

#include <atomic>
#include <limits>

#include "polysz/errors.hpp"

namespace polysz {

namespace {
std::atomic<std::uint64_t> g_enum{Budget::kDefaultEnumeration};
std::atomic<std::uint64_t> g_polyeq{Budget::kDefaultPolyEquality};
}  // namespace

std::uint64_t Budget::enumeration() { return g_enum.load(); }
void Budget::set_enumeration(std::uint64_t cap) { g_enum.store(cap); }
std::uint64_t Budget::poly_equality() { return g_polyeq.load(); }
void Budget::set_poly_equality(std::uint64_t cap) { g_polyeq.store(cap); }

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > std::numeric_limits<std::uint64_t>::max() / b)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::uint64_t sat_pow(std::uint64_t a, unsigned e) {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < e; ++i) r = sat_mul(r, a);
    return r;
}

void require_budget(std::uint64_t work, const std::string& what) {
    if (work > Budget::enumeration())
        throw BudgetExceeded(what + " needs " + std::to_string(work) +
                             " evaluations, cap is " + std::to_string(Budget::enumeration()));
}

BudgetScope::BudgetScope(std::uint64_t cap) : saved_(Budget::enumeration()) {
    Budget::set_enumeration(cap);
}
BudgetScope::~BudgetScope() { Budget::set_enumeration(saved_); }

}  // namespace polysz
