#pragma once

#include <functional>
#include <string>
#include <vector>

namespace polysz::acceptance {

struct Result {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// Full runs every criterion at its stated size. Quick shrinks trial counts and
// ring ranges so the whole set finishes in a few seconds (used by `selftest`).
enum class Scale { Full, Quick };

constexpr int kCriteria = 13;

Result run_criterion(int id, Scale scale);

// Runs the selected criteria (all when `only` is empty) in order, calling
// `report` after each one.
std::vector<Result> run_all(Scale scale, const std::vector<int>& only = {},
                            const std::function<void(const Result&)>& report = {});

std::string format_line(const Result& r);

}  // namespace polysz::acceptance
