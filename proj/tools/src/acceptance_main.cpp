// Runs the acceptance criteria at full size and prints one PASS/FAIL line each.
//
//   polysz_acceptance [--allow-fail N]... [N]...
//
// Exit status is 1 when a criterion fails that was not named with --allow-fail.
// Every failure is still printed as FAIL.
#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <vector>

#include "polysz/acceptance.hpp"

namespace acc = polysz::acceptance;

int main(int argc, char** argv) {
    std::vector<int> only, allowed;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--allow-fail") == 0 && i + 1 < argc) {
            allowed.push_back(std::atoi(argv[++i]));
            continue;
        }
        int id = std::atoi(argv[i]);
        if (id < 1 || id > acc::kCriteria) {
            std::cerr << "usage: polysz_acceptance [--allow-fail N]... [N]...\n";
            return 2;
        }
        only.push_back(id);
    }
    int failed = 0, unexpected = 0, ran = 0;
    acc::run_all(acc::Scale::Full, only, [&](const acc::Result& r) {
        ++ran;
        if (!r.pass) {
            ++failed;
            if (std::find(allowed.begin(), allowed.end(), r.id) == allowed.end()) ++unexpected;
        }
        std::cout << acc::format_line(r) << std::endl;
    });
    std::cout << (ran - failed) << " of " << ran << " criteria passed";
    if (failed > unexpected) std::cout << " (" << failed - unexpected << " known failure(s) allowed)";
    std::cout << std::endl;
    return unexpected ? 1 : 0;
}
