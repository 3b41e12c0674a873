#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polysz/poly.hpp"
#include "polysz/ring.hpp"

namespace polysz {

struct SweepConfig {
    // Ring specs, plus two patterns: "primes:A..B" (Z_p for primes in [A, B]) and
    // "primes-after:A:K" (the first K primes above A).
    std::vector<std::string> rings;
    std::vector<IntPoly> family;
    unsigned trials = 1;
    std::uint64_t seed = 0;
    enum class Functions { Random, Indicator } functions = Functions::Random;
    double density = 0.5;  // indicator sets hold floor(density * |R|) elements
};

std::vector<RingSpec> expand_ring_pattern(const std::string& pattern);

struct SweepBound {
    double bound = 0;
    bool bound_applies = true;
};
// {y^2}: 2 lpf^{-1/4}. One member of degree d: 3((d-1)/lpf)^{2^{-d}}, applicable when
// lpf > max(2, d, C1). Larger families: 2 lpf^{-1/4} as a reference only.
SweepBound sweep_bound(const Ring& ring, const std::vector<IntPoly>& family);

struct SweepRow {
    std::string ring;
    std::uint64_t N = 0, lpf = 0, size = 0;
    unsigned trial = 0;
    double discrepancy = 0;
    SweepBound bound;
    std::string error;  // set when the ring was skipped
};

struct SweepResult {
    std::vector<SweepRow> rows;     // ring-major, trial-minor
    std::vector<SweepRow> summary;  // one per ring; discrepancy is the max over trials
    std::string to_csv() const;
};

// Deterministic in (config, seed): per-trial functions come from a seed derived from
// (seed, ring index, trial, function index).
SweepResult sweep(const SweepConfig& cfg);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace polysz
