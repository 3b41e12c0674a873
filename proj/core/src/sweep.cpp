#include "polysz/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "polysz/counting.hpp"
#include "polysz/errors.hpp"
#include "polysz/fourier.hpp"
#include "polysz/parallel.hpp"

namespace polysz {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t to_u64(const std::string& s, const std::string& pattern) {
    try {
        std::size_t used = 0;
        auto v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("ring pattern '" + pattern + "': bad number '" + s + "'");
    }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return splitmix(splitmix(splitmix(splitmix(seed) ^ a) ^ b) ^ c);
}

std::vector<RingSpec> expand_ring_pattern(const std::string& pattern) {
    std::vector<RingSpec> out;
    if (pattern.rfind("primes:", 0) == 0) {
        auto body = pattern.substr(7);
        auto dots = body.find("..");
        if (dots == std::string::npos) throw ParseError("ring pattern '" + pattern + "': expected primes:A..B");
        auto lo = to_u64(body.substr(0, dots), pattern), hi = to_u64(body.substr(dots + 2), pattern);
        for (auto p : primes_between(lo, hi)) out.push_back(RingSpec::modint(p));
        return out;
    }
    if (pattern.rfind("primes-after:", 0) == 0) {
        auto body = pattern.substr(13);
        auto colon = body.find(':');
        if (colon == std::string::npos) throw ParseError("ring pattern '" + pattern + "': expected primes-after:A:K");
        auto a = to_u64(body.substr(0, colon), pattern), k = to_u64(body.substr(colon + 1), pattern);
        for (std::uint64_t p = a + 1; out.size() < k; ++p)
            if (is_prime(p)) out.push_back(RingSpec::modint(p));
        return out;
    }
    out.push_back(RingSpec::parse(pattern));
    return out;
}

SweepBound sweep_bound(const Ring& ring, const std::vector<IntPoly>& family) {
    double lp = static_cast<double>(ring.lpf());
    SweepBound b;
    if (family.size() == 1 && family[0].n_vars() == 1 && family[0] == IntPoly::parse("y^2")) {
        b.bound = 2.0 * std::pow(lp, -0.25);
        b.bound_applies = ring.lpf() > 2;
        return b;
    }
    if (family.size() == 1) {
        const IntPoly& P = family[0];
        int d = P.degree();
        if (d < 1) return {1.0, false};
        double e = std::ldexp(1.0, -d);
        b.bound = 3.0 * std::pow((d - 1.0) / lp, e);
        auto ind = independence_check({P.without_constant()});
        BigInt need = std::max<BigInt>(BigInt(std::max(2, d)), ind.C1 ? *ind.C1 : BigInt(0));
        b.bound_applies = ind.independent && BigInt(ring.lpf()) > need;
        return b;
    }
    b.bound = 2.0 * std::pow(lp, -0.25);
    b.bound_applies = false;
    return b;
}

namespace {

FunctionOnRing trial_function(const RingPtr& ring, const SweepConfig& cfg, std::uint64_t s) {
    if (cfg.functions == SweepConfig::Functions::Random) return FunctionOnRing::random_bounded(ring, s);
    std::uint64_t n = ring->size();
    auto k = static_cast<std::uint64_t>(std::floor(cfg.density * static_cast<double>(n)));
    std::vector<Elem> all(n);
    for (std::uint64_t i = 0; i < n; ++i) all[i] = static_cast<Elem>(i);
    // partial Fisher-Yates, drawing indices straight from the engine so the result
    // does not depend on the standard library's distribution code
    std::mt19937_64 rng(s);
    for (std::uint64_t i = 0; i < k; ++i) {
        std::uint64_t j = i + rng() % (n - i);
        std::swap(all[i], all[j]);
    }
    all.resize(k);
    std::sort(all.begin(), all.end());
    return FunctionOnRing::indicator(ring, all);
}

}  // namespace

SweepResult sweep(const SweepConfig& cfg) {
    if (cfg.trials < 1) throw SpecViolation("sweep: trials must be >= 1");
    if (cfg.family.empty()) throw SpecViolation("sweep: empty family");
    if (cfg.rings.empty()) throw SpecViolation("sweep: no rings");
    if (cfg.functions == SweepConfig::Functions::Indicator && (cfg.density < 0 || cfg.density > 1))
        throw SpecViolation("sweep: density must lie in [0, 1]");
    std::vector<RingSpec> specs;
    for (auto& p : cfg.rings)
        for (auto& s : expand_ring_pattern(p)) specs.push_back(s);

    std::vector<std::vector<SweepRow>> per_ring(specs.size());
    parallel_for(specs.size(), [&](std::uint64_t r) {
        auto& rows = per_ring[r];
        SweepRow base;
        base.ring = specs[r].to_string();
        try {
            RingPtr ring = make_ring(specs[r]);
            base.N = ring->characteristic();
            base.lpf = ring->lpf();
            base.size = ring->size();
            base.bound = sweep_bound(*ring, cfg.family);
            for (unsigned t = 0; t < cfg.trials; ++t) {
                LambdaQuery q{ring, cfg.family, {}, {}, {}};
                for (std::size_t i = 0; i <= cfg.family.size(); ++i)
                    q.F.push_back(trial_function(ring, cfg, derive_seed(cfg.seed, r, t, i)));
                SweepRow row = base;
                row.trial = t;
                row.discrepancy = main_discrepancy(q);
                rows.push_back(row);
            }
        } catch (const std::exception& e) {
            rows.clear();
            base.error = e.what();
            rows.push_back(base);
        }
    });

    SweepResult res;
    for (auto& rows : per_ring) {
        SweepRow s = rows.front();
        s.discrepancy = 0;
        for (auto& row : rows) {
            s.discrepancy = std::max(s.discrepancy, row.discrepancy);
            res.rows.push_back(row);
        }
        res.summary.push_back(s);
    }
    return res;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

}  // namespace

std::string SweepResult::to_csv() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "ring,N,lpf,size,trial,discrepancy,bound,bound_applies,error\n";
    auto put = [&](const SweepRow& r, const std::string& trial) {
        os << csv_field(r.ring) << "," << r.N << "," << r.lpf << "," << r.size << "," << trial << ","
           << r.discrepancy << "," << r.bound.bound << "," << (r.bound.bound_applies ? "true" : "false") << ","
           << csv_field(r.error) << "\n";
    };
    for (auto& r : rows) put(r, r.error.empty() ? std::to_string(r.trial) : "");
    for (auto& r : summary) put(r, "max");
    return os.str();
}

}  // namespace polysz
