#include "polysz/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace polysz {

unsigned thread_count() {
    if (const char* env = std::getenv("POLYSZ_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace {

template <class T>
std::vector<T> run_chunks(std::uint64_t n, const std::function<T(std::uint64_t, std::uint64_t)>& body) {
    std::vector<T> parts(kChunks, T{});
    auto range = [n](unsigned c) {
        std::uint64_t lo = n * c / kChunks, hi = n * (c + 1) / kChunks;
        return std::pair{lo, hi};
    };
    unsigned workers = std::min<unsigned>(thread_count(), kChunks);
    if (workers <= 1 || n < 4096) {
        for (unsigned c = 0; c < kChunks; ++c) {
            auto [lo, hi] = range(c);
            if (lo < hi) parts[c] = body(lo, hi);
        }
        return parts;
    }
    std::atomic<unsigned> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (unsigned c = next++; c < kChunks; c = next++) {
                auto [lo, hi] = range(c);
                if (lo < hi) parts[c] = body(lo, hi);
            }
        });
    }
    for (auto& t : pool) t.join();
    return parts;
}

}  // namespace

cplx parallel_csum(std::uint64_t n, const std::function<cplx(std::uint64_t, std::uint64_t)>& body) {
    CSum acc;
    for (const cplx& v : run_chunks<cplx>(n, body)) acc.add(v);
    return acc.value();
}

double parallel_dsum(std::uint64_t n, const std::function<double(std::uint64_t, std::uint64_t)>& body) {
    CSum acc;
    for (double v : run_chunks<double>(n, body)) acc.add(cplx(v, 0.0));
    return acc.value().real();
}

std::uint64_t parallel_usum(std::uint64_t n,
                            const std::function<std::uint64_t(std::uint64_t, std::uint64_t)>& body) {
    std::uint64_t s = 0;
    for (auto v : run_chunks<std::uint64_t>(n, body)) s += v;
    return s;
}

void parallel_for(std::uint64_t n, const std::function<void(std::uint64_t)>& body) {
    run_chunks<int>(n, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) body(i);
        return 0;
    });
}

}  // namespace polysz
