#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace polysz {

using cplx = std::complex<double>;

// Worker count from POLYSZ_THREADS, else hardware concurrency.
unsigned thread_count();

// Compensated (Neumaier) accumulator for complex sums.
struct CSum {
    cplx s{0.0, 0.0};
    cplx c{0.0, 0.0};
    void add(cplx v) {
        s = add_part(s, v, c);
    }
    cplx value() const { return s + c; }

private:
    static cplx add_part(cplx s, cplx v, cplx& c) {
        double re = s.real() + v.real();
        double cr = std::abs(s.real()) >= std::abs(v.real()) ? (s.real() - re) + v.real()
                                                              : (v.real() - re) + s.real();
        double im = s.imag() + v.imag();
        double ci = std::abs(s.imag()) >= std::abs(v.imag()) ? (s.imag() - im) + v.imag()
                                                              : (v.imag() - im) + s.imag();
        c += cplx(cr, ci);
        return {re, im};
    }
};

constexpr unsigned kChunks = 64;

// Splits [0, n) into kChunks fixed ranges, evaluates body(lo, hi) on a thread pool and
// reduces chunk results in chunk order. The partition does not depend on the thread
// count, so results are bit-identical across machines.
cplx parallel_csum(std::uint64_t n, const std::function<cplx(std::uint64_t, std::uint64_t)>& body);
double parallel_dsum(std::uint64_t n,
                     const std::function<double(std::uint64_t, std::uint64_t)>& body);
std::uint64_t parallel_usum(std::uint64_t n,
                            const std::function<std::uint64_t(std::uint64_t, std::uint64_t)>& body);

// Runs body(i) for i in [0, n) across workers; body must write disjoint outputs.
void parallel_for(std::uint64_t n, const std::function<void(std::uint64_t)>& body);

}  // namespace polysz
