#pragma once

// Brute-force oracles shared by the test binaries. They work on plain integers
// and std::complex directly, without going through the library's tables.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "polysz/fourier.hpp"
#include "polysz/ring.hpp"

namespace oracle {

using cplx = std::complex<double>;

inline cplx e(std::int64_t t, std::int64_t N) {
    double th = 2.0 * std::numbers::pi * static_cast<double>(((t % N) + N) % N) / static_cast<double>(N);
    return {std::cos(th), std::sin(th)};
}

inline std::int64_t md(std::int64_t a, std::int64_t N) { return ((a % N) + N) % N; }

// Univariate polynomial with ascending integer coefficients evaluated mod N.
inline std::int64_t peval(const std::vector<std::int64_t>& c, std::int64_t y, std::int64_t N) {
    std::int64_t r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = md(r * y + *it, N);
    return r;
}

// avg over h1, h2 in Z_N of e_N(a h1 h2)
inline cplx hadamard_zn(std::int64_t a, std::int64_t N) {
    cplx s = 0;
    for (std::int64_t h1 = 0; h1 < N; ++h1)
        for (std::int64_t h2 = 0; h2 < N; ++h2) s += e(a * h1 * h2, N);
    return s / static_cast<double>(N * N);
}

// avg_y e_N(a y^2)
inline cplx gauss_zn(std::int64_t a, std::int64_t N) {
    cplx s = 0;
    for (std::int64_t y = 0; y < N; ++y) s += e(a * y * y, N);
    return s / static_cast<double>(N);
}

// avg_{x,y} f0(x) prod_i f_i(x + P_i(y)) on Z_N, univariate P_i
inline cplx lambda_zn(const std::vector<std::vector<std::int64_t>>& P, const std::vector<std::vector<cplx>>& F,
                      std::int64_t N) {
    cplx s = 0;
    for (std::int64_t x = 0; x < N; ++x)
        for (std::int64_t y = 0; y < N; ++y) {
            cplx t = F[0][x];
            for (std::size_t i = 0; i < P.size(); ++i) t *= F[i + 1][md(x + peval(P[i], y, N), N)];
            s += t;
        }
    return s / static_cast<double>(N * N);
}

// ||f||_{U^s}^{2^s} on Z_N straight from the definition
inline double gowers_power_zn(const std::vector<cplx>& f, unsigned s) {
    auto N = static_cast<std::int64_t>(f.size());
    std::vector<std::int64_t> h(s, 0);
    cplx total = 0;
    std::function<void(unsigned)> rec = [&](unsigned i) {
        if (i == s) {
            for (std::int64_t x = 0; x < N; ++x) {
                cplx t = 1;
                for (unsigned w = 0; w < (1u << s); ++w) {
                    std::int64_t pt = x;
                    for (unsigned j = 0; j < s; ++j)
                        if (w >> j & 1) pt += h[j];
                    cplx v = f[md(pt, N)];
                    t *= (std::popcount(w) % 2) ? std::conj(v) : v;
                }
                total += t;
            }
            return;
        }
        for (h[i] = 0; h[i] < N; ++h[i]) rec(i + 1);
    };
    rec(0);
    // the sign convention does not matter for the real part of the full average
    return total.real() / std::pow(static_cast<double>(N), s + 1);
}

inline std::vector<cplx> random_bounded(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cplx> v(n);
    for (auto& z : v) z = std::polar(std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng));
    return v;
}

inline std::vector<polysz::Elem> random_subset(std::uint64_t n, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution b(density);
    std::vector<polysz::Elem> s;
    for (std::uint64_t i = 0; i < n; ++i)
        if (b(rng)) s.push_back(static_cast<polysz::Elem>(i));
    return s;
}

// Exhaustive configuration count: x in A_0 and x + P_i(y) in A_i for every i, by
// evaluating the polynomials through ring arithmetic (add/mul only).
struct Counts {
    std::uint64_t M = 0, M1 = 0;
};
inline Counts count_configs(const polysz::Ring& R, const std::vector<polysz::IntPoly>& P,
                            const std::vector<std::vector<polysz::Elem>>& A) {
    unsigned n = 0;
    for (auto& p : P) n = std::max(n, p.n_vars());
    std::uint64_t q = R.size();
    std::vector<std::vector<char>> in(A.size(), std::vector<char>(q, 0));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (auto a : A[i]) in[i][a] = 1;
    std::uint64_t ny = 1;
    for (unsigned i = 0; i < n; ++i) ny *= q;
    Counts c;
    std::vector<polysz::Elem> y(n);
    for (std::uint64_t yi = 0; yi < ny; ++yi) {
        std::uint64_t t = yi;
        for (unsigned i = 0; i < n; ++i) {
            y[i] = static_cast<polysz::Elem>(t % q);
            t /= q;
        }
        std::vector<polysz::Elem> v;
        for (auto& p : P) {
            // evaluate term by term with ring ops
            polysz::Elem acc = R.zero();
            for (auto& [ex, co] : p.terms()) {
                polysz::Elem m = R.embed(co);
                for (unsigned j = 0; j < p.n_vars(); ++j)
                    for (unsigned k = 0; k < ex[j]; ++k) m = R.mul(m, y[j]);
                acc = R.add(acc, m);
            }
            v.push_back(acc);
        }
        std::vector<polysz::Elem> vals{R.zero()};
        vals.insert(vals.end(), v.begin(), v.end());
        std::sort(vals.begin(), vals.end());
        bool nontrivial = std::adjacent_find(vals.begin(), vals.end()) == vals.end();
        for (polysz::Elem x = 0; x < q; ++x) {
            if (!in[0][x]) continue;
            bool ok = true;
            for (std::size_t i = 0; i < v.size() && ok; ++i) ok = in[i + 1][R.add(x, v[i])];
            if (ok) {
                ++c.M;
                if (nontrivial) ++c.M1;
            }
        }
    }
    return c;
}

}  // namespace oracle
