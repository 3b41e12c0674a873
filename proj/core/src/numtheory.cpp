#include "polysz/numtheory.hpp"

#include <boost/multiprecision/miller_rabin.hpp>
#include <limits>
#include <numeric>

#include "polysz/budget.hpp"

namespace polysz {

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, unsigned>> out;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

std::uint64_t lpf(std::uint64_t n) {
    for (std::uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return p;
    return n;
}

std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (auto& [p, e] : factorize(n)) out.push_back(p);
    return out;
}

std::vector<std::uint64_t> primes_between(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t v = lo; v <= hi; ++v)
        if (is_prime(v)) out.push_back(v);
    return out;
}

BigInt largest_prime_factor(const BigInt& v) {
    BigInt n = v < 0 ? BigInt(-v) : v;
    if (n <= 1) return 1;
    BigInt best = 1;
    // trial division to 10^6, then the cofactor is prime or handled by Miller-Rabin
    for (std::uint64_t p = 2; p <= 1'000'000 && BigInt(p) * p <= n; ++p) {
        if (n % p == 0) {
            best = p;
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) {
        if (!boost::multiprecision::miller_rabin_test(n, 25))
            return n;  // composite cofactor with no small factor; report it as an upper bound
        best = n;
    }
    return best;
}

std::uint64_t mod(std::int64_t a, std::uint64_t n) {
    __int128 r = static_cast<__int128>(a) % static_cast<__int128>(n);
    if (r < 0) r += n;
    return static_cast<std::uint64_t>(r);
}

std::uint64_t mod(const BigInt& a, std::uint64_t n) {
    BigInt r = a % n;
    if (r < 0) r += n;
    return r.convert_to<std::uint64_t>();
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % n);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t n) {
    std::uint64_t r = 1 % n;
    a %= n;
    while (e) {
        if (e & 1) r = mulmod(r, a, n);
        a = mulmod(a, a, n);
        e >>= 1;
    }
    return r;
}

std::uint64_t zn_height(std::uint64_t r, std::uint64_t n) {
    r %= n;
    return std::min(r, n - r);
}

std::uint64_t zn_height(const BigInt& c, std::uint64_t n) { return zn_height(mod(c, n), n); }

std::int64_t symmetric_residue(std::uint64_t r, std::uint64_t n) {
    r %= n;
    if (r > n / 2) return static_cast<std::int64_t>(r) - static_cast<std::int64_t>(n);
    return static_cast<std::int64_t>(r);
}

std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max())
            return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(r);
}

std::uint64_t gcd_u(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }
std::uint64_t lcm_u(std::uint64_t a, std::uint64_t b) { return a / std::gcd(a, b) * b; }

}  // namespace polysz
