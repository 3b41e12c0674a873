#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <utility>
#include <vector>

namespace polysz {

using BigInt = boost::multiprecision::cpp_int;

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n);
bool is_prime(std::uint64_t n);
std::uint64_t lpf(std::uint64_t n);  // least prime factor, n >= 2
std::vector<std::uint64_t> prime_divisors(std::uint64_t n);
std::vector<std::uint64_t> primes_between(std::uint64_t lo, std::uint64_t hi);

// Largest prime factor of |v|; 1 when |v| <= 1.
BigInt largest_prime_factor(const BigInt& v);

std::uint64_t mod(std::int64_t a, std::uint64_t n);
std::uint64_t mod(const BigInt& a, std::uint64_t n);
std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t n);
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t n);

// Z_N-height: distance of the residue to 0 in the cyclic metric.
std::uint64_t zn_height(std::uint64_t r, std::uint64_t n);
std::uint64_t zn_height(const BigInt& c, std::uint64_t n);

// Representative in (-N/2, N/2].
std::int64_t symmetric_residue(std::uint64_t r, std::uint64_t n);

std::uint64_t binomial(unsigned n, unsigned k);  // saturating
std::uint64_t gcd_u(std::uint64_t a, std::uint64_t b);
std::uint64_t lcm_u(std::uint64_t a, std::uint64_t b);

}  // namespace polysz
