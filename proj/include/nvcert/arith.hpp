#pragma once

#include <cstdint>
#include <vector>

#include "nvcert/enclosure.hpp"

namespace nvcert {

// modular inverse of a mod m (m >= 1, gcd(a,m) = 1); throws if not invertible
int64_t mod_inverse(int64_t a, int64_t m);

int64_t gcd64(int64_t a, int64_t b);

// number of divisors
int64_t divisor_count(int64_t n);

// f(k) = sum_{k'|k} k'^{-1/2}
Enclosure f_weight(int64_t k);

// g(m) = sum_{m'|m} f(m') tau(m') / m'^{3/2}
Enclosure g_weight(int64_t m);

// primes in [lo, hi] (inclusive), by sieve
std::vector<int64_t> primes_in(int64_t lo, int64_t hi);

bool is_prime(int64_t n);

// Kloosterman sum S(m, n; c) = sum_{k in (Z/c)^*} e((mk + n k^{-1})/c).
// Real by the k <-> c-k symmetry; returned as a certified enclosure of the
// cosine sum.  Phases are reduced exactly in integer arithmetic.
Enclosure kloosterman(int64_t m, int64_t n, int64_t c);

// Weil bound |S(m,n;c)| <= gcd(m,n,c)^{1/2} tau(c) sqrt(c)  (upper endpoint)
double kloosterman_weil_bound(int64_t m, int64_t n, int64_t c);

}  // namespace nvcert
