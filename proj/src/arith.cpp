#include "nvcert/arith.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nvcert {

int64_t gcd64(int64_t a, int64_t b) { return std::gcd(a, b); }

int64_t mod_inverse(int64_t a, int64_t m) {
    if (m < 1) throw std::domain_error("mod_inverse: modulus must be >= 1");
    if (m == 1) return 0;
    int64_t r0 = m, r1 = ((a % m) + m) % m;
    int64_t t0 = 0, t1 = 1;
    while (r1 != 0) {
        const int64_t q = r0 / r1;
        const int64_t r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        const int64_t t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
    }
    if (r0 != 1) throw std::domain_error("mod_inverse: not invertible");
    return ((t0 % m) + m) % m;
}

int64_t divisor_count(int64_t n) {
    if (n < 1) throw std::domain_error("divisor_count: n must be >= 1");
    int64_t count = 1;
    for (int64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            int64_t e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            count *= e + 1;
        }
    }
    if (n > 1) count *= 2;
    return count;
}

Enclosure f_weight(int64_t k) {
    if (k < 1) throw std::domain_error("f_weight: k must be >= 1");
    Enclosure s(0.0);
    for (int64_t d = 1; d * d <= k; ++d) {
        if (k % d) continue;
        s += Enclosure(1.0) / sqrt(Enclosure(static_cast<double>(d)));
        const int64_t e = k / d;
        if (e != d) s += Enclosure(1.0) / sqrt(Enclosure(static_cast<double>(e)));
    }
    return s;
}

Enclosure g_weight(int64_t m) {
    if (m < 1) throw std::domain_error("g_weight: m must be >= 1");
    Enclosure s(0.0);
    for (int64_t d = 1; d <= m; ++d) {
        if (m % d) continue;
        const Enclosure de(static_cast<double>(d));
        s += f_weight(d) * Enclosure(static_cast<double>(divisor_count(d))) / (de * sqrt(de));
    }
    return s;
}

std::vector<int64_t> primes_in(int64_t lo, int64_t hi) {
    std::vector<int64_t> out;
    if (hi < 2 || hi < lo) return out;
    lo = std::max<int64_t>(lo, 2);
    // segmented sieve
    const int64_t root = static_cast<int64_t>(std::sqrt(static_cast<double>(hi))) + 1;
    std::vector<bool> small(root + 1, true);
    std::vector<int64_t> base;
    for (int64_t p = 2; p <= root; ++p) {
        if (!small[p]) continue;
        base.push_back(p);
        for (int64_t q = p * p; q <= root; q += p) small[q] = false;
    }
    const int64_t span = hi - lo + 1;
    std::vector<bool> seg(span, true);
    for (int64_t p : base) {
        int64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
        for (int64_t q = start; q <= hi; q += p) seg[q - lo] = false;
    }
    for (int64_t i = 0; i < span; ++i)
        if (seg[i] && lo + i >= 2) out.push_back(lo + i);
    return out;
}

bool is_prime(int64_t n) {
    if (n < 2) return false;
    for (int64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

Enclosure kloosterman(int64_t m, int64_t n, int64_t c) {
    if (c < 1) throw std::domain_error("kloosterman: c must be >= 1");
    if (c == 1) return Enclosure(1.0);
    const int64_t mr = ((m % c) + c) % c;
    const int64_t nr = ((n % c) + c) % c;
    const Enclosure two_pi_over_c = two_pi_enclosure() / Enclosure(static_cast<double>(c));
    Enclosure s(0.0);
    // pair k with c - k: both give the same cosine term, so sum over k <= c/2
    // and double, except self-paired points.
    for (int64_t k = 1; k < c; ++k) {
        if (gcd64(k, c) != 1) continue;
        if (2 * k > c) break;
        const int64_t kinv = mod_inverse(k, c);
        const int64_t phase = (mr * k + nr * kinv) % c;  // exact, fits in int64
        const Enclosure term = cos(two_pi_over_c * Enclosure(static_cast<double>(phase)));
        if (2 * k == c)
            s += term;  // c = 2, k = 1 is self-paired
        else
            s += Enclosure(2.0) * term;
    }
    return s;
}

double kloosterman_weil_bound(int64_t m, int64_t n, int64_t c) {
    const int64_t g = gcd64(gcd64(((m % c) + c) % c, ((n % c) + c) % c), c);
    const double b = std::sqrt(static_cast<double>(g == 0 ? c : g)) *
                     static_cast<double>(divisor_count(c)) * std::sqrt(static_cast<double>(c));
    return detail::step_up(b, 4);
}

}  // namespace nvcert
