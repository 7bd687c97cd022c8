#include "nvcert/geometry.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "nvcert/arith.hpp"

namespace nvcert {

int64_t class_number(int64_t D) {
    if (D >= 0) throw std::invalid_argument("class_number: D must be negative");
    const int64_t r = ((D % 4) + 4) % 4;
    if (r != 0 && r != 1) throw std::invalid_argument("class_number: D mod 4 must be 0 or 1");
    int64_t h = 0;
    // reduced forms (a,b,c): b^2 - 4ac = D, |b| <= a <= c, b >= 0 if |b| = a or a = c
    for (int64_t a = 1; 3 * a * a <= -D; ++a) {
        for (int64_t b = -a + 1; b <= a; ++b) {
            const int64_t num = b * b - D;
            if (num % (4 * a) != 0) continue;
            const int64_t c = num / (4 * a);
            if (c < a) continue;
            if (b < 0 && a == c) continue;  // (a,-b,a) ~ (a,b,a)
            if (gcd64(gcd64(a, b < 0 ? -b : b), c) != 1) continue;  // primitive only
            ++h;
        }
    }
    return h;
}

namespace {

int64_t legendre(int64_t a, int64_t p) {
    a = ((a % p) + p) % p;
    if (a == 0) return 0;
    int64_t r = 1;
    int64_t base = a, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return r == 1 ? 1 : -1;
}

std::vector<int64_t> prime_factors(int64_t n) {
    std::vector<int64_t> ps;
    for (int64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) ps.push_back(n);
    return ps;
}

}  // namespace

int64_t genus_x0(int64_t N) {
    if (N < 1) throw std::invalid_argument("genus_x0: N >= 1");
    const auto ps = prime_factors(N);
    int64_t mu = N;
    for (int64_t p : ps) mu = mu / p * (p + 1);
    int64_t nu2 = N % 4 == 0 ? 0 : 1;
    if (nu2)
        for (int64_t p : ps) {
            if (p == 2) continue;
            nu2 *= 1 + legendre(-1, p);
        }
    int64_t nu3 = N % 9 == 0 ? 0 : 1;
    if (nu3)
        for (int64_t p : ps) {
            if (p == 3) continue;
            nu3 *= 1 + legendre(-3, p);
        }
    int64_t nuinf = 0;
    for (int64_t d = 1; d * d <= N; ++d) {
        if (N % d) continue;
        const int64_t e = N / d;
        nuinf += [](int64_t g) {  // Euler phi of gcd(d, N/d)
            int64_t ph = g;
            for (int64_t p : prime_factors(g)) ph = ph / p * (p - 1);
            return ph;
        }(gcd64(d, e));
        if (d != e)
            nuinf += [](int64_t g) {
                int64_t ph = g;
                for (int64_t p : prime_factors(g)) ph = ph / p * (p - 1);
                return ph;
            }(gcd64(e, d));
    }
    // 1 + mu/12 - nu2/4 - nu3/3 - nuinf/2, exact in twelfths
    const int64_t twelfths = mu - 3 * nu2 - 4 * nu3 - 6 * nuinf;
    if ((twelfths + 12) % 12 != 0) throw std::logic_error("genus_x0: non-integral genus");
    return 1 + twelfths / 12;
}

int64_t genus_x0plus(int64_t N) {
    if (!is_prime(N)) throw std::invalid_argument("genus_x0plus: N must be prime");
    const int64_t g = genus_x0(N);
    int64_t fixed = class_number(-4 * N);
    if (N % 4 == 3) fixed += class_number(-N);
    if ((2 * g + 2 - fixed) % 4 != 0) throw std::logic_error("genus_x0plus: parity");
    return (2 * g + 2 - fixed) / 4;
}

namespace {

// fixed points of the Fricke involution on X0(N^2): reduced forms of
// discriminant -4N^2 whose leading coefficient is coprime to N (the forms
// with N | a correspond to non-cyclic kernels and give no fixed point)
int64_t fricke_fixed_square(int64_t N) {
    const int64_t D = -4 * N * N;
    int64_t f = 0;
    for (int64_t a = 1; 3 * a * a <= -D; ++a) {
        if (a % N == 0) continue;
        for (int64_t b = -a + 1; b <= a; ++b) {
            const int64_t num = b * b - D;
            if (num % (4 * a) != 0) continue;
            const int64_t c = num / (4 * a);
            if (c < a) continue;
            if (b < 0 && a == c) continue;
            if (gcd64(gcd64(a, b < 0 ? -b : b), c) != 1) continue;
            ++f;
        }
    }
    return f;
}

}  // namespace

int64_t dim_s2_plus_new_square(int64_t N) {
    if (!is_prime(N)) throw std::invalid_argument("dim_s2_plus_new_square: N must be prime");
    const int64_t gsq = genus_x0(N * N);
    const int64_t f = fricke_fixed_square(N);
    if ((2 * gsq + 2 - f) % 4 != 0) throw std::logic_error("dim formula: parity");
    const int64_t gplus = (2 * gsq + 2 - f) / 4;
    // each oldform block at level N contributes one Fricke-plus dimension
    return gplus - genus_x0(N);
}

namespace {

std::mutex dim_mu;
std::map<int64_t, int64_t> dim_table;

}  // namespace

void set_xnsplus_dimension_table(const std::map<int64_t, int64_t>& table) {
    std::lock_guard<std::mutex> lock(dim_mu);
    dim_table = table;
}

std::optional<int64_t> genus_xnsplus(int64_t N) {
    if (!is_prime(N)) throw std::invalid_argument("genus_xnsplus: N must be prime");
    std::lock_guard<std::mutex> lock(dim_mu);
    auto it = dim_table.find(N);
    if (it == dim_table.end()) return std::nullopt;
    return it->second;
}

Enclosure kappa(int64_t p) {
    if (p < 3) throw std::invalid_argument("kappa: p >= 3 required");
    const Enclosure pe(static_cast<double>(p));
    return Enclosure(1.0) +
           (pe - Enclosure(1.0)) / ((pe - Enclosure(2.0)) * log(pe));
}

int64_t genus_polynomial(int64_t g) { return 16 * g * g * g + 15 * g * g - 16 * g + 10; }

int64_t point_count_bound(const PointBoundInput& in) {
    if (in.p < 3 || !is_prime(in.p)) throw std::invalid_argument("point_count_bound: p must be prime >= 3");
    if (in.genus < 2) throw std::invalid_argument("point_count_bound: genus >= 2 required");
    if (in.fp_count < 0) throw std::invalid_argument("point_count_bound: fp_count >= 0");
    if (in.nv_product < 1) throw std::invalid_argument("point_count_bound: nv_product >= 1");
    const Enclosure b = kappa(in.p) *
                        Enclosure(static_cast<double>(in.nv_product)) *
                        Enclosure(static_cast<double>(in.fp_count)) *
                        Enclosure(static_cast<double>(genus_polynomial(in.genus)));
    // #X(Q) < b, so the certified bound is ceil(b.hi) - 1
    return static_cast<int64_t>(std::ceil(b.hi)) - 1;
}

}  // namespace nvcert
