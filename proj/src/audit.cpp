#include "nvcert/audit.hpp"

#include <mpfr.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nvcert/arith.hpp"
#include "nvcert/lseries.hpp"
#include "nvcert/moments.hpp"

namespace nvcert::audit {

namespace {

constexpr mpfr_prec_t kPrec = 200;

// minimal 200-bit interval type over mpfr
struct Iv {
    mpfr_t lo, hi;

    Iv() {
        mpfr_init2(lo, kPrec);
        mpfr_init2(hi, kPrec);
        mpfr_set_zero(lo, 1);
        mpfr_set_zero(hi, 1);
    }
    explicit Iv(double v) : Iv() {
        mpfr_set_d(lo, v, MPFR_RNDD);
        mpfr_set_d(hi, v, MPFR_RNDU);
    }
    explicit Iv(int64_t v) : Iv() {
        mpfr_set_sj(lo, v, MPFR_RNDD);
        mpfr_set_sj(hi, v, MPFR_RNDU);
    }
    Iv(const Iv& o) : Iv() {
        mpfr_set(lo, o.lo, MPFR_RNDD);
        mpfr_set(hi, o.hi, MPFR_RNDU);
    }
    Iv(Iv&& o) noexcept {
        mpfr_init2(lo, kPrec);
        mpfr_init2(hi, kPrec);
        mpfr_swap(lo, o.lo);
        mpfr_swap(hi, o.hi);
    }
    Iv& operator=(Iv o) {
        mpfr_swap(lo, o.lo);
        mpfr_swap(hi, o.hi);
        return *this;
    }
    ~Iv() {
        mpfr_clear(lo);
        mpfr_clear(hi);
    }

    Enclosure to_enclosure() const {
        return {mpfr_get_d(lo, MPFR_RNDD), mpfr_get_d(hi, MPFR_RNDU)};
    }
    double width() const {
        mpfr_t w;
        mpfr_init2(w, kPrec);
        mpfr_sub(w, hi, lo, MPFR_RNDU);
        const double r = mpfr_get_d(w, MPFR_RNDU);
        mpfr_clear(w);
        return r;
    }
};

Iv operator+(const Iv& a, const Iv& b) {
    Iv r;
    mpfr_add(r.lo, a.lo, b.lo, MPFR_RNDD);
    mpfr_add(r.hi, a.hi, b.hi, MPFR_RNDU);
    return r;
}
Iv operator-(const Iv& a, const Iv& b) {
    Iv r;
    mpfr_sub(r.lo, a.lo, b.hi, MPFR_RNDD);
    mpfr_sub(r.hi, a.hi, b.lo, MPFR_RNDU);
    return r;
}
Iv operator-(const Iv& a) {
    Iv r;
    mpfr_neg(r.lo, a.hi, MPFR_RNDD);
    mpfr_neg(r.hi, a.lo, MPFR_RNDU);
    return r;
}
Iv operator*(const Iv& a, const Iv& b) {
    Iv r;
    mpfr_t c[4];
    for (auto& x : c) mpfr_init2(x, kPrec);
    mpfr_mul(c[0], a.lo, b.lo, MPFR_RNDD);
    mpfr_mul(c[1], a.lo, b.hi, MPFR_RNDD);
    mpfr_mul(c[2], a.hi, b.lo, MPFR_RNDD);
    mpfr_mul(c[3], a.hi, b.hi, MPFR_RNDD);
    mpfr_min(r.lo, c[0], c[1], MPFR_RNDD);
    mpfr_min(r.lo, r.lo, c[2], MPFR_RNDD);
    mpfr_min(r.lo, r.lo, c[3], MPFR_RNDD);
    mpfr_mul(c[0], a.lo, b.lo, MPFR_RNDU);
    mpfr_mul(c[1], a.lo, b.hi, MPFR_RNDU);
    mpfr_mul(c[2], a.hi, b.lo, MPFR_RNDU);
    mpfr_mul(c[3], a.hi, b.hi, MPFR_RNDU);
    mpfr_max(r.hi, c[0], c[1], MPFR_RNDU);
    mpfr_max(r.hi, r.hi, c[2], MPFR_RNDU);
    mpfr_max(r.hi, r.hi, c[3], MPFR_RNDU);
    for (auto& x : c) mpfr_clear(x);
    return r;
}
Iv operator/(const Iv& a, const Iv& b) {
    if (mpfr_sgn(b.lo) <= 0 && mpfr_sgn(b.hi) >= 0)
        throw std::domain_error("audit interval division by zero");
    Iv r;
    mpfr_t c[4];
    for (auto& x : c) mpfr_init2(x, kPrec);
    mpfr_div(c[0], a.lo, b.lo, MPFR_RNDD);
    mpfr_div(c[1], a.lo, b.hi, MPFR_RNDD);
    mpfr_div(c[2], a.hi, b.lo, MPFR_RNDD);
    mpfr_div(c[3], a.hi, b.hi, MPFR_RNDD);
    mpfr_min(r.lo, c[0], c[1], MPFR_RNDD);
    mpfr_min(r.lo, r.lo, c[2], MPFR_RNDD);
    mpfr_min(r.lo, r.lo, c[3], MPFR_RNDD);
    mpfr_div(c[0], a.lo, b.lo, MPFR_RNDU);
    mpfr_div(c[1], a.lo, b.hi, MPFR_RNDU);
    mpfr_div(c[2], a.hi, b.lo, MPFR_RNDU);
    mpfr_div(c[3], a.hi, b.hi, MPFR_RNDU);
    mpfr_max(r.hi, c[0], c[1], MPFR_RNDU);
    mpfr_max(r.hi, r.hi, c[2], MPFR_RNDU);
    mpfr_max(r.hi, r.hi, c[3], MPFR_RNDU);
    for (auto& x : c) mpfr_clear(x);
    return r;
}
Iv& operator+=(Iv& a, const Iv& b) { return a = a + b; }

Iv iv_sqrt(const Iv& a) {
    Iv r;
    mpfr_sqrt(r.lo, a.lo, MPFR_RNDD);
    mpfr_sqrt(r.hi, a.hi, MPFR_RNDU);
    return r;
}
Iv iv_exp(const Iv& a) {
    Iv r;
    mpfr_exp(r.lo, a.lo, MPFR_RNDD);
    mpfr_exp(r.hi, a.hi, MPFR_RNDU);
    return r;
}
Iv iv_log(const Iv& a) {
    Iv r;
    mpfr_log(r.lo, a.lo, MPFR_RNDD);
    mpfr_log(r.hi, a.hi, MPFR_RNDU);
    return r;
}
Iv iv_pi() {
    Iv r;
    mpfr_const_pi(r.lo, MPFR_RNDD);
    mpfr_const_pi(r.hi, MPFR_RNDU);
    return r;
}
// E1(x) = -eint(-x); E1 decreasing, evaluate at both endpoints
Iv iv_e1(const Iv& x) {
    Iv r;
    mpfr_t t;
    mpfr_init2(t, kPrec);
    mpfr_neg(t, x.hi, MPFR_RNDD);
    mpfr_eint(t, t, MPFR_RNDU);  // eint(-hi) rounded up => -E1(hi) up
    mpfr_neg(r.lo, t, MPFR_RNDD);
    mpfr_neg(t, x.lo, MPFR_RNDU);
    mpfr_eint(t, t, MPFR_RNDD);
    mpfr_neg(r.hi, t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}
// point-interval helpers via Lipschitz-1 envelopes
Iv iv_cos(const Iv& x) {
    Iv r;
    mpfr_t c, w;
    mpfr_init2(c, kPrec);
    mpfr_init2(w, kPrec);
    mpfr_cos(c, x.lo, MPFR_RNDD);
    mpfr_sub(w, x.hi, x.lo, MPFR_RNDU);
    mpfr_sub(r.lo, c, w, MPFR_RNDD);
    mpfr_cos(c, x.lo, MPFR_RNDU);
    mpfr_add(r.hi, c, w, MPFR_RNDU);
    mpfr_clear(c);
    mpfr_clear(w);
    return r;
}
Iv iv_j1(const Iv& x) {
    Iv r;
    mpfr_t c, w;
    mpfr_init2(c, kPrec);
    mpfr_init2(w, kPrec);
    mpfr_j1(c, x.lo, MPFR_RNDD);
    mpfr_sub(w, x.hi, x.lo, MPFR_RNDU);
    mpfr_sub(r.lo, c, w, MPFR_RNDD);
    mpfr_j1(c, x.lo, MPFR_RNDU);
    mpfr_add(r.hi, c, w, MPFR_RNDU);
    mpfr_clear(c);
    mpfr_clear(w);
    return r;
}
Iv iv_symmetric(double b) {
    Iv r;
    mpfr_set_d(r.hi, b, MPFR_RNDU);
    mpfr_neg(r.lo, r.hi, MPFR_RNDD);
    return r;
}

// S(m, j; c) in interval arithmetic
Iv iv_kloosterman(int64_t m, int64_t j, int64_t c) {
    if (c == 1) return Iv(1.0);
    const int64_t mr = ((m % c) + c) % c;
    const int64_t jr = ((j % c) + c) % c;
    const Iv step = (Iv(2.0) * iv_pi()) / Iv(c);
    Iv s(0.0);
    for (int64_t k = 1; 2 * k <= c; ++k) {
        if (gcd64(k, c) != 1) continue;
        const int64_t kinv = mod_inverse(k, c);
        const int64_t phase = (mr * k + jr * kinv) % c;
        const Iv t = iv_cos(step * Iv(phase));
        s += (2 * k == c) ? t : Iv(2.0) * t;
    }
    return s;
}

// E1(2 pi n / sqrt M) down to the weight floor
std::vector<Iv> iv_weights(int64_t M) {
    const Iv sqrtM = iv_sqrt(Iv(M));
    const Iv two_pi = Iv(2.0) * iv_pi();
    std::vector<Iv> w;
    for (int64_t n = 1;; ++n) {
        w.push_back(iv_e1(two_pi * Iv(n) / sqrtM));
        if (mpfr_cmp_d(w.back().hi, 1e-22) < 0) break;
        if (n > 10000000) throw std::runtime_error("audit weight runaway");
    }
    return w;
}

// T(d) with the same truncation policy as the primary path
Iv iv_tcal(int64_t d, int64_t m, int64_t M, const std::vector<Iv>& weights) {
    const int64_t minv = d == 1 ? 0 : mod_inverse(M % d, d);
    const Iv sqrtM = iv_sqrt(Iv(M));
    const Iv two_pi = Iv(2.0) * iv_pi();
    const Iv denom = Iv(d) * sqrtM;
    std::vector<Iv> kl_memo(std::max<int64_t>(d, 1), Iv(0.0));
    std::vector<char> have(std::max<int64_t>(d, 1), 0);
    Iv s(0.0);
    for (int64_t n = 1; n <= static_cast<int64_t>(weights.size()); ++n) {
        const int64_t j = d == 1 ? 0 : (minv * (n % d)) % d;
        if (!have[j]) {
            kl_memo[j] = iv_kloosterman(m, j, d);
            have[j] = 1;
        }
        const Iv arg = Iv(2.0) * two_pi * iv_sqrt(Iv(m * n)) / denom;
        s += kl_memo[j] * iv_j1(arg) * weights[n - 1] / iv_sqrt(Iv(n));
    }
    // same n-tail shape as the primary evaluation
    const double w_last = mpfr_get_d(weights.back().hi, MPFR_RNDU);
    const double klmax = std::sqrt(static_cast<double>(m)) *
                         static_cast<double>(divisor_count(d)) * std::sqrt(static_cast<double>(d));
    s += iv_symmetric(detail::step_up(0.6 * klmax * w_last * 1e4, 4));
    return s;
}

Iv first_radius(int64_t m, int64_t M) {
    // m g(m)(86/M + 43/sqrt M); refined 213/M + 97/sqrt M for m = 2
    const Iv Me(M);
    Iv r;
    if (m == 2) {
        r = Iv(213.0) / Me + Iv(97.0) / iv_sqrt(Me);
    } else {
        const double g_hi = g_weight(m).hi;
        r = Iv(static_cast<double>(m)) * Iv(g_hi) * (Iv(86.0) / Me + Iv(43.0) / iv_sqrt(Me));
    }
    Iv sym;
    mpfr_set(sym.hi, r.hi, MPFR_RNDU);
    mpfr_neg(sym.lo, r.hi, MPFR_RNDD);
    return sym;
}

Iv iv_moment_plus(int64_t m, int64_t M, BoundMode mode) {
    const Iv Me(M);
    const Iv sqrtM = iv_sqrt(Me);
    const Iv two_pi = Iv(2.0) * iv_pi();
    const Iv main = iv_e1(two_pi * Iv(m) / sqrtM);
    if (mode == BoundMode::first) return main + first_radius(m, M);

    if (M < 1000) throw std::invalid_argument("audit: improved mode needs level >= 1000");
    const int64_t f = cutoff_f(M);
    const std::vector<Iv> weights = iv_weights(M);
    Iv small(0.0);
    for (int64_t d = 1; d <= 30; ++d) {
        if (gcd64(d, M) != 1) continue;
        small += iv_tcal(d, m, M, weights) / Iv(d);
    }
    const Iv small_term = -(two_pi * iv_sqrt(Iv(m)) / sqrtM) * small;

    Iv pv_sum(0.0);
    for (int64_t d = 31; d <= f; ++d) pv_sum += (iv_log(Iv(d)) + Iv(1.5)) / Iv(d);
    const Iv E1_first = iv_e1(two_pi / sqrtM);
    Iv radius = Iv(16.0 * static_cast<double>(m)) / Me * E1_first * pv_sum;

    if (m == 1) {
        radius += two_pi / sqrtM * Iv(tau_suffix_all(f));
    } else {
        const Iv s2 = iv_sqrt(Iv(2.0));
        radius += two_pi * s2 / sqrtM *
                  (s2 * Iv(tau_suffix_all(f)) +
                   (Iv(1.0) + Iv(1.0) / s2 - s2) * Iv(tau_suffix_even(f)));
    }
    radius += Iv(1e-4 * (m == 1 ? 43.0 : 97.0)) / sqrtM;
    radius += Iv(m == 1 ? 86.0 : 213.0) / Me;

    Iv sym;
    mpfr_set(sym.hi, radius.hi, MPFR_RNDU);
    mpfr_neg(sym.lo, radius.hi, MPFR_RNDD);
    return main + small_term + sym;
}

Iv iv_moment_minus(int64_t m, int64_t N) {
    const Iv sqrtN = iv_sqrt(Iv(N));
    const Iv two_pi = Iv(2.0) * iv_pi();
    return iv_exp(-(two_pi * Iv(m) / sqrtN)) + first_radius(m, N);
}

Iv iv_moment_square_new(int64_t m, int64_t N, BoundMode mode) {
    const Iv inv = Iv(1.0) / Iv(N - 1);
    const Iv half_log = iv_log(Iv(N)) / Iv(2.0);
    return iv_moment_plus(m, N * N, mode) -
           inv * (iv_moment_plus(m, N, BoundMode::first) + half_log * iv_moment_minus(m, N));
}

}  // namespace

Enclosure moment_plus(int64_t m, int64_t M, BoundMode mode) {
    return iv_moment_plus(m, M, mode).to_enclosure();
}
Enclosure moment_minus(int64_t m, int64_t N) { return iv_moment_minus(m, N).to_enclosure(); }
Enclosure moment_square_new(int64_t m, int64_t N, BoundMode mode) {
    return iv_moment_square_new(m, N, mode).to_enclosure();
}

bool certify_at(ConditionKind kind, Family family, BoundMode mode, int64_t N) {
    if (!is_prime(N)) throw std::invalid_argument("audit::certify_at: N must be prime");
    auto a = [&](int64_t m) {
        return family == Family::x0plus ? iv_moment_plus(m, N, mode)
                                        : iv_moment_square_new(m, N, mode);
    };
    const Iv a1 = a(1);
    if (kind == ConditionKind::A1Positive) return mpfr_sgn(a1.lo) > 0;
    const Iv a2 = a(2);
    if (kind == ConditionKind::A2Positive) return mpfr_sgn(a2.lo) > 0;
    if (mpfr_sgn(a1.lo) <= 0) return false;
    const Iv ratio = a2 / a1;
    return mpfr_sgn(ratio.lo) > 0 && mpfr_cmp_d(ratio.hi, 1.0) < 0;
}

namespace {

Enclosure series_value_audit(const NewformRecord& r, int64_t T, bool derivative) {
    const int64_t M = r.level;
    if (T <= 0) T = static_cast<int64_t>(std::ceil(8.0 * std::sqrt(static_cast<double>(M))));
    const std::vector<Enclosure> a = record_coefficients(r, T);
    const Iv sqrtM = iv_sqrt(Iv(M));
    const Iv two_pi = Iv(2.0) * iv_pi();
    Iv s(0.0);
    for (int64_t n = 1; n <= T; ++n) {
        const Iv x = two_pi * Iv(n) / sqrtM;
        const Iv w = derivative ? iv_e1(x) : iv_exp(-x);
        if (mpfr_cmp_d(w.hi, 1e-30) < 0) break;
        Iv an;
        mpfr_set_d(an.lo, a[n - 1].lo, MPFR_RNDD);
        mpfr_set_d(an.hi, a[n - 1].hi, MPFR_RNDU);
        s += an / Iv(n) * w;
    }
    return (Iv(2.0) * s + iv_symmetric(series_tail_bound(M, T))).to_enclosure();
}

}  // namespace

Enclosure lprime_at_1(const NewformRecord& r, int64_t T) {
    if (r.fricke_sign != 1) throw std::invalid_argument("audit::lprime_at_1: sign must be +1");
    return series_value_audit(r, T, true);
}
Enclosure l_at_1(const NewformRecord& r, int64_t T) {
    if (r.fricke_sign != -1) throw std::invalid_argument("audit::l_at_1: sign must be -1");
    return series_value_audit(r, T, false);
}

}  // namespace nvcert::audit
