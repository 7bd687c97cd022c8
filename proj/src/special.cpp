#include "nvcert/special.hpp"

#include <mpfr.h>

#include <cmath>
#include <vector>

namespace nvcert {

namespace {

// E1 by the alternating series  -gamma - log x + sum_{k>=1} (-1)^{k+1} x^k / (k k!).
// The tail after truncation is bounded by the first omitted term once terms
// decrease, which holds for k >= x.
Enclosure e1_series(double x) {
    const Enclosure xe(x);
    Enclosure sum(0.0);
    Enclosure term(1.0);  // x^k / k!
    int k = 1;
    for (;; ++k) {
        term *= xe / Enclosure(static_cast<double>(k));
        const Enclosure contrib = term / Enclosure(static_cast<double>(k));
        if (k % 2 == 1)
            sum += contrib;
        else
            sum -= contrib;
        if (k > x + 2.0 && contrib.mag() < 1e-20) {
            // next term bounds the remainder
            const double next = contrib.mag() * x;
            sum += Enclosure::symmetric(next);
            break;
        }
        if (k > 500) throw std::runtime_error("e1 series did not converge");
    }
    return sum - euler_gamma_enclosure() - log(Enclosure(x));
}

// E1 continued fraction (Stieltjes form):
//   E1(x) = e^{-x} / (x + 1/(1 + 1/(x + 2/(1 + 2/(x + 3/(1 + 3/(x + ...)))))))
// Successive truncation depths bracket the value; we take the hull of two
// consecutive depths evaluated in interval arithmetic.
Enclosure e1_cf_depth(double x, int depth) {
    const Enclosure xe(x);
    Enclosure t = xe;  // innermost tail approximated by x
    for (int k = depth; k >= 1; --k) {
        const Enclosure ke(static_cast<double>(k));
        t = Enclosure(1.0) + ke / t;
        t = xe + ke / t;
    }
    return exp(-xe) / t;
}

Enclosure e1_cf(double x) {
    const int n = 60;
    return hull(e1_cf_depth(x, n), e1_cf_depth(x, n + 1));
}

// ---- double-double helpers (error-free transforms) ----

struct DD {
    double hi = 0.0, lo = 0.0;
};

inline DD two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    const double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DD two_prod(double a, double b) {
    const double p = a * b;
    const double err = std::fma(a, b, -p);
    return {p, err};
}

inline DD dd_add(DD a, DD b) {
    DD s = two_sum(a.hi, b.hi);
    const double lo = s.lo + a.lo + b.lo;
    DD r = two_sum(s.hi, lo);
    return r;
}

inline DD dd_mul(DD a, DD b) {
    DD p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return two_sum(p.hi, p.lo);
}

inline DD dd_div(DD a, double b) {
    const double q1 = a.hi / b;
    DD p = two_prod(q1, b);
    const double r = ((a.hi - p.hi) - p.lo + a.lo) / b;
    return two_sum(q1, r);
}

// J1 power series at a point, double-double accumulation.
// J1(x) = sum_{k>=0} (-1)^k (x/2)^{2k+1} / (k! (k+1)!).
Enclosure j1_series(double x) {
    const double h = x / 2.0;
    DD hh = two_prod(h, h);      // (x/2)^2
    DD term{h, 0.0};             // (x/2)^{2k+1} / (k!(k+1)!)
    DD sum = term;
    double abs_sum = std::fabs(h);  // sum of |terms|, for the roundoff bound
    double max_term = std::fabs(h);
    int k = 1;
    for (;; ++k) {
        term = dd_mul(term, hh);
        term = dd_div(term, static_cast<double>(k));
        term = dd_div(term, static_cast<double>(k + 1));
        if (k % 2 == 1)
            sum = dd_add(sum, {-term.hi, -term.lo});
        else
            sum = dd_add(sum, term);
        const double t = std::fabs(term.hi);
        abs_sum += t;
        max_term = std::max(max_term, t);
        if (k > h && t < 1e-24) {
            break;  // alternating + decreasing: remainder <= t
        }
        if (k > 400) throw std::runtime_error("j1 series did not converge");
    }
    // Roundoff: each DD op is accurate to ~2^-104 relative; a generous global
    // bound is abs_sum * 64 * 2^-104, plus the truncation remainder.
    const double roundoff = abs_sum * 64.0 * 0x1p-104;
    const double trunc = std::fabs(term.hi) + std::fabs(term.lo);
    const double err = roundoff + trunc + 4.0 * 0x1p-104 * std::max(1.0, max_term);
    Enclosure r = Enclosure(sum.hi) + Enclosure(sum.lo) + Enclosure::symmetric(err);
    return intersect(r, Enclosure(-1.0, 1.0));
}

}  // namespace

Enclosure e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("e1 requires x > 0");
    if (x <= 4.0) return e1_series(x);
    if (x <= 50.0) return e1_cf(x);
    // sandwich: e^{-x}/(x+1) < E1(x) < e^{-x}/x
    const Enclosure ex = exp(Enclosure(-x));
    return {(ex / Enclosure(x + 1.0)).lo, (ex / Enclosure(x)).hi};
}

Enclosure e1(const Enclosure& x) {
    // E1 is decreasing
    const Enclosure a = e1(x.hi), b = e1(x.lo);
    return {a.lo, b.hi};
}

namespace {

// larger arguments: mpfr_j1 with directed rounding at 120 bits
Enclosure j1_mpfr(double x) {
    mpfr_t t, r;
    mpfr_init2(t, 120);
    mpfr_init2(r, 120);
    mpfr_set_d(t, x, MPFR_RNDN);  // exact
    mpfr_j1(r, t, MPFR_RNDD);
    const double lo = mpfr_get_d(r, MPFR_RNDD);
    mpfr_j1(r, t, MPFR_RNDU);
    const double hi = mpfr_get_d(r, MPFR_RNDU);
    mpfr_clear(t);
    mpfr_clear(r);
    return {lo, hi};
}

}  // namespace

Enclosure bessel_j1(double x) {
    if (x < 0.0) throw std::domain_error("bessel_j1 requires x >= 0");
    // the DD series loses accuracy to cancellation once terms reach ~1e8
    if (x <= 20.0) return j1_series(x);
    return j1_mpfr(x);
}

Enclosure bessel_j1(const Enclosure& x) {
    const Enclosure at_mid = bessel_j1(x.mid());
    // |J1'| <= 1 everywhere
    return at_mid + Enclosure::symmetric(detail::next_up(x.rad()));
}

Enclosure const_zeta32() {
    // partial sum to K plus an integral-comparison tail around K + 1/2:
    //   sum_{n>K} n^{-3/2} in [ I - corr, I ],  I = 2 (K+1/2)^{-1/2},
    // with corr = (f''(K+1/2)/24 - ...) absorbed conservatively.
    static Enclosure cached{0.0, -1.0};
    if (cached.valid()) return cached;
    const int K = 20000;
    Enclosure s(0.0);
    for (int n = K; n >= 1; --n) {
        const Enclosure ne(static_cast<double>(n));
        s += Enclosure(1.0) / (ne * sqrt(ne));
    }
    const Enclosure c(K + 0.5);
    const Enclosure integral = Enclosure(2.0) / sqrt(c);
    // Euler-Maclaurin midpoint correction: tail in [I - f''(c)/24 term, I];
    // f''(t) = (15/4) t^{-7/2}, so the defect is below (1/24)(15/4) c^{-5/2}.
    const Enclosure c2 = c * c;
    const Enclosure corr = Enclosure(15.0 / 96.0) / (c2 * sqrt(c));
    Enclosure tail{(integral - corr).lo, integral.hi};
    cached = s + tail;
    return cached;
}

Enclosure const_zeta32_squared() {
    const Enclosure z = const_zeta32();
    return z * z;
}

}  // namespace nvcert
