#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace nvcert {

// Outward-rounded interval [lo, hi] guaranteed to contain the exact value.
// All arithmetic widens by one ulp per endpoint operation; library
// transcendentals (exp, log, cos) are widened by a few ulps to cover their
// documented worst-case error.
struct Enclosure {
    double lo = 0.0;
    double hi = 0.0;

    Enclosure() = default;
    constexpr Enclosure(double exact) : lo(exact), hi(exact) {}
    constexpr Enclosure(double l, double h) : lo(l), hi(h) {}

    static Enclosure exact(double v) { return {v, v}; }
    // symmetric error term [-b, b], the O_1(b) of the estimates
    static Enclosure symmetric(double b) { return {-b, b}; }

    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    double rad() const { return 0.5 * width(); }
    double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }

    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Enclosure& o) const { return lo <= o.lo && o.hi <= hi; }
    bool strictly_positive() const { return lo > 0.0; }
    bool strictly_negative() const { return hi < 0.0; }
    bool valid() const { return lo <= hi && std::isfinite(lo) && std::isfinite(hi); }
};

namespace detail {

inline double next_up(double x) {
    return std::nextafter(x, std::numeric_limits<double>::infinity());
}
inline double next_down(double x) {
    return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double step_up(double x, int n) {
    for (int i = 0; i < n; ++i) x = next_up(x);
    return x;
}
inline double step_down(double x, int n) {
    for (int i = 0; i < n; ++i) x = next_down(x);
    return x;
}

}  // namespace detail

inline Enclosure operator+(const Enclosure& a, const Enclosure& b) {
    return {detail::next_down(a.lo + b.lo), detail::next_up(a.hi + b.hi)};
}
inline Enclosure operator-(const Enclosure& a, const Enclosure& b) {
    return {detail::next_down(a.lo - b.hi), detail::next_up(a.hi - b.lo)};
}
inline Enclosure operator-(const Enclosure& a) { return {-a.hi, -a.lo}; }

inline Enclosure operator*(const Enclosure& a, const Enclosure& b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    const double lo = std::min(std::min(p1, p2), std::min(p3, p4));
    const double hi = std::max(std::max(p1, p2), std::max(p3, p4));
    return {detail::next_down(lo), detail::next_up(hi)};
}

inline Enclosure operator/(const Enclosure& a, const Enclosure& b) {
    if (b.contains(0.0)) throw std::domain_error("enclosure division by interval containing 0");
    const double p1 = a.lo / b.lo, p2 = a.lo / b.hi, p3 = a.hi / b.lo, p4 = a.hi / b.hi;
    const double lo = std::min(std::min(p1, p2), std::min(p3, p4));
    const double hi = std::max(std::max(p1, p2), std::max(p3, p4));
    return {detail::next_down(lo), detail::next_up(hi)};
}

inline Enclosure& operator+=(Enclosure& a, const Enclosure& b) { return a = a + b; }
inline Enclosure& operator-=(Enclosure& a, const Enclosure& b) { return a = a - b; }
inline Enclosure& operator*=(Enclosure& a, const Enclosure& b) { return a = a * b; }
inline Enclosure& operator/=(Enclosure& a, const Enclosure& b) { return a = a / b; }

inline Enclosure hull(const Enclosure& a, const Enclosure& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}
inline Enclosure intersect(const Enclosure& a, const Enclosure& b) {
    Enclosure r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
    if (r.lo > r.hi) throw std::domain_error("empty enclosure intersection");
    return r;
}

inline Enclosure sqrt(const Enclosure& a) {
    if (a.lo < 0.0) throw std::domain_error("sqrt of interval with negative part");
    // std::sqrt is correctly rounded
    return {detail::next_down(std::sqrt(a.lo)), detail::next_up(std::sqrt(a.hi))};
}

inline Enclosure exp(const Enclosure& a) {
    return {detail::step_down(std::exp(a.lo), 3), detail::step_up(std::exp(a.hi), 3)};
}

inline Enclosure log(const Enclosure& a) {
    if (a.lo <= 0.0) throw std::domain_error("log of interval touching (-inf,0]");
    return {detail::step_down(std::log(a.lo), 3), detail::step_up(std::log(a.hi), 3)};
}

inline Enclosure pi_enclosure() {
    // double(pi) rounds down
    const double p = 3.14159265358979323846;
    return {p, detail::next_up(p)};
}
inline Enclosure two_pi_enclosure() { return pi_enclosure() * Enclosure(2.0); }

inline Enclosure euler_gamma_enclosure() {
    const double g = 0.57721566490153286061;
    return {detail::next_down(g), detail::next_up(g)};
}

// cos over an interval; handles interior extrema by checking multiples of pi
inline Enclosure cos(const Enclosure& a) {
    if (a.width() >= 2.0 * 3.14159265358979323846) return {-1.0, 1.0};
    const double cl = std::cos(a.lo), ch = std::cos(a.hi);
    double lo = std::min(cl, ch), hi = std::max(cl, ch);
    // conservative test for an interior extremum at k*pi
    const double pid = 3.14159265358979323846;
    const double k_lo = std::floor(a.lo / pid - 1e-9);
    const double k_hi = std::floor(a.hi / pid + 1e-9);
    if (k_hi > k_lo) {
        // at least one multiple of pi may lie inside
        for (double k = k_lo; k <= k_hi + 0.5; k += 1.0) {
            const double m = k * pid;
            if (m >= a.lo - 1e-9 && m <= a.hi + 1e-9) {
                const long long ki = static_cast<long long>(std::llround(k));
                if (ki % 2 == 0) hi = 1.0; else lo = -1.0;
            }
        }
    }
    return {std::max(-1.0, detail::step_down(lo, 3)), std::min(1.0, detail::step_up(hi, 3))};
}

inline std::string to_string(const Enclosure& a) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", a.lo, a.hi);
    return buf;
}

}  // namespace nvcert
