#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nvcert/arith.hpp"
#include "nvcert/moments.hpp"
#include "nvcert/special.hpp"

using namespace nvcert;

namespace {

bool subset(const Enclosure& inner, const Enclosure& outer, double slop = 0.0) {
    return inner.lo >= outer.lo - slop && inner.hi <= outer.hi + slop;
}

}  // namespace

TEST_CASE("scal_bound closed forms") {
    // c = M: B = 2 sqrt(mM) tau(1) f(1) / sqrt(M) = 2 sqrt(m)
    for (int m : {1, 2}) {
        const Enclosure b = scal_bound(389, m, 389);
        CHECK(b.lo == doctest::Approx(-2.0 * std::sqrt(double(m))).epsilon(1e-12));
        CHECK(b.hi == doctest::Approx(2.0 * std::sqrt(double(m))).epsilon(1e-12));
    }
    // refined m=2, c=2M: B = (sqrt2+2) sqrt(M) tau(2) / sqrt(2M) = 2(1 + sqrt 2)
    const Enclosure r = scal_bound(2 * 389, 2, 389);
    CHECK(r.hi == doctest::Approx(4.82842712474619009760).epsilon(1e-12));
    CHECK(r.lo == doctest::Approx(-4.82842712474619009760).epsilon(1e-12));
    // decreasing in c at fixed tau(c/M)
    CHECK(scal_bound(3 * 389, 1, 389).hi > scal_bound(5 * 389, 1, 389).hi);
    CHECK_THROWS_AS(scal_numeric(390, 1, 389), std::invalid_argument);
}

TEST_CASE("tcal_bound closed forms") {
    CHECK(tcal_bound(1, 1).hi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tcal_bound(1, 2).hi == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    // refined m=2, d even: (1 + 1/sqrt2) tau(d) / sqrt(d); d=2 gives 1 + sqrt 2
    CHECK(tcal_bound(2, 2).hi == doctest::Approx(2.41421356237309504880).epsilon(1e-12));
    // refined constant beats the generic Weil form tau(2) sqrt(2) f(2) / sqrt(2)
    CHECK(tcal_bound(2, 2).hi < 2.0 * f_weight(2).hi + 1e-12);
}

TEST_CASE("tcal_numeric at d=1 lands in [0.4 sqrt m, sqrt m]") {
    for (int m : {1, 2}) {
        const Enclosure t = tcal_numeric(1, m, 1009);
        const double s = std::sqrt(double(m));
        CHECK(t.lo > 0.4 * s);
        CHECK(t.hi < s);
    }
}

TEST_CASE("tcal_numeric oversummed agreement and Weil containment") {
    const Enclosure a = tcal_numeric(3, 1, 389);
    const Enclosure b = tcal_numeric(3, 1, 389, 1000000);
    CHECK(std::fabs(a.mid() - b.mid()) < a.rad() + b.rad() + 1e-12);
    CHECK(subset(a, tcal_bound(3, 1)));
    CHECK_THROWS_AS(tcal_numeric(389, 1, 389), std::invalid_argument);
}

TEST_CASE("scal_numeric agreement, containment, early-out") {
    const Enclosure a = scal_numeric(389, 1, 389, 10000);
    const Enclosure b = scal_numeric(389, 1, 389, 1000000);
    CHECK(std::fabs(a.mid() - b.mid()) < a.rad() + b.rad() + 1e-12);
    CHECK(subset(a, scal_bound(389, 1, 389)));
    // huge c/M: every weight is below the cut, so the enclosure is a tiny
    // symmetric tail without any explicit terms
    const Enclosure tiny = scal_numeric(389 * 3999971, 1, 389);
    CHECK(tiny.hi < 1e-2);
    CHECK(tiny.lo > -1e-2);
    CHECK(tiny.contains(0.0));
}

TEST_CASE("sum_bounds_first radii match the stated constants") {
    const auto [s1, t1] = sum_bounds_first(1, 10000);
    const Enclosure g1 = g_weight(1);
    CHECK(s1.hi == doctest::Approx((Enclosure(86.0) * g1 / Enclosure(10000.0)).hi).epsilon(1e-14));
    CHECK(t1.hi == doctest::Approx((Enclosure(43.0) * g1 / Enclosure(100.0)).hi).epsilon(1e-14));
    CHECK(s1.lo == -s1.hi);
    CHECK(t1.lo == -t1.hi);
    const auto [s2, t2] = sum_bounds_first(2, 10000);
    CHECK(s2.hi == doctest::Approx(213.0 / 10000.0).epsilon(1e-12));
    CHECK(t2.hi == doctest::Approx(97.0 / 100.0).epsilon(1e-12));
    // radii scale as 1/M and 1/sqrt(M)
    const auto [s1b, t1b] = sum_bounds_first(1, 40000);
    CHECK(s1b.hi == doctest::Approx(s1.hi / 4.0).epsilon(1e-12));
    CHECK(t1b.hi == doctest::Approx(t1.hi / 2.0).epsilon(1e-12));
}

TEST_CASE("pv_partial_bound values and monotonicity") {
    CHECK(pv_partial_bound(2) == doctest::Approx(1.77769814588951626860).epsilon(1e-13));
    CHECK(pv_partial_bound(10) == doctest::Approx(15.4112969009146302008).epsilon(1e-13));
    double prev = pv_partial_bound(2);
    for (int d = 3; d <= 40; ++d) {
        const double cur = pv_partial_bound(d);
        CHECK(cur > prev);
        prev = cur;
    }
    CHECK_THROWS_AS(pv_partial_bound(1), std::invalid_argument);
}

TEST_CASE("cutoff_f value, regime floor, monotonic trend") {
    CHECK(cutoff_f(10000) == 315);
    CHECK_THROWS_AS(cutoff_f(999), std::invalid_argument);
    int64_t prev = 0;
    for (int64_t n : primes_in(1009, 20000)) {
        const int64_t f = cutoff_f(n);
        CHECK(f >= prev);
        prev = f;
    }
}

TEST_CASE("moment_plus_bound thresholds") {
    CHECK(moment_plus_bound(1, 1213, BoundMode::first).normalized.lo > 0.0);
    CHECK(moment_plus_bound(1, 1201, BoundMode::first).normalized.lo <= 0.0);
    CHECK(moment_plus_bound(1, 8641, BoundMode::improved).normalized.lo > 0.0);
    CHECK_THROWS_AS(moment_plus_bound(3, 1213, BoundMode::first), std::invalid_argument);
    CHECK_THROWS_AS(moment_plus_bound(1, 389, BoundMode::improved), std::invalid_argument);
}

TEST_CASE("moment_plus_bound first-mode radius is the closed form") {
    for (int m : {1, 2}) {
        const int64_t M = 4001;
        const MomentEstimate est = moment_plus_bound(m, M, BoundMode::first);
        double expect;
        if (m == 1) {
            const Enclosure g = g_weight(1);
            expect = (g * (Enclosure(86.0) / Enclosure(double(M)) +
                           Enclosure(43.0) / sqrt(Enclosure(double(M))))).hi;
        } else {
            expect = 213.0 / double(M) + 97.0 / std::sqrt(double(M));
        }
        CHECK(est.error_radius == doctest::Approx(expect).epsilon(1e-10));
        // main term is E1(2 pi m / sqrt M)
        const Enclosure e = e1(two_pi_enclosure() * Enclosure(double(m)) /
                               sqrt(Enclosure(double(M))));
        CHECK(std::fabs(est.main_term.mid() - e.mid()) < 1e-14);
    }
}

TEST_CASE("moment_minus_bound shape") {
    const MomentEstimate est = moment_minus_bound(1, 10007);
    CHECK(est.main_term.mid() == doctest::Approx(std::exp(-2.0 * M_PI / std::sqrt(10007.0))).epsilon(1e-6));
    const Enclosure g = g_weight(1);
    const double expect = (g * (Enclosure(86.0) / Enclosure(10007.0) +
                                Enclosure(43.0) / sqrt(Enclosure(10007.0)))).hi;
    CHECK(est.error_radius == doctest::Approx(expect).epsilon(1e-10));
    // large N: the enclosure closes in on 1
    const MomentEstimate big = moment_minus_bound(1, 999999937);
    CHECK(big.normalized.lo > 0.99);
    CHECK(big.normalized.hi < 1.01);
}

TEST_CASE("moment_square_new_bound thresholds") {
    CHECK(moment_square_new_bound(1, 47, BoundMode::first).normalized.lo > 0.0);
    CHECK(moment_square_new_bound(1, 43, BoundMode::first).normalized.lo <= 0.0);
    CHECK(moment_square_new_bound(2, 97, BoundMode::first).normalized.lo > 0.0);
    CHECK(moment_square_new_bound(2, 89, BoundMode::first).normalized.lo <= 0.0);
    CHECK(moment_square_new_bound(2, 71, BoundMode::improved).normalized.lo > 0.0);
    CHECK(moment_square_new_bound(2, 67, BoundMode::improved).normalized.lo <= 0.0);
}

TEST_CASE("moment_square_new_bound main term is the three-term expression") {
    const int64_t N = 101;
    const MomentEstimate est = moment_square_new_bound(1, N, BoundMode::first);
    const Enclosure n{double(N), double(N)};
    const Enclosure x_new = two_pi_enclosure() / n;
    const Enclosure x_old = two_pi_enclosure() / sqrt(n);
    const Enclosure main = e1(x_new) - e1(x_old) / (n - Enclosure(1.0)) -
                           log(n) * exp(-x_old) / (Enclosure(2.0) * (n - Enclosure(1.0)));
    CHECK(std::fabs(est.main_term.mid() - main.mid()) < 1e-13);
    REQUIRE(est.corrections.size() == 2);
    // zero correction radii collapse the estimate onto the main term
    Enclosure collapsed = est.main_term;
    CHECK(std::fabs(collapsed.mid() - est.normalized.mid()) <= est.error_radius + 1e-13);
}

TEST_CASE("moment_numeric vs closed-form bound, nesting, stability") {
    TailParams a;
    a.c_max = 60 * 389;
    a.d_max = 3000;
    TailParams b;
    b.c_max = 120 * 389;
    b.d_max = 6000;
    const MomentEstimate ea = moment_numeric(1, 389, a);
    const MomentEstimate eb = moment_numeric(1, 389, b);
    const MomentEstimate fb = moment_plus_bound(1, 389, BoundMode::first);
    CHECK(subset(ea.normalized, fb.normalized));
    CHECK(subset(eb.normalized, fb.normalized));
    // doubled truncation never widens, and the refinement stays nested
    CHECK(subset(eb.normalized, ea.normalized, 1e-12));
    CHECK(eb.normalized.width() <= ea.normalized.width());
    // self-convergence of the midpoint between the two budget levels
    CHECK(std::fabs(ea.normalized.mid() - eb.normalized.mid()) < 1e-4);
}

TEST_CASE("tau suffix bounds decrease and dominate samples") {
    CHECK(tau_suffix_all(100) > tau_suffix_all(1000));
    CHECK(tau_suffix_all(1000) > tau_suffix_all(100000));
    CHECK(tau_suffix_even(100) < tau_suffix_all(100));
    // crude lower bound: the first dropped term alone
    const double first_term = double(divisor_count(101)) / std::pow(101.0, 1.5);
    CHECK(tau_suffix_all(100) > first_term);
}
