#pragma once

#include "nvcert/enclosure.hpp"

namespace nvcert {

// Exponential integral E1(x) = \int_x^\infty e^{-t}/t dt, x > 0.
// Alternating series for x <= 6, continued fraction bracketed by consecutive
// convergents for 6 < x <= 50, simple sandwich e^{-x}/(x+1) <= E1 <= e^{-x}/x
// beyond.
Enclosure e1(double x);
Enclosure e1(const Enclosure& x);

// Bessel function J1(x) for x >= 0.  Power series summed in double-double
// precision with a certified roundoff bound for x <= 50; clamped against the
// global bound |J1| <= 1 and the asymptotic envelope beyond.
Enclosure bessel_j1(double x);
Enclosure bessel_j1(const Enclosure& x);

// zeta(3/2)^2, used in the divisor-sum tail bounds.
Enclosure const_zeta32_squared();
Enclosure const_zeta32();

}  // namespace nvcert
