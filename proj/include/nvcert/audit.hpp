#pragma once

#include <cstdint>

#include "nvcert/data.hpp"
#include "nvcert/enclosure.hpp"
#include "nvcert/thresholds.hpp"

namespace nvcert::audit {

// Independent recomputation of the certification quantities in 200-bit
// interval arithmetic (MPFR with directed rounding).  The special functions
// come straight from MPFR (eint, j1, cos), not from this library's series,
// so agreement is a genuine cross-check.

Enclosure moment_plus(int64_t m, int64_t M, BoundMode mode);
Enclosure moment_minus(int64_t m, int64_t N);
Enclosure moment_square_new(int64_t m, int64_t N, BoundMode mode);

bool certify_at(ConditionKind kind, Family family, BoundMode mode, int64_t N);

Enclosure lprime_at_1(const NewformRecord& r, int64_t T = 0);
Enclosure l_at_1(const NewformRecord& r, int64_t T = 0);

}  // namespace nvcert::audit
