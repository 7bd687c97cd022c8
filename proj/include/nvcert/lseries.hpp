#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nvcert/data.hpp"
#include "nvcert/enclosure.hpp"

namespace nvcert {

struct NonvanishingCertificate {
    std::string label;
    Enclosure value;
    enum class V { nonzero, inconclusive } verdict = V::inconclusive;
    int64_t truncation = 0;
    double tail_bound = 0.0;
};

// fill a_1..a_T from prime coefficients by Hecke multiplicativity
std::vector<double> expand_coefficients(const std::map<int64_t, double>& ap, int64_t level,
                                        int64_t T);

// coefficient list for a record up to T (expanding prime lists on demand)
std::vector<Enclosure> record_coefficients(const NewformRecord& r, int64_t T);

// L'(f,1) = 2 sum a_n / n E1(2 pi n / sqrt M), Fricke sign +1
Enclosure lprime_at_1(const NewformRecord& r, int64_t T = 0);

// L(f,1) = 2 sum a_n / n e^{-2 pi n / sqrt M}, Fricke sign -1
Enclosure l_at_1(const NewformRecord& r, int64_t T = 0);

// certified tail bound for the truncated series at level M beyond T
double series_tail_bound(int64_t M, int64_t T);

NonvanishingCertificate certify_nonvanishing(const NewformRecord& r, int64_t max_T = 0);

enum class LevelVerdict { theorem2_holds, fails_to_certify, insufficient_data };

// Sum of orbit sizes over orbits with certified nonzero L' must reach 2.
// `records` must cover every Galois orbit of the +1-Fricke (new) subspace at
// the level; `expected_dim` (sum of orbit sizes = dim) enforces coverage when
// nonnegative.
LevelVerdict level_verdict(const std::vector<NewformRecord>& records,
                           int64_t expected_dim = -1,
                           std::vector<NonvanishingCertificate>* certs = nullptr);

enum class Exclusion { excluded, not_excluded };

// one-curve exclusion: the curve's L'(E,1)/||f_E||^2 cannot exhaust the
// certified moment lower bound, so a second nonvanishing form must exist
Exclusion single_curve_exclusion(const CurveRecord& curve, const Enclosure& moment_lower);

}  // namespace nvcert
