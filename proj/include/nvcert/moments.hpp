#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nvcert/enclosure.hpp"

namespace nvcert {

enum class BoundMode { first, improved };

// truncation budget for the numeric trace-formula evaluation
struct TailParams {
    int64_t c_max = 0;         // 0 -> 200 * M
    int64_t d_max = 0;         // 0 -> max(10^4, 2 * cutoff_f(M)) when in regime
    double weight_cut = 1e-18; // stop the inner n-sum when the E1/exp weight drops below
    int jobs = 0;              // worker threads for the d-sum; 0 -> hardware
};

struct MomentEstimate {
    Enclosure normalized;  // <a_m, L'>_M / 4pi (or <a_m, L>_N^- / 4pi)
    Enclosure main_term;
    std::vector<std::pair<std::string, Enclosure>> corrections;
    double error_radius = 0.0;
    std::string mode;
};

// S(c) = sum_n S(m,n;c) J1(4pi sqrt(mn)/c) E1(2pi n/sqrt M)/sqrt n, M | c
Enclosure scal_numeric(int64_t c, int64_t m, int64_t M, int64_t n_budget = 0);
// Weil bound |S(c)| <= 2 sqrt(mM) tau(c/M) f((m,c)) / sqrt(c); refined for m=2
Enclosure scal_bound(int64_t c, int64_t m, int64_t M);

// T(d) = sum_n S(m, n M^{-1}; d) J1(4pi sqrt(mn)/(d sqrt M)) E1(2pi n/sqrt M)/sqrt n
Enclosure tcal_numeric(int64_t d, int64_t m, int64_t M, int64_t n_budget = 0);
// |T(d)| <= tau(d) sqrt(m) f((m,d)) / sqrt(d); refined for m=2, d even
Enclosure tcal_bound(int64_t d, int64_t m);

// symmetric enclosures for the lumped c-sum and d-sum error terms:
// radii m g(m) 86/M and m g(m) 43/sqrt(M); for m=2 the refined 213/M, 97/sqrt(M)
std::pair<Enclosure, Enclosure> sum_bounds_first(int64_t m, int64_t M);

// |sum_{n=K}^{K'} S(m, nk; d)| <= (4d/pi^2)(log d + 1.5), k invertible mod d
double pv_partial_bound(int64_t d);

// crossover between the partial-sum bound and the Weil tail:
// floor(level / (6.25 E1(2pi/sqrt(level))^2)); requires level >= 1000
int64_t cutoff_f(int64_t level);

// <a_m, L'>_M^+ / 4pi for prime M, m in {1,2}
MomentEstimate moment_plus_bound(int64_t m, int64_t M, BoundMode mode);

// <a_m, L>_N^- / 4pi for prime N
MomentEstimate moment_minus_bound(int64_t m, int64_t N);

// <a_m, L'>_{N^2}^{+,new} / 4pi via the old/new orthogonality correction
MomentEstimate moment_square_new_bound(int64_t m, int64_t N, BoundMode mode);

// direct trace-formula evaluation with Weil-bounded tails; level M prime
MomentEstimate moment_numeric(int64_t m, int64_t M, const TailParams& tail = {});

// upper bound on sum_{d > f} tau(d) w(d) / d^{3/2}, w = 1 (all) or
// the refined m=2 weighting; used by the improved-mode Weil tail
double tau_suffix_all(int64_t f);
double tau_suffix_even(int64_t f);

}  // namespace nvcert
