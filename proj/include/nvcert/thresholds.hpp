#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "nvcert/moments.hpp"

namespace nvcert {

enum class ConditionKind { A1Positive, A2Positive, RatioInUnitInterval };
enum class Family { x0plus, xnsplus };

enum class Verdict { certified, inconclusive };

struct ThresholdReport {
    ConditionKind kind;
    Family family;
    BoundMode mode;
    int64_t min_certified_prime = 0;  // 0 when nothing certifies
    std::map<int64_t, Verdict> verdicts;
    int64_t scanned_max = 0;
    double seconds = 0.0;
};

// the moment enclosures feeding a condition at prime N
struct ConditionEnclosures {
    Enclosure a1;
    Enclosure a2;  // only filled when the condition needs it
};

ConditionEnclosures condition_enclosures(Family family, BoundMode mode, int64_t N,
                                         bool need_a2);

Verdict certify_at(ConditionKind kind, Family family, BoundMode mode, int64_t N);

// combined predicate of the analytic lemma: A1 positive and ratio in (0,1)
bool combined_certifies(Family family, BoundMode mode, int64_t N);

ThresholdReport scan(ConditionKind kind, Family family, BoundMode mode, int64_t n_max,
                     int jobs = 0);

// same as scan but for the combined condition
ThresholdReport scan_combined(Family family, BoundMode mode, int64_t n_max, int jobs = 0);

enum class AnalyticVerdict { holds_analytically, needs_small_level_check };
AnalyticVerdict theorem2_analytic_verdict(int64_t N, Family family, BoundMode mode);

std::string to_string(ConditionKind k);
std::string to_string(Family f);
std::string to_string(BoundMode m);

}  // namespace nvcert
