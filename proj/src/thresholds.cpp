#include "nvcert/thresholds.hpp"

#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>
#include <vector>

#include "nvcert/arith.hpp"

namespace nvcert {

namespace {

bool in_regime(Family family, BoundMode mode, int64_t N) {
    if (mode == BoundMode::first) return true;
    const int64_t level = family == Family::x0plus ? N : N * N;
    return level >= 1000;
}

int64_t scan_floor(Family family, BoundMode mode) {
    if (mode == BoundMode::improved) return family == Family::x0plus ? 1009 : 37;
    return 3;
}

bool ratio_in_unit_interval(const Enclosure& a1, const Enclosure& a2) {
    if (!(a1.lo > 0.0)) return false;
    const Enclosure ratio = a2 / a1;
    return ratio.lo > 0.0 && ratio.hi < 1.0;
}

}  // namespace

ConditionEnclosures condition_enclosures(Family family, BoundMode mode, int64_t N,
                                         bool need_a2) {
    ConditionEnclosures out;
    if (family == Family::x0plus) {
        out.a1 = moment_plus_bound(1, N, mode).normalized;
        if (need_a2) out.a2 = moment_plus_bound(2, N, mode).normalized;
    } else {
        out.a1 = moment_square_new_bound(1, N, mode).normalized;
        if (need_a2) out.a2 = moment_square_new_bound(2, N, mode).normalized;
    }
    return out;
}

Verdict certify_at(ConditionKind kind, Family family, BoundMode mode, int64_t N) {
    if (!is_prime(N)) throw std::invalid_argument("certify_at: N must be prime");
    if (N == 2) return Verdict::inconclusive;  // m = 2 is not coprime to the level
    if (!in_regime(family, mode, N)) return Verdict::inconclusive;
    const bool need_a2 = kind != ConditionKind::A1Positive;
    const ConditionEnclosures e = condition_enclosures(family, mode, N, need_a2);
    switch (kind) {
        case ConditionKind::A1Positive:
            return e.a1.lo > 0.0 ? Verdict::certified : Verdict::inconclusive;
        case ConditionKind::A2Positive:
            return e.a2.lo > 0.0 ? Verdict::certified : Verdict::inconclusive;
        case ConditionKind::RatioInUnitInterval:
            return ratio_in_unit_interval(e.a1, e.a2) ? Verdict::certified
                                                      : Verdict::inconclusive;
    }
    throw std::logic_error("unreachable");
}

bool combined_certifies(Family family, BoundMode mode, int64_t N) {
    if (N == 2 || !in_regime(family, mode, N)) return false;
    const ConditionEnclosures e = condition_enclosures(family, mode, N, true);
    return e.a1.lo > 0.0 && ratio_in_unit_interval(e.a1, e.a2);
}

namespace {

ThresholdReport scan_impl(ConditionKind kind, bool combined, Family family, BoundMode mode,
                          int64_t n_max, int jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int64_t> primes = primes_in(scan_floor(family, mode), n_max);
    std::vector<Verdict> verdicts(primes.size(), Verdict::inconclusive);
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= primes.size()) return;
            const int64_t p = primes[i];
            const bool ok = combined ? combined_certifies(family, mode, p)
                                     : certify_at(kind, family, mode, p) == Verdict::certified;
            verdicts[i] = ok ? Verdict::certified : Verdict::inconclusive;
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    ThresholdReport rep;
    rep.kind = kind;
    rep.family = family;
    rep.mode = mode;
    rep.scanned_max = n_max;
    for (size_t i = 0; i < primes.size(); ++i) rep.verdicts[primes[i]] = verdicts[i];
    // least prime with every scanned prime above it certified
    int64_t min_p = 0;
    for (size_t i = primes.size(); i-- > 0;) {
        if (verdicts[i] != Verdict::certified) break;
        min_p = primes[i];
    }
    rep.min_certified_prime = min_p;
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace

ThresholdReport scan(ConditionKind kind, Family family, BoundMode mode, int64_t n_max,
                     int jobs) {
    return scan_impl(kind, false, family, mode, n_max, jobs);
}

ThresholdReport scan_combined(Family family, BoundMode mode, int64_t n_max, int jobs) {
    return scan_impl(ConditionKind::RatioInUnitInterval, true, family, mode, n_max, jobs);
}

AnalyticVerdict theorem2_analytic_verdict(int64_t N, Family family, BoundMode mode) {
    return combined_certifies(family, mode, N) ? AnalyticVerdict::holds_analytically
                                               : AnalyticVerdict::needs_small_level_check;
}

std::string to_string(ConditionKind k) {
    switch (k) {
        case ConditionKind::A1Positive: return "a1";
        case ConditionKind::A2Positive: return "a2";
        case ConditionKind::RatioInUnitInterval: return "ratio";
    }
    return "?";
}
std::string to_string(Family f) { return f == Family::x0plus ? "x0plus" : "xnsplus"; }
std::string to_string(BoundMode m) { return m == BoundMode::first ? "first" : "improved"; }

}  // namespace nvcert
