#include "nvcert/lseries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nvcert/arith.hpp"
#include "nvcert/special.hpp"

namespace nvcert {

namespace {

// smallest prime factor sieve
std::vector<int64_t> spf_sieve(int64_t T) {
    std::vector<int64_t> spf(T + 1, 0);
    for (int64_t i = 2; i <= T; ++i)
        if (spf[i] == 0)
            for (int64_t j = i; j <= T; j += i)
                if (spf[j] == 0) spf[j] = i;
    return spf;
}

template <class Val, class ApLookup>
std::vector<Val> hecke_expand(const ApLookup& ap_at, int64_t level, int64_t T) {
    const auto spf = spf_sieve(T);
    std::vector<Val> a(T + 1, Val(0.0));
    a[1] = Val(1.0);
    for (int64_t n = 2; n <= T; ++n) {
        const int64_t p = spf[n];
        int64_t pk = p, rest = n / p;
        while (rest % p == 0) {
            pk *= p;
            rest /= p;
        }
        if (rest > 1) {
            a[n] = a[pk] * a[rest];  // multiplicativity on coprime parts
            continue;
        }
        // n = p^k; recursion in the prime power
        if (pk == p) {
            a[n] = ap_at(p);
        } else if (level % p == 0) {
            a[n] = ap_at(p) * a[pk / p];
        } else {
            a[n] = ap_at(p) * a[pk / p] - Val(static_cast<double>(p)) * a[pk / (p * p)];
        }
    }
    a.erase(a.begin());  // drop index 0; a[i] is now a_{i+1}
    return a;
}

int64_t default_T(int64_t M) { return static_cast<int64_t>(std::ceil(8.0 * std::sqrt(static_cast<double>(M)))); }

Enclosure coefficient_enclosure(double v, int prec) {
    if (prec <= 0) return Enclosure(v);
    return Enclosure(v) + Enclosure::symmetric(detail::next_up(0.5 * std::pow(10.0, -prec)));
}

Enclosure series_value(const NewformRecord& r, int64_t T, bool derivative) {
    const int64_t M = r.level;
    if (T <= 0) T = default_T(M);
    const std::vector<Enclosure> a = record_coefficients(r, T);
    const Enclosure ratio = two_pi_enclosure() / sqrt(Enclosure(static_cast<double>(M)));
    Enclosure s(0.0);
    for (int64_t n = 1; n <= T; ++n) {
        const Enclosure x = ratio * Enclosure(static_cast<double>(n));
        const Enclosure w = derivative ? e1(x) : exp(-x);
        if (w.hi < 1e-30) break;
        s += a[n - 1] / Enclosure(static_cast<double>(n)) * w;
    }
    const double tail = series_tail_bound(M, T);
    return Enclosure(2.0) * s + Enclosure::symmetric(tail);
}

}  // namespace

std::vector<double> expand_coefficients(const std::map<int64_t, double>& ap, int64_t level,
                                        int64_t T) {
    auto ap_at = [&](int64_t p) -> double {
        auto it = ap.find(p);
        if (it == ap.end())
            throw std::runtime_error("expand_coefficients: missing a_p for p = " + std::to_string(p));
        return it->second;
    };
    return hecke_expand<double>(ap_at, level, T);
}

std::vector<Enclosure> record_coefficients(const NewformRecord& r, int64_t T) {
    if (!r.prime_list) {
        if (static_cast<int64_t>(r.an.size()) < T)
            throw std::runtime_error("record " + r.label + ": coefficient list shorter than T=" +
                                     std::to_string(T));
        std::vector<Enclosure> a;
        a.reserve(T);
        for (int64_t n = 1; n <= T; ++n) a.push_back(coefficient_enclosure(r.an[n - 1], r.prec));
        return a;
    }
    auto ap_at = [&](int64_t p) -> Enclosure {
        auto it = r.ap.find(p);
        if (it == r.ap.end())
            throw std::runtime_error("record " + r.label + ": missing a_p for p = " + std::to_string(p));
        return coefficient_enclosure(it->second, r.prec);
    };
    return hecke_expand<Enclosure>(ap_at, r.level, T);
}

double series_tail_bound(int64_t M, int64_t T) {
    // |a_n| <= tau(n) sqrt(n) <= 2n, and E1(x) <= e^{-x}/x, so each dropped
    // term is at most 4 max(1, sqrt(M)/(2 pi T)) e^{-2 pi n / sqrt M};
    // close the sum with a geometric series.
    const Enclosure sqrtM = sqrt(Enclosure(static_cast<double>(M)));
    const Enclosure q = exp(-(two_pi_enclosure() / sqrtM));
    if (!(q.hi < 1.0)) throw std::runtime_error("series_tail_bound: ratio not < 1");
    const Enclosure first = exp(-(two_pi_enclosure() * Enclosure(static_cast<double>(T + 1)) / sqrtM));
    const Enclosure pref = sqrtM / (two_pi_enclosure() * Enclosure(static_cast<double>(T)));
    const double factor = std::max(1.0, pref.hi);
    const Enclosure b = Enclosure(4.0 * factor) * first / (Enclosure(1.0) - q);
    return detail::next_up(b.hi);
}

Enclosure lprime_at_1(const NewformRecord& r, int64_t T) {
    if (r.fricke_sign != 1)
        throw std::invalid_argument("lprime_at_1: requires Fricke sign +1");
    return series_value(r, T, true);
}

Enclosure l_at_1(const NewformRecord& r, int64_t T) {
    if (r.fricke_sign != -1)
        throw std::invalid_argument("l_at_1: requires Fricke sign -1");
    return series_value(r, T, false);
}

NonvanishingCertificate certify_nonvanishing(const NewformRecord& r, int64_t max_T) {
    NonvanishingCertificate cert;
    cert.label = r.label;
    int64_t T = default_T(r.level);
    if (max_T <= 0) max_T = 8 * T;
    for (;;) {
        bool evaluated = false;
        try {
            cert.value = r.fricke_sign == 1 ? lprime_at_1(r, T) : l_at_1(r, T);
            evaluated = true;
        } catch (const std::runtime_error&) {
            // coefficient list exhausted below this T
        }
        if (evaluated) {
            cert.truncation = T;
            cert.tail_bound = series_tail_bound(r.level, T);
            if (!cert.value.contains(0.0)) {
                cert.verdict = NonvanishingCertificate::V::nonzero;
                return cert;
            }
        }
        if (T >= max_T) return cert;  // honest inconclusive
        T *= 2;
    }
}

LevelVerdict level_verdict(const std::vector<NewformRecord>& records, int64_t expected_dim,
                           std::vector<NonvanishingCertificate>* certs) {
    std::vector<NewformRecord> sorted = records;
    std::sort(sorted.begin(), sorted.end(),
              [](const NewformRecord& a, const NewformRecord& b) { return a.label < b.label; });
    int64_t covered = 0, certified_weight = 0;
    for (const auto& r : sorted) {
        covered += r.orbit_size;
        const NonvanishingCertificate c = certify_nonvanishing(r);
        if (c.verdict == NonvanishingCertificate::V::nonzero) certified_weight += r.orbit_size;
        if (certs) certs->push_back(c);
    }
    if (expected_dim >= 0 && covered != expected_dim) return LevelVerdict::insufficient_data;
    return certified_weight >= 2 ? LevelVerdict::theorem2_holds : LevelVerdict::fails_to_certify;
}

Exclusion single_curve_exclusion(const CurveRecord& curve, const Enclosure& moment_lower) {
    if (!(curve.petersson_norm > 0.0))
        throw std::invalid_argument("single_curve_exclusion: missing Petersson norm");
    const Enclosure ratio = curve.lprime_enclosure() / curve.norm_enclosure();
    return ratio.hi < moment_lower.lo ? Exclusion::excluded : Exclusion::not_excluded;
}

}  // namespace nvcert
