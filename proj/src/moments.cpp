#include "nvcert/moments.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "nvcert/arith.hpp"
#include "nvcert/special.hpp"

namespace nvcert {

namespace {

constexpr int64_t kSmallDCut = 30;       // explicit T(d) evaluation below this
constexpr int64_t kTauTableMax = 200000; // precomputed divisor-sum suffix range
constexpr double kWeightFloor = 1e-22;   // E1 weight below this is pure tail

double round_up(double x) { return detail::next_up(x); }

// ---- cached E1(2 pi n / sqrt M) weight vectors, shared across d-sums ----

using WeightVec = std::vector<Enclosure>;  // index n-1

std::shared_ptr<const WeightVec> e1_weights(int64_t M) {
    static std::mutex mu;
    static std::map<int64_t, std::shared_ptr<const WeightVec>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(M);
        if (it != cache.end()) return it->second;
    }
    auto vec = std::make_shared<WeightVec>();
    const Enclosure ratio = two_pi_enclosure() / sqrt(Enclosure(static_cast<double>(M)));
    for (int64_t n = 1;; ++n) {
        const Enclosure w = e1(ratio * Enclosure(static_cast<double>(n)));
        vec->push_back(w);
        if (w.hi < kWeightFloor) break;
        if (n > 100000000) throw std::runtime_error("e1 weight vector runaway");
    }
    std::lock_guard<std::mutex> lock(mu);
    if (cache.size() > 64) cache.clear();
    cache[M] = vec;
    return vec;
}

// ---- Kloosterman sums S(m, j; c) for many j at fixed modulus c ----

// Evaluates S(m, j; c) for many j at one modulus.  The inner accumulation
// runs in plain doubles over lo/hi cosine tables; a single post-hoc widening
// of (pairs^2 + 4 pairs) eps covers the summation roundoff (each partial sum
// is bounded by the number of pairs, each term by 1).
struct KloostermanRow {
    int64_t c;
    std::vector<double> cos_lo, cos_hi;        // cos(2 pi j / c)
    std::vector<std::pair<int64_t, int64_t>> units;  // (k, k^{-1}) with 2k < c
    std::vector<Enclosure> memo;
    std::vector<char> have;
    double slack = 0.0;

    explicit KloostermanRow(int64_t modulus) : c(modulus) {
        cos_lo.resize(c);
        cos_hi.resize(c);
        const Enclosure step = two_pi_enclosure() / Enclosure(static_cast<double>(c));
        for (int64_t j = 0; j < c; ++j) {
            const Enclosure x = step * Enclosure(static_cast<double>(j));
            // Lipschitz-1 envelope around the midpoint value
            const double v = std::cos(x.mid());
            const double w = x.width() + 4.0 * 1.1102230246251565e-16;
            cos_lo[j] = std::max(-1.0, v - w);
            cos_hi[j] = std::min(1.0, v + w);
        }
        for (int64_t k = 1; 2 * k < c; ++k)
            if (gcd64(k, c) == 1) units.emplace_back(k, mod_inverse(k, c));
        const double pairs = static_cast<double>(units.size());
        slack = detail::next_up((pairs * pairs + 4.0 * pairs + 4.0) * 2.3e-16);
        memo.resize(c);
        have.assign(c, 0);
    }

    // S(m, j; c), j reduced mod c
    Enclosure at(int64_t m, int64_t j) {
        if (c == 1) return Enclosure(1.0);
        j = ((j % c) + c) % c;
        if (c == 2) return Enclosure((m + j) % 2 == 0 ? 1.0 : -1.0);
        if (have[j]) return memo[j];
        const int64_t mr = ((m % c) + c) % c;
        double slo = 0.0, shi = 0.0;
        for (const auto& [k, kinv] : units) {
            const int64_t phase = (mr * k + j * kinv) % c;
            slo += cos_lo[phase];
            shi += cos_hi[phase];
        }
        const Enclosure s{2.0 * slo - slack, 2.0 * shi + slack};
        memo[j] = s;
        have[j] = 1;
        return s;
    }
};

Enclosure inner_sum(KloostermanRow& row, int64_t m, int64_t arg_mult, const Enclosure& denom,
                    const WeightVec& weights, double weight_cut, int64_t n_budget) {
    // sum_n S(m, arg_mult * n; c) J1(4 pi sqrt(mn) / denom) E1-weight(n) / sqrt(n)
    const Enclosure four_pi = Enclosure(4.0) * pi_enclosure();
    Enclosure s(0.0);
    const int64_t n_avail = static_cast<int64_t>(weights.size());
    const int64_t n_max = n_budget > 0 ? std::min(n_budget, n_avail) : n_avail;
    double w_next = weight_cut;  // first omitted weight
    for (int64_t n = 1; n <= n_max; ++n) {
        const Enclosure& w = weights[n - 1];
        if (w.hi < weight_cut && n > 1) {
            w_next = w.hi;  // this term and everything after is tail
            break;
        }
        const Enclosure kl = row.at(m, arg_mult % row.c * (n % row.c) % row.c);
        const Enclosure sqrt_mn = sqrt(Enclosure(static_cast<double>(m * n)));
        const Enclosure j1v = bessel_j1(four_pi * sqrt_mn / denom);
        s += kl * j1v * w / sqrt(Enclosure(static_cast<double>(n)));
        if (n == n_max && n < n_avail) w_next = weights[n].hi;
    }
    // Tail over the remaining n: |S| <= sqrt(m) tau(c) sqrt(c), |J1| <= 0.6,
    // and by E1(x + delta) <= E1(x) e^{-delta} the remaining weights sum to at
    // most w_next * sqrt(M)/(2 pi); 1e4 covers that factor up to M = 4e9.
    const double klmax = round_up(std::sqrt(static_cast<double>(m)) *
                                  static_cast<double>(divisor_count(row.c)) *
                                  std::sqrt(static_cast<double>(row.c)));
    s += Enclosure::symmetric(round_up(0.6 * klmax * w_next * 1e4));
    return s;
}

Enclosure minus_radius(int64_t m, int64_t N);  // fwd

}  // namespace

Enclosure scal_bound(int64_t c, int64_t m, int64_t M) {
    if (c % M != 0) throw std::invalid_argument("scal_bound: M must divide c");
    const Enclosure tau(static_cast<double>(divisor_count(c / M)));
    const Enclosure sc = sqrt(Enclosure(static_cast<double>(c)));
    Enclosure b;
    if (m == 2 && c % 2 == 0) {
        // refined m=2 constant
        b = (sqrt(Enclosure(2.0)) + Enclosure(2.0)) * sqrt(Enclosure(static_cast<double>(M))) * tau / sc;
    } else {
        b = Enclosure(2.0) * sqrt(Enclosure(static_cast<double>(m * M))) * tau *
            f_weight(gcd64(m, c)) / sc;
    }
    return Enclosure::symmetric(b.hi);
}

Enclosure tcal_bound(int64_t d, int64_t m) {
    const Enclosure tau(static_cast<double>(divisor_count(d)));
    const Enclosure sd = sqrt(Enclosure(static_cast<double>(d)));
    Enclosure b;
    if (m == 2 && d % 2 == 0) {
        b = (Enclosure(1.0) + Enclosure(1.0) / sqrt(Enclosure(2.0))) * tau / sd;
    } else {
        b = tau * sqrt(Enclosure(static_cast<double>(m))) * f_weight(gcd64(m, d)) / sd;
    }
    return Enclosure::symmetric(b.hi);
}

Enclosure scal_numeric(int64_t c, int64_t m, int64_t M, int64_t n_budget) {
    if (c % M != 0) throw std::invalid_argument("scal_numeric: M must divide c");
    auto weights = e1_weights(M);
    if (c > 2000000) {
        // J1(x) <= x/2 and |S(m,n;c)| <= tau(c) sqrt(c m n): every term is
        // below 2 pi m tau(c) n w_n / sqrt(c), so bound the whole sum without
        // building the cosine table.
        const Enclosure sqrtM = sqrt(Enclosure(static_cast<double>(M)));
        Enclosure nw(0.0);
        for (size_t i = 0; i < weights->size(); ++i)
            nw += Enclosure(static_cast<double>(i + 1)) * (*weights)[i];
        const Enclosure q = exp(-(two_pi_enclosure() / sqrtM));
        const double n1 = static_cast<double>(weights->size());
        const double tail =
            detail::next_up(kWeightFloor * (n1 + 1.0 + sqrtM.hi) / (1.0 - q.hi));
        nw += Enclosure{0.0, tail};
        const Enclosure b = two_pi_enclosure() * Enclosure(static_cast<double>(m)) *
                            Enclosure(static_cast<double>(divisor_count(c))) * nw /
                            sqrt(Enclosure(static_cast<double>(c)));
        return intersect(Enclosure::symmetric(b.hi), scal_bound(c, m, M));
    }
    KloostermanRow row(c);
    Enclosure s = inner_sum(row, m, 1, Enclosure(static_cast<double>(c)), *weights,
                            kWeightFloor, n_budget);
    return intersect(s, scal_bound(c, m, M));
}

Enclosure tcal_numeric(int64_t d, int64_t m, int64_t M, int64_t n_budget) {
    if (gcd64(d, M) != 1) throw std::invalid_argument("tcal_numeric: d must be coprime to M");
    auto weights = e1_weights(M);
    KloostermanRow row(d);
    const int64_t minv = d == 1 ? 0 : mod_inverse(M % d, d);
    const Enclosure denom = Enclosure(static_cast<double>(d)) * sqrt(Enclosure(static_cast<double>(M)));
    Enclosure s = inner_sum(row, m, d == 1 ? 0 : minv, denom, *weights, kWeightFloor, n_budget);
    return intersect(s, tcal_bound(d, m));
}

std::pair<Enclosure, Enclosure> sum_bounds_first(int64_t m, int64_t M) {
    const Enclosure Me(static_cast<double>(M));
    Enclosure rc, rd;
    if (m == 2) {
        rc = Enclosure(213.0) / Me;
        rd = Enclosure(97.0) / sqrt(Me);
    } else {
        const Enclosure mg = Enclosure(static_cast<double>(m)) * g_weight(m);
        rc = mg * Enclosure(86.0) / Me;
        rd = mg * Enclosure(43.0) / sqrt(Me);
    }
    return {Enclosure::symmetric(rc.hi), Enclosure::symmetric(rd.hi)};
}

double pv_partial_bound(int64_t d) {
    if (d < 2) throw std::invalid_argument("pv_partial_bound: d >= 2 required");
    const Enclosure b = Enclosure(4.0 * static_cast<double>(d)) / (pi_enclosure() * pi_enclosure()) *
                        (log(Enclosure(static_cast<double>(d))) + Enclosure(1.5));
    return b.hi;
}

int64_t cutoff_f(int64_t level) {
    if (level < 1000) throw std::invalid_argument("cutoff_f: level >= 1000 required");
    const Enclosure Le(static_cast<double>(level));
    const Enclosure E = e1(two_pi_enclosure() / sqrt(Le));
    const Enclosure v = Le / (Enclosure(6.25) * E * E);
    return static_cast<int64_t>(std::floor(v.mid()));
}

// ---- tau(d)/d^{3/2} suffix sums for Weil tails ----

namespace {

struct TauTables {
    std::vector<double> suffix_all;   // suffix_all[d] >= sum_{k=d}^{D} tau(k)/k^{3/2}
    std::vector<double> suffix_even;
    double rem_all;                   // >= sum_{d > D} tau(d)/d^{3/2}
    double rem_even;
};

double tau_remainder(double D) {
    // sum_{d>D} tau(d)/d^{3/2} <= (2 ln D + 2 + 2 zeta(3/2)) / sqrt(D)
    const Enclosure r = (Enclosure(2.0) * log(Enclosure(D)) + Enclosure(2.0) +
                         Enclosure(2.0) * const_zeta32()) / sqrt(Enclosure(D));
    return r.hi;
}

const TauTables& tau_tables() {
    static TauTables t = [] {
        TauTables tt;
        const int64_t D = kTauTableMax;
        std::vector<int32_t> tau(D + 1, 0);
        for (int64_t i = 1; i <= D; ++i)
            for (int64_t j = i; j <= D; j += i) ++tau[j];
        tt.suffix_all.assign(D + 2, 0.0);
        tt.suffix_even.assign(D + 2, 0.0);
        for (int64_t d = D; d >= 1; --d) {
            const Enclosure de(static_cast<double>(d));
            const double term = (Enclosure(static_cast<double>(tau[d])) / (de * sqrt(de))).hi;
            tt.suffix_all[d] = round_up(tt.suffix_all[d + 1] + term);
            tt.suffix_even[d] = d % 2 == 0 ? round_up(tt.suffix_even[d + 1] + term)
                                           : tt.suffix_even[d + 1];
        }
        tt.rem_all = tau_remainder(static_cast<double>(D));
        // even d: tau(2k) <= 2 tau(k), so the even tail is 2^{-1/2} times the
        // all-d remainder evaluated at D/2
        tt.rem_even = round_up(tau_remainder(static_cast<double>(D) / 2.0) / std::sqrt(2.0));
        return tt;
    }();
    return t;
}

}  // namespace

double tau_suffix_all(int64_t f) {
    const TauTables& t = tau_tables();
    if (f >= kTauTableMax) return tau_remainder(static_cast<double>(f));
    return round_up(t.suffix_all[f + 1] + t.rem_all);
}

double tau_suffix_even(int64_t f) {
    const TauTables& t = tau_tables();
    if (f >= kTauTableMax)
        return round_up(tau_remainder(static_cast<double>(f) / 2.0) / std::sqrt(2.0));
    return round_up(t.suffix_even[f + 1] + t.rem_even);
}

MomentEstimate moment_plus_bound(int64_t m, int64_t M, BoundMode mode) {
    if (m != 1 && m != 2) throw std::invalid_argument("moment_plus_bound: m must be 1 or 2");
    if (M < 2 || gcd64(m, M) != 1)
        throw std::invalid_argument("moment_plus_bound: need level > 1 coprime to m");
    const Enclosure Me(static_cast<double>(M));
    const Enclosure sqrtM = sqrt(Me);
    const Enclosure main = e1(two_pi_enclosure() * Enclosure(static_cast<double>(m)) / sqrtM);

    MomentEstimate est;
    est.main_term = main;
    if (mode == BoundMode::first) {
        auto [rc, rd] = sum_bounds_first(m, M);
        est.error_radius = round_up(rc.hi + rd.hi);
        est.normalized = main + Enclosure::symmetric(est.error_radius);
        est.mode = "bound_first";
        return est;
    }

    if (M < 1000) throw std::invalid_argument("moment_plus_bound: improved mode needs level >= 1000");
    const int64_t f = cutoff_f(M);

    // explicit small-d part of the T-sum, kept signed
    Enclosure small_d(0.0);
    for (int64_t d = 1; d <= kSmallDCut; ++d) {
        if (gcd64(d, M) != 1) continue;
        small_d += tcal_numeric(d, m, M) / Enclosure(static_cast<double>(d));
    }
    const Enclosure sqm = sqrt(Enclosure(static_cast<double>(m)));
    const Enclosure small_term = -(two_pi_enclosure() * sqm / sqrtM) * small_d;

    // partial-sum (PV) bound for kSmallDCut < d <= f
    Enclosure pv_sum(0.0);
    for (int64_t d = kSmallDCut + 1; d <= f; ++d)
        pv_sum += (log(Enclosure(static_cast<double>(d))) + Enclosure(1.5)) /
                  Enclosure(static_cast<double>(d));
    const Enclosure E1_first = e1(two_pi_enclosure() / sqrtM);
    const double pv_radius =
        (Enclosure(16.0 * static_cast<double>(m)) / Me * E1_first * pv_sum).hi;

    // Weil tail beyond f
    double weil_radius;
    if (m == 1) {
        weil_radius = (two_pi_enclosure() / sqrtM * Enclosure(tau_suffix_all(f))).hi;
    } else {
        const Enclosure s2 = sqrt(Enclosure(2.0));
        const Enclosure comb = s2 * Enclosure(tau_suffix_all(f)) +
                               (Enclosure(1.0) + Enclosure(1.0) / s2 - s2) *
                                   Enclosure(tau_suffix_even(f));
        weil_radius = (two_pi_enclosure() * s2 / sqrtM * comb).hi;
    }

    // residual far tail of the inner n-sums, at most 1e-4 of the first-mode constant
    const double lambda = m == 1 ? 43.0 : 97.0;
    const double far_radius = (Enclosure(1e-4 * lambda) / sqrtM).hi;

    // lumped c-sum part (first-mode constant)
    const double s_radius = (Enclosure(m == 1 ? 86.0 : 213.0) / Me).hi;

    est.error_radius = round_up(round_up(pv_radius + weil_radius) + round_up(far_radius + s_radius));
    est.normalized = main + small_term + Enclosure::symmetric(est.error_radius);
    est.corrections.emplace_back("small_d_numeric", small_term);
    est.mode = "bound_improved";
    return est;
}

namespace {

Enclosure minus_radius(int64_t m, int64_t N) {
    auto [rc, rd] = sum_bounds_first(m, N);
    return Enclosure::symmetric(round_up(rc.hi + rd.hi));
}

}  // namespace

MomentEstimate moment_minus_bound(int64_t m, int64_t N) {
    if (N < 2 || gcd64(m, N) != 1)
        throw std::invalid_argument("moment_minus_bound: need level > 1 coprime to m");
    const Enclosure main =
        exp(-(two_pi_enclosure() * Enclosure(static_cast<double>(m)) / sqrt(Enclosure(static_cast<double>(N)))));
    MomentEstimate est;
    est.main_term = main;
    const Enclosure r = minus_radius(m, N);
    est.error_radius = r.hi;
    est.normalized = main + r;
    est.mode = "bound_first";
    return est;
}

MomentEstimate moment_square_new_bound(int64_t m, int64_t N, BoundMode mode) {
    if (!is_prime(N)) throw std::invalid_argument("moment_square_new_bound: N must be prime");
    if (m % N == 0) throw std::invalid_argument("moment_square_new_bound: N | m");
    const MomentEstimate sq = moment_plus_bound(m, N * N, mode);
    const MomentEstimate plusN = moment_plus_bound(m, N, BoundMode::first);
    const MomentEstimate minusN = moment_minus_bound(m, N);
    const Enclosure inv_n1 = Enclosure(1.0) / Enclosure(static_cast<double>(N - 1));
    const Enclosure half_log = log(Enclosure(static_cast<double>(N))) / Enclosure(2.0);

    MomentEstimate est;
    est.mode = sq.mode;
    const Enclosure corr_plus = -inv_n1 * plusN.normalized;
    const Enclosure corr_minus = -inv_n1 * half_log * minusN.normalized;
    est.normalized = sq.normalized + corr_plus + corr_minus;
    est.main_term = sq.main_term - inv_n1 * plusN.main_term - inv_n1 * half_log * minusN.main_term;
    est.corrections = sq.corrections;
    est.corrections.emplace_back("oldform_plus", corr_plus);
    est.corrections.emplace_back("oldform_minus", corr_minus);
    est.error_radius = round_up(sq.error_radius +
                                (inv_n1 * (Enclosure(plusN.error_radius) +
                                           half_log * Enclosure(minusN.error_radius))).hi);
    return est;
}

MomentEstimate moment_numeric(int64_t m, int64_t M, const TailParams& tail) {
    if (m != 1 && m != 2) throw std::invalid_argument("moment_numeric: m must be 1 or 2");
    if (!is_prime(M) || gcd64(m, M) != 1)
        throw std::invalid_argument("moment_numeric: level must be prime and coprime to m");
    const int64_t c_max = tail.c_max > 0 ? tail.c_max : 200 * M;
    int64_t d_max = tail.d_max;
    if (d_max <= 0) {
        d_max = 10000;
        if (M >= 1000) d_max = std::max<int64_t>(d_max, 2 * cutoff_f(M));
    }
    const Enclosure Me(static_cast<double>(M));
    const Enclosure sqrtM = sqrt(Me);
    const Enclosure sqm = sqrt(Enclosure(static_cast<double>(m)));

    int jobs = tail.jobs > 0 ? tail.jobs : static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    // c-sum over multiples of M, parallel workers, summed in a fixed order
    const int64_t J = c_max / M;
    std::vector<Enclosure> sc(J + 1, Enclosure(0.0));
    {
        std::atomic<int64_t> next_c{1};
        auto worker = [&] {
            for (;;) {
                const int64_t j = next_c.fetch_add(1);
                if (j > J) return;
                const int64_t c = j * M;
                sc[j] = scal_numeric(c, m, M) / Enclosure(static_cast<double>(c));
            }
        };
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    Enclosure c_part(0.0);
    for (int64_t j = 1; j <= J; ++j) c_part += sc[j];
    const double c_tail =
        (Enclosure(4.0) * pi_enclosure() * Enclosure(static_cast<double>(m)) * f_weight(m) / Me *
         Enclosure(tau_suffix_all(J))).hi;

    // d-sum over moduli coprime to M, parallel workers, summed in order
    std::vector<Enclosure> td(d_max + 1, Enclosure(0.0));
    std::vector<std::thread> pool;
    std::atomic<int64_t> next{1};
    auto worker = [&] {
        for (;;) {
            const int64_t d = next.fetch_add(1);
            if (d > d_max) return;
            if (gcd64(d, M) != 1) continue;
            td[d] = tcal_numeric(d, m, M) / Enclosure(static_cast<double>(d));
        }
    };
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    Enclosure d_part(0.0);
    for (int64_t d = 1; d <= d_max; ++d) d_part += td[d];
    const double d_tail = (two_pi_enclosure() * Enclosure(static_cast<double>(m)) * f_weight(m) /
                           sqrtM * Enclosure(tau_suffix_all(d_max))).hi;

    MomentEstimate est;
    est.main_term = e1(two_pi_enclosure() * Enclosure(static_cast<double>(m)) / sqrtM);
    const Enclosure sums = -(two_pi_enclosure() * sqm) *
                           (c_part + d_part / sqrtM);
    est.normalized = est.main_term + sums + Enclosure::symmetric(round_up(c_tail + d_tail));
    est.corrections.emplace_back("trace_sums", sums);
    est.error_radius = round_up(c_tail + d_tail);
    est.mode = "numeric";
    return est;
}

}  // namespace nvcert
