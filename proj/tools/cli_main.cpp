#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "nvcert/audit.hpp"
#include "nvcert/data.hpp"
#include "nvcert/geometry.hpp"
#include "nvcert/lseries.hpp"
#include "nvcert/moments.hpp"
#include "nvcert/thresholds.hpp"

using json = nlohmann::json;
using namespace nvcert;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInconclusive = 2;

json enc(const Enclosure& e) { return json{{"lo", e.lo}, {"hi", e.hi}}; }

json input_file(const std::string& path) {
    return json{{"path", path}, {"sha256", file_sha256(path)}};
}

void emit(const json& report, const std::string& out_path) {
    const std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        out << text;
    }
}

json estimate_json(const MomentEstimate& est) {
    json corrections = json::array();
    for (const auto& [name, value] : est.corrections)
        corrections.push_back({{"name", name}, {"value", enc(value)}});
    return json{{"normalized", enc(est.normalized)},
                {"main_term", enc(est.main_term)},
                {"corrections", corrections},
                {"error_radius", est.error_radius},
                {"mode", est.mode}};
}

ConditionKind parse_condition(const std::string& s, bool& combined) {
    combined = s == "combined";
    if (s == "a1") return ConditionKind::A1Positive;
    if (s == "a2") return ConditionKind::A2Positive;
    if (s == "ratio" || combined) return ConditionKind::RatioInUnitInterval;
    throw CLI::ValidationError("--condition", "expected a1, a2, ratio or combined");
}

// published minimal primes, for cross-referencing scan reports
std::optional<int64_t> published_min(Family f, BoundMode m, const std::string& condition) {
    static const std::map<std::string, int64_t> table = {
        {"x0plus/first/a1", 1213},      {"x0plus/first/a2", 5437},
        {"x0plus/first/ratio", 45341},  {"xnsplus/first/a1", 47},
        {"xnsplus/first/a2", 97},       {"xnsplus/first/ratio", 269},
        {"x0plus/improved/combined", 8641},
        {"xnsplus/improved/ratio", 151}, {"xnsplus/improved/a2", 71},
    };
    const auto it = table.find(to_string(f) + "/" + to_string(m) + "/" + condition);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

struct CommonOpts {
    std::string out;
    bool audit = false;
    int jobs = 0;
};

json base_report(const std::string& command) {
    return json{{"command", command},
                {"version", "1.0"},
                {"arithmetic", "directed-rounding double intervals"},
                {"inputs", json::array()},
                {"results", json::object()}};
}

int cmd_moments(int64_t m, int64_t level, const std::string& kind, const std::string& mode_s,
                bool numeric, int64_t c_max, int64_t d_max, const CommonOpts& common) {
    const BoundMode mode = mode_s == "improved" ? BoundMode::improved : BoundMode::first;
    json report = base_report("moments");
    MomentEstimate est;
    if (numeric) {
        TailParams tp;
        tp.c_max = c_max;
        tp.d_max = d_max;
        tp.jobs = common.jobs;
        est = moment_numeric(m, level, tp);
    } else if (kind == "plus") {
        est = moment_plus_bound(m, level, mode);
    } else if (kind == "minus") {
        est = moment_minus_bound(m, level);
    } else if (kind == "square_new") {
        est = moment_square_new_bound(m, level, mode);
    } else {
        throw CLI::ValidationError("--kind", "expected plus, minus or square_new");
    }
    report["results"] = {{"m", m}, {"level", level}, {"kind", numeric ? "numeric" : kind},
                         {"estimate", estimate_json(est)}};
    if (common.audit && !numeric) {
        Enclosure audited;
        if (kind == "plus") audited = audit::moment_plus(m, level, mode);
        else if (kind == "minus") audited = audit::moment_minus(m, level);
        else audited = audit::moment_square_new(m, level, mode);
        report["results"]["audit"] = {{"arithmetic", "mpfr-200bit"}, {"normalized", enc(audited)}};
    }
    emit(report, common.out);
    return kExitOk;
}

int cmd_thresholds(const std::string& family_s, const std::string& condition_s,
                   const std::string& mode_s, int64_t n_max, const std::string& plot,
                   const CommonOpts& common) {
    const Family family = family_s == "xnsplus" ? Family::xnsplus : Family::x0plus;
    const BoundMode mode = mode_s == "improved" ? BoundMode::improved : BoundMode::first;
    bool combined = false;
    const ConditionKind kind = parse_condition(condition_s, combined);
    const ThresholdReport rep = combined ? scan_combined(family, mode, n_max, common.jobs)
                                         : scan(kind, family, mode, n_max, common.jobs);
    json verdicts = json::object();
    for (const auto& [p, v] : rep.verdicts)
        verdicts[std::to_string(p)] = v == Verdict::certified ? "certified" : "inconclusive";
    json report = base_report("thresholds");
    report["results"] = {{"family", to_string(family)},
                         {"condition", condition_s},
                         {"mode", to_string(mode)},
                         {"scanned_max", rep.scanned_max},
                         {"min_certified_prime", rep.min_certified_prime},
                         {"verdicts", verdicts}};
    if (const auto pub = published_min(family, mode, condition_s)) {
        report["results"]["published_min"] = *pub;
        if (rep.min_certified_prime != 0 && rep.min_certified_prime < *pub)
            report["results"]["note"] =
                "scan certifies below the published threshold; the refined "
                "small-moduli treatment is strictly stronger";
        else if (rep.min_certified_prime == 0 || rep.min_certified_prime > *pub)
            report["results"]["note"] = "scan does not reach the published threshold";
    }
    if (common.audit && rep.min_certified_prime != 0) {
        const int64_t p = rep.min_certified_prime;
        const bool ok = combined
                            ? audit::certify_at(ConditionKind::A1Positive, family, mode, p) &&
                                  audit::certify_at(ConditionKind::RatioInUnitInterval, family,
                                                    mode, p)
                            : audit::certify_at(kind, family, mode, p);
        report["results"]["audit"] = {{"arithmetic", "mpfr-200bit"},
                                      {"prime", p},
                                      {"certified", ok}};
    }
    if (!plot.empty()) {
        std::ofstream csv(plot, std::ios::binary);
        csv << "prime,lo,hi\n";
        for (const auto& [p, v] : rep.verdicts) {
            const bool need_a2 = kind != ConditionKind::A1Positive;
            try {
                const ConditionEnclosures e = condition_enclosures(family, mode, p, need_a2);
                Enclosure b = e.a1;
                if (kind == ConditionKind::A2Positive) b = e.a2;
                if (kind == ConditionKind::RatioInUnitInterval && e.a1.lo > 0.0) b = e.a2 / e.a1;
                char line[128];
                std::snprintf(line, sizeof line, "%lld,%.17g,%.17g\n",
                              static_cast<long long>(p), b.lo, b.hi);
                csv << line;
            } catch (const std::exception&) {
                // below regime: no bound to plot
            }
        }
    }
    emit(report, common.out);
    return rep.min_certified_prime != 0 ? kExitOk : kExitInconclusive;
}

int cmd_certify(int64_t level, const std::string& newforms_path,
                std::optional<int64_t> expected_dim, const CommonOpts& common) {
    const auto forms = load_newforms(newforms_path);
    json report = base_report("certify");
    report["inputs"].push_back(input_file(newforms_path));
    std::vector<NewformRecord> at_level;
    for (const auto& f : forms)
        if (f.level == level) at_level.push_back(f);
    std::vector<NonvanishingCertificate> certs;
    const LevelVerdict verdict =
        level_verdict(at_level, expected_dim ? *expected_dim : -1, &certs);
    json jcerts = json::array();
    for (const auto& c : certs) {
        json jc = {{"label", c.label},
                   {"verdict", c.verdict == NonvanishingCertificate::V::nonzero ? "nonzero"
                                                                                : "inconclusive"},
                   {"value", enc(c.value)},
                   {"truncation", c.truncation},
                   {"tail_bound", c.tail_bound}};
        jcerts.push_back(jc);
    }
    const char* verdict_s = verdict == LevelVerdict::theorem2_holds      ? "theorem2_holds"
                            : verdict == LevelVerdict::fails_to_certify ? "fails_to_certify"
                                                                        : "insufficient_data";
    report["results"] = {{"level", level}, {"verdict", verdict_s}, {"certificates", jcerts}};
    if (common.audit) {
        json audits = json::array();
        for (const auto& f : at_level) {
            const Enclosure v =
                f.fricke_sign == 1 ? audit::lprime_at_1(f) : audit::l_at_1(f);
            audits.push_back({{"label", f.label}, {"value", enc(v)}});
        }
        report["results"]["audit"] = {{"arithmetic", "mpfr-200bit"}, {"values", audits}};
    }
    emit(report, common.out);
    return verdict == LevelVerdict::theorem2_holds ? kExitOk : kExitInconclusive;
}

int cmd_lprime(const std::string& newforms_path, const std::string& label, int64_t T,
               const CommonOpts& common) {
    const auto forms = load_newforms(newforms_path);
    json report = base_report("lprime");
    report["inputs"].push_back(input_file(newforms_path));
    json values = json::array();
    for (const auto& f : forms) {
        if (!label.empty() && f.label != label) continue;
        const Enclosure v = f.fricke_sign == 1 ? lprime_at_1(f, T) : l_at_1(f, T);
        json jv = {{"label", f.label},
                   {"kind", f.fricke_sign == 1 ? "lprime" : "lvalue"},
                   {"value", enc(v)}};
        if (common.audit)
            jv["audit"] = {{"arithmetic", "mpfr-200bit"},
                           {"value", enc(f.fricke_sign == 1 ? audit::lprime_at_1(f, T)
                                                            : audit::l_at_1(f, T))}};
        values.push_back(jv);
    }
    if (values.empty()) {
        std::cerr << "lprime: no matching newform record\n";
        return kExitUsage;
    }
    report["results"] = {{"values", values}};
    emit(report, common.out);
    return kExitOk;
}

int cmd_pointbound(int64_t p, int64_t genus, int64_t fp, int64_t nv, const CommonOpts& common) {
    const PointBoundInput in{p, genus, fp, nv};
    const int64_t bound = point_count_bound(in);
    json report = base_report("pointbound");
    report["results"] = {{"p", p},
                         {"genus", genus},
                         {"fp_count", fp},
                         {"nv_product", nv},
                         {"kappa", enc(kappa(p))},
                         {"genus_polynomial", genus_polynomial(genus)},
                         {"bound", bound}};
    emit(report, common.out);
    return kExitOk;
}

int cmd_genus(const std::string& family_s, int64_t level, const std::string& dims_path,
              const CommonOpts& common) {
    json report = base_report("genus");
    if (family_s == "x0plus") {
        report["results"] = {{"family", "x0plus"},
                             {"level", level},
                             {"genus", genus_x0plus(level)},
                             {"genus_x0", genus_x0(level)}};
        emit(report, common.out);
        return kExitOk;
    }
    if (!dims_path.empty()) {
        std::map<int64_t, int64_t> table;
        for (const auto& d : load_dims(dims_path)) table[d.level_param] = d.dim_plus_new;
        set_xnsplus_dimension_table(table);
        report["inputs"].push_back(input_file(dims_path));
    }
    const auto g = genus_xnsplus(level);
    report["results"] = {{"family", "xnsplus"}, {"level", level}};
    if (!g) {
        report["results"]["verdict"] = "insufficient_data";
        emit(report, common.out);
        return kExitInconclusive;
    }
    report["results"]["genus"] = *g;
    report["results"]["dim_formula_check"] = dim_s2_plus_new_square(level);
    emit(report, common.out);
    return kExitOk;
}

int cmd_screen(const std::string& curves_path, const std::string& mode_s,
               const CommonOpts& common) {
    const BoundMode mode = mode_s == "first" ? BoundMode::first : BoundMode::improved;
    const auto curves = load_curves(curves_path);
    json report = base_report("screen");
    report["inputs"].push_back(input_file(curves_path));
    json rows = json::array();
    bool all_excluded = !curves.empty();
    const Enclosure four_pi = Enclosure(4.0) * pi_enclosure();
    for (const auto& c : curves) {
        const int64_t N = static_cast<int64_t>(std::llround(std::sqrt(double(c.conductor))));
        if (N * N != c.conductor) {
            std::cerr << "screen: conductor " << c.conductor << " is not a prime square\n";
            return kExitUsage;
        }
        const MomentEstimate est = moment_square_new_bound(1, N, mode);
        // the first-coefficient moment is a sum of L'(f,1)/(4 pi <f,f>) over
        // the plus-new forms; a single curve must not exhaust it
        const Enclosure lower = four_pi * est.normalized;
        const Exclusion ex = single_curve_exclusion(c, lower);
        rows.push_back({{"label", c.label},
                        {"conductor", c.conductor},
                        {"level_param", N},
                        {"curve_ratio", enc(c.lprime_enclosure() / c.norm_enclosure())},
                        {"moment_lower", lower.lo},
                        {"excluded", ex == Exclusion::excluded}});
        if (ex != Exclusion::excluded) all_excluded = false;
    }
    report["results"] = {{"mode", to_string(mode)},
                         {"curves", rows},
                         {"all_excluded", all_excluded}};
    emit(report, common.out);
    return all_excluded ? kExitOk : kExitInconclusive;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified moment bounds and nonvanishing checks for weight-2 L-functions"};
    app.require_subcommand(1);
    app.fallthrough();
    CommonOpts common;
    app.add_option("--out", common.out, "write the JSON report to a file");
    app.add_flag("--audit", common.audit, "recheck decisive inequalities in 200-bit arithmetic");
    app.add_option("--jobs", common.jobs, "worker threads (0 = hardware)");

    // moments
    auto* mo = app.add_subcommand("moments", "moment bound or direct numeric evaluation");
    int64_t mo_m = 1, mo_level = 0, mo_cmax = 0, mo_dmax = 0;
    std::string mo_kind = "plus", mo_mode = "first";
    bool mo_numeric = false;
    mo->add_option("--m", mo_m, "coefficient index (1 or 2)");
    mo->add_option("--level", mo_level, "prime level")->required();
    mo->add_option("--kind", mo_kind, "plus | minus | square_new");
    mo->add_option("--mode", mo_mode, "first | improved");
    mo->add_flag("--numeric", mo_numeric, "evaluate the trace-formula sums directly");
    mo->add_option("--c-max", mo_cmax, "numeric c-sum truncation (0 = default)");
    mo->add_option("--d-max", mo_dmax, "numeric d-sum truncation (0 = default)");

    // thresholds
    auto* th = app.add_subcommand("thresholds", "scan prime levels for the analytic conditions");
    std::string th_family = "x0plus", th_condition = "a1", th_mode = "first", th_plot;
    int64_t th_max = 0;
    th->add_option("--family", th_family, "x0plus | xnsplus");
    th->add_option("--condition", th_condition, "a1 | a2 | ratio | combined");
    th->add_option("--mode", th_mode, "first | improved");
    th->add_option("--max", th_max, "scan primes up to this bound")->required();
    th->add_option("--plot", th_plot, "write (prime, lo, hi) CSV to a file");

    // certify
    auto* ce = app.add_subcommand("certify", "per-level nonvanishing verdict from newform data");
    int64_t ce_level = 0;
    std::string ce_newforms;
    int64_t ce_dim = -1;
    ce->add_option("--level", ce_level, "level")->required();
    ce->add_option("--newforms", ce_newforms, "newforms JSONL file")->required();
    ce->add_option("--expected-dim", ce_dim, "expected plus-new dimension (coverage check)");

    // lprime
    auto* lp = app.add_subcommand("lprime", "evaluate L'(f,1) / L(f,1) from coefficients");
    std::string lp_newforms, lp_label;
    int64_t lp_T = 0;
    lp->add_option("--newforms", lp_newforms, "newforms JSONL file")->required();
    lp->add_option("--label", lp_label, "restrict to one label");
    lp->add_option("--T", lp_T, "series truncation (0 = automatic)");

    // pointbound
    auto* pb = app.add_subcommand("pointbound", "explicit rational-point-count bound");
    int64_t pb_p = 0, pb_g = 0, pb_fp = 0, pb_nv = 1;
    pb->add_option("--p", pb_p, "good prime >= 3")->required();
    pb->add_option("--genus", pb_g, "curve genus >= 2")->required();
    pb->add_option("--fp", pb_fp, "number of F_p points")->required();
    pb->add_option("--nv", pb_nv, "product of the local factors n_v");

    // genus
    auto* ge = app.add_subcommand("genus", "genus of the modular curve quotients");
    std::string ge_family = "x0plus", ge_dims;
    int64_t ge_level = 0;
    ge->add_option("--family", ge_family, "x0plus | xnsplus");
    ge->add_option("--level", ge_level, "prime level")->required();
    ge->add_option("--dims", ge_dims, "dimension table JSONL (xnsplus)");

    // screen
    auto* sc = app.add_subcommand("screen", "single-curve exclusion at candidate levels");
    std::string sc_curves, sc_mode = "improved";
    sc->add_option("--curves", sc_curves, "curves JSONL file")->required();
    sc->add_option("--mode", sc_mode, "first | improved");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (mo->parsed())
            return cmd_moments(mo_m, mo_level, mo_kind, mo_mode, mo_numeric, mo_cmax, mo_dmax,
                               common);
        if (th->parsed())
            return cmd_thresholds(th_family, th_condition, th_mode, th_max, th_plot, common);
        if (ce->parsed())
            return cmd_certify(ce_level, ce_newforms,
                               ce_dim >= 0 ? std::optional<int64_t>(ce_dim) : std::nullopt,
                               common);
        if (lp->parsed()) return cmd_lprime(lp_newforms, lp_label, lp_T, common);
        if (pb->parsed()) return cmd_pointbound(pb_p, pb_g, pb_fp, pb_nv, common);
        if (ge->parsed()) return cmd_genus(ge_family, ge_level, ge_dims, common);
        if (sc->parsed()) return cmd_screen(sc_curves, sc_mode, common);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
