#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "nvcert/audit.hpp"
#include "nvcert/lseries.hpp"
#include "nvcert/moments.hpp"

using namespace nvcert;

namespace {

const std::string kData = NVCERT_DATA_DIR;

NewformRecord find_form(const std::string& file, const std::string& label) {
    for (const auto& r : load_newforms(kData + "/" + file))
        if (r.label == label) return r;
    throw std::runtime_error("fixture missing: " + label);
}

}  // namespace

TEST_CASE("Hecke expansion from prime coefficients") {
    std::map<int64_t, double> ap = {{2, -2.0}, {3, -3.0}, {5, -2.0},
                                    {7, -1.0}, {11, -5.0}, {37, -1.0}};
    const auto a = expand_coefficients(ap, 37, 12);
    REQUIRE(a.size() == 12);
    CHECK(a[0] == 1.0);
    CHECK(a[1] == -2.0);
    CHECK(a[3] == 2.0);    // a4 = a2^2 - 2
    CHECK(a[5] == 6.0);    // a6 = a2 a3
    CHECK(a[7] == 0.0);    // a8 = a2 a4 - 2 a2
    CHECK(a[8] == 6.0);    // a9 = a3^2 - 3
    CHECK(a[9] == 4.0);    // a10 = a2 a5
    CHECK(a[11] == -6.0);  // a12 = a4 a3

    // ramified prime: a_{p^2} = a_p^2 with no p-correction
    const auto b = expand_coefficients({{37, -1.0}}, 37, 1);
    CHECK(b[0] == 1.0);
    std::map<int64_t, double> small = {{2, -2.0}};
    CHECK_THROWS_AS(expand_coefficients(small, 37, 3), std::runtime_error);
}

TEST_CASE("37a coefficients match the point-count table") {
    const NewformRecord f = find_form("newforms_37.jsonl", "37.2.a.a");
    REQUIRE(f.prime_list);
    const auto a = record_coefficients(f, 20);
    // first coefficients of the level-37 rank-1 form
    const double expected[20] = {1, -2, -3, 2,  -2, 6, -1, 0, 6, 4,
                                 -5, -6, -2, 2, 6,  -4, 0,  -12, 0, -4};
    for (int n = 0; n < 20; ++n) CHECK(a[n].contains(expected[n]));
}

TEST_CASE("L'(37a, 1) matches the independently computed value") {
    const NewformRecord f = find_form("newforms_37.jsonl", "37.2.a.a");
    const Enclosure v = lprime_at_1(f);
    CHECK(v.contains(0.3059997738340523));
    CHECK(v.width() < 1e-6);

    const auto curves = load_curves(kData + "/curves_37.jsonl");
    REQUIRE(curves.size() == 1);
    const Enclosure c = curves[0].lprime_enclosure();
    CHECK(v.lo <= c.hi);
    CHECK(c.lo <= v.hi);
}

TEST_CASE("truncation doubling keeps the value and shrinks the tail") {
    const NewformRecord f = find_form("newforms_37.jsonl", "37.2.a.a");
    const Enclosure v40 = lprime_at_1(f, 40);
    const Enclosure v80 = lprime_at_1(f, 80);
    // both enclose the same value
    CHECK(v40.lo <= v80.hi);
    CHECK(v80.lo <= v40.hi);
    CHECK(series_tail_bound(37, 80) < series_tail_bound(37, 40));
    CHECK(series_tail_bound(37, 40) > 0.0);
    CHECK(series_tail_bound(37, 400) < 1e-170);
}

TEST_CASE("series evaluation checks the Fricke sign") {
    NewformRecord f = find_form("newforms_37.jsonl", "37.2.a.a");
    REQUIRE(f.fricke_sign == 1);
    CHECK_THROWS_AS(l_at_1(f), std::invalid_argument);
    f.fricke_sign = -1;
    CHECK_THROWS_AS(lprime_at_1(f), std::invalid_argument);
}

TEST_CASE("nonvanishing certificate for 37a") {
    const NewformRecord f = find_form("newforms_37.jsonl", "37.2.a.a");
    const NonvanishingCertificate c = certify_nonvanishing(f);
    CHECK(c.verdict == NonvanishingCertificate::V::nonzero);
    CHECK(c.value.lo > 0.3);
    CHECK(c.tail_bound < 1e-15);
    CHECK(c.truncation > 0);
}

TEST_CASE("exhausted coefficient lists give an honest inconclusive") {
    NewformRecord f;
    f.label = "short";
    f.level = 37;
    f.fricke_sign = 1;
    f.an = {1.0, -2.0, -3.0};
    const NonvanishingCertificate c = certify_nonvanishing(f);
    CHECK(c.verdict == NonvanishingCertificate::V::inconclusive);
}

TEST_CASE("level 67 verdict") {
    const auto forms = load_newforms(kData + "/newforms_67.jsonl");
    REQUIRE(forms.size() == 2);  // one quadratic orbit, both embeddings
    std::vector<NonvanishingCertificate> certs;
    CHECK(level_verdict(forms, 2, &certs) == LevelVerdict::theorem2_holds);
    REQUIRE(certs.size() == 2);
    for (const auto& c : certs) CHECK(c.verdict == NonvanishingCertificate::V::nonzero);
    // coverage mismatch is flagged, not silently passed
    CHECK(level_verdict(forms, 3) == LevelVerdict::insufficient_data);
    CHECK(level_verdict({forms[0]}, -1) == LevelVerdict::fails_to_certify);
}

TEST_CASE("single-curve exclusion at the candidate levels") {
    const auto curves = load_curves(kData + "/curves_ns.jsonl");
    REQUIRE(curves.size() == 6);
    const Enclosure four_pi = Enclosure(4.0) * pi_enclosure();
    for (const auto& c : curves) {
        const int64_t N = static_cast<int64_t>(std::llround(std::sqrt(double(c.conductor))));
        REQUIRE(N * N == c.conductor);
        const Enclosure lower = four_pi * moment_square_new_bound(1, N, BoundMode::improved).normalized;
        CHECK(lower.lo > 10.0);
        CHECK(single_curve_exclusion(c, lower) == Exclusion::excluded);
        // a weak lower bound must not exclude
        CHECK(single_curve_exclusion(c, Enclosure(1.0)) == Exclusion::not_excluded);
    }
    CurveRecord bad;
    bad.petersson_norm = 0.0;
    CHECK_THROWS_AS(single_curve_exclusion(bad, Enclosure(1.0)), std::invalid_argument);
}

TEST_CASE("200-bit recomputation agrees") {
    const NewformRecord f37 = find_form("newforms_37.jsonl", "37.2.a.a");
    const Enclosure fast = lprime_at_1(f37);
    const Enclosure slow = audit::lprime_at_1(f37);
    CHECK(slow.lo >= fast.lo - 1e-15);
    CHECK(slow.hi <= fast.hi + 1e-15);
    CHECK(slow.width() < fast.width());

    for (const auto& r : load_newforms(kData + "/newforms_67.jsonl")) {
        const Enclosure a = lprime_at_1(r);
        const Enclosure b = audit::lprime_at_1(r);
        CHECK(a.lo <= b.hi);
        CHECK(b.lo <= a.hi);
    }
}
