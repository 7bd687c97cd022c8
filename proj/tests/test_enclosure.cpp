#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nvcert/enclosure.hpp"

#include <random>

using namespace nvcert;

TEST_CASE("basic arithmetic contains exact results") {
    Enclosure a(1.0), b(3.0);
    CHECK((a / b).contains(1.0 / 3.0));
    CHECK((a / b).width() > 0.0);
    CHECK((a + b).contains(4.0));
    CHECK((a - b).contains(-2.0));
    CHECK((a * b).contains(3.0));
}

TEST_CASE("division by interval containing zero throws") {
    Enclosure a(1.0), b(-1.0, 1.0);
    CHECK_THROWS_AS(a / b, std::domain_error);
}

TEST_CASE("pi and gamma enclosures contain the constants") {
    // enough digits that the decimal literal rounds correctly
    CHECK(pi_enclosure().contains(3.14159265358979323846));
    CHECK(pi_enclosure().width() < 1e-15);
    CHECK(euler_gamma_enclosure().contains(0.5772156649015328606));
    CHECK(euler_gamma_enclosure().width() < 1e-15);
}

TEST_CASE("exp/log/sqrt round outward and stay tight") {
    for (double x : {0.1, 0.7, 1.0, 2.5, 10.0, 30.0}) {
        Enclosure e = exp(Enclosure(x));
        CHECK(e.contains(std::exp(x)));
        CHECK(e.width() / e.mag() < 1e-14);
        Enclosure l = log(Enclosure(x));
        CHECK(l.contains(std::log(x)));
        Enclosure s = sqrt(Enclosure(x));
        CHECK(s.contains(std::sqrt(x)));
    }
    CHECK_THROWS(log(Enclosure(0.0, 1.0)));
    CHECK_THROWS(sqrt(Enclosure(-1.0, 1.0)));
}

TEST_CASE("cos interval covers interior extrema") {
    const double pi = 3.14159265358979323846;
    Enclosure c = cos(Enclosure(3.0, 3.3));  // spans pi
    CHECK(c.lo <= -1.0 + 1e-12);
    c = cos(Enclosure(-0.1, 0.1));  // spans 0
    CHECK(c.hi >= 1.0 - 1e-12);
    c = cos(Enclosure(0.0, 7.0));  // spans 0, pi, 2pi
    CHECK(c.lo <= -1.0 + 1e-12);
    CHECK(c.hi >= 1.0 - 1e-12);
    c = cos(Enclosure(1.0));
    CHECK(c.contains(std::cos(1.0)));
    CHECK(c.width() < 1e-14);
    c = cos(Enclosure(2 * pi * 100.0, 2 * pi * 100.0 + 0.001));
    CHECK(c.hi >= std::cos(0.001));
}

TEST_CASE("monotone width under refinement: operations on nested inputs nest") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        double a = u(rng), b = u(rng), wa = std::fabs(u(rng)) * 0.1, wb = std::fabs(u(rng)) * 0.1;
        Enclosure wide_a(a - wa, a + wa), wide_b(b - wb, b + wb);
        Enclosure narrow_a(a - wa / 3, a + wa / 3), narrow_b(b - wb / 3, b + wb / 3);
        CHECK((wide_a + wide_b).contains(narrow_a + narrow_b));
        CHECK((wide_a - wide_b).contains(narrow_a - narrow_b));
        CHECK((wide_a * wide_b).contains(narrow_a * narrow_b));
        if (!wide_b.contains(0.0)) CHECK((wide_a / wide_b).contains(narrow_a / narrow_b));
    }
}

TEST_CASE("hull and intersect") {
    Enclosure a(0.0, 2.0), b(1.0, 3.0);
    CHECK(hull(a, b).lo == 0.0);
    CHECK(hull(a, b).hi == 3.0);
    Enclosure i = intersect(a, b);
    CHECK(i.lo == 1.0);
    CHECK(i.hi == 2.0);
    CHECK_THROWS(intersect(Enclosure(0.0, 1.0), Enclosure(2.0, 3.0)));
}
