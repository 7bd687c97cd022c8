#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nvcert/special.hpp"

using namespace nvcert;

// reference values computed independently at 40 decimal digits

TEST_CASE("E1 matches high-precision references") {
    struct Ref { double x, v; };
    const Ref refs[] = {
        {0.1, 1.822923958419390666080914},
        {0.5, 0.5597735947761608117467959},
        {1.0, 0.2193839343955202736771638},
        {2.5, 0.02491491787026973549562801},
        {6.0, 0.0003600824521626586592953941},
        {7.0, 0.0001154817316103382164310115},
        {10.0, 4.15696892968532427740286e-6},
        {25.0, 5.348899755340216640325471e-13},
        {49.5, 6.299351408664804390408895e-24},
    };
    for (const auto& r : refs) {
        Enclosure e = e1(r.x);
        CAPTURE(r.x);
        CHECK(e.contains(r.v));
        CHECK(e.width() / r.v < 1e-10);
    }
    // sandwich regime: containment only, width is coarser by design
    Enclosure e60 = e1(60.0);
    CHECK(e60.contains(1.435867565681256788442984e-28));
    Enclosure e80 = e1(80.0);
    CHECK(e80.contains(2.228543258688472911218145e-37));
    CHECK_THROWS(e1(0.0));
    CHECK_THROWS(e1(-1.0));
}

TEST_CASE("E1 on intervals is monotone-correct") {
    Enclosure e = e1(Enclosure(1.0, 2.5));
    CHECK(e.contains(0.2193839343955202736771638));
    CHECK(e.contains(0.02491491787026973549562801));
    CHECK(e.contains(0.04890051070806111956723984));  // E1(2)
    // refinement nests
    Enclosure narrow = e1(Enclosure(1.5, 2.0));
    CHECK(e.contains(narrow));
}

TEST_CASE("J1 matches high-precision references") {
    struct Ref { double x, v; };
    const Ref refs[] = {
        {0.5, 0.2422684576748738863839546},
        {1.0, 0.4400505857449335159596822},
        {3.0, 0.3390589585259364589255146},
        {10.0, 0.04347274616886143666974877},
        {25.0, -0.1253502495802899046518093},
        {40.0, 0.1260383180375849992056027},
        {49.9, -0.1027969573688854435984},  // J1 at the double nearest 49.9
    };
    for (const auto& r : refs) {
        Enclosure j = bessel_j1(r.x);
        CAPTURE(r.x);
        CHECK(j.contains(r.v));
        CHECK(j.width() < 1e-12);
    }
    CHECK(bessel_j1(0.0).contains(0.0));
    // envelope regime
    Enclosure big = bessel_j1(120.0);
    CHECK(big.contains(-0.011805211433001891117));  // J1(120)
    CHECK_THROWS(bessel_j1(-1.0));
}

TEST_CASE("J1 interval form uses the Lipschitz bound") {
    Enclosure j = bessel_j1(Enclosure(0.9, 1.1));
    CHECK(j.contains(0.4400505857449335159596822));
    CHECK(j.contains(bessel_j1(0.95)));
    CHECK(j.contains(bessel_j1(1.05)));
}

TEST_CASE("zeta(3/2)^2 constant") {
    Enclosure z = const_zeta32();
    CHECK(z.contains(2.612375348685488343348568));
    CHECK(z.width() < 1e-9);
    Enclosure z2 = const_zeta32_squared();
    CHECK(z2.contains(6.82450496241962680348021));
    // the 4*pi*zeta(3/2)^2 <= 86 sanity inequality behind the lumped constants
    Enclosure bound = Enclosure(4.0) * pi_enclosure() * z2;
    CHECK(bound.hi < 86.0);
    CHECK(bound.lo > 85.0);
}
