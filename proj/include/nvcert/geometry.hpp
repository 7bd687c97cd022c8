#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "nvcert/enclosure.hpp"

namespace nvcert {

// class number h(D) of the quadratic order of discriminant D < 0,
// by counting reduced binary quadratic forms
int64_t class_number(int64_t D);

// genus of X0(N) and of its Fricke quotient X0+(N), N prime
int64_t genus_x0(int64_t N);
int64_t genus_x0plus(int64_t N);

// genus of Xns+(N) = dim S2(Gamma0(N^2))^{+,new}; the dimension comes from an
// ingested table (see data module); nullopt when the table lacks N
std::optional<int64_t> genus_xnsplus(int64_t N);
void set_xnsplus_dimension_table(const std::map<int64_t, int64_t>& table);
// direct dimension formula used to generate/validate the table:
// (g(X0(N^2)) - 2 g(X0(N)) + 1 - h(-4N^2)/2) / 2
int64_t dim_s2_plus_new_square(int64_t N);

struct PointBoundInput {
    int64_t p;         // good prime >= 3
    int64_t genus;     // >= 2
    int64_t fp_count;  // #X(F_p)
    int64_t nv_product;  // prod n_v >= 1
};

// kappa_p = 1 + (p-1)/((p-2) ln p)
Enclosure kappa(int64_t p);

// strict upper bound kappa_p * n * #X(F_p) * (16g^3 + 15g^2 - 16g + 10),
// returned as the largest integer below the bound's upper enclosure endpoint
int64_t point_count_bound(const PointBoundInput& in);

// polynomial factor 16g^3 + 15g^2 - 16g + 10
int64_t genus_polynomial(int64_t g);

}  // namespace nvcert
