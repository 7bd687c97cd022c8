#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nvcert/enclosure.hpp"

namespace nvcert {

struct NewformRecord {
    std::string label;
    int64_t level = 0;
    int weight = 2;
    int fricke_sign = 0;  // +1 or -1
    int64_t orbit_size = 1;
    // either a full coefficient list a_1.. or prime coefficients only
    std::vector<double> an;          // full_list variant (a_n at index n-1)
    std::map<int64_t, double> ap;    // prime_list variant
    bool prime_list = false;
    int prec = 0;  // decimal digits; 0 = exact
};

struct CurveRecord {
    std::string label;
    int64_t conductor = 0;
    int analytic_rank = 0;
    double lprime = 0.0;
    double petersson_norm = 0.0;
    int lprime_prec = 0;
    int norm_prec = 0;

    Enclosure lprime_enclosure() const;
    Enclosure norm_enclosure() const;
};

struct DimRecord {
    int64_t level_param = 0;
    int64_t dim_plus_new = 0;
};

std::vector<NewformRecord> load_newforms(const std::string& path);
std::vector<CurveRecord> load_curves(const std::string& path);
std::vector<DimRecord> load_dims(const std::string& path);

std::string serialize_newforms(const std::vector<NewformRecord>& records);
std::string serialize_curves(const std::vector<CurveRecord>& records);

// SHA-256 of a file's bytes, lowercase hex
std::string file_sha256(const std::string& path);

// HTTPS GET of <base_url>/<kind>/<level>.jsonl with a content-addressed disk
// cache; base_url defaults to $NVCERT_DATA_URL.  Throws on network failure
// without a cache hit; empty payload means "no data at this level".
std::vector<NewformRecord> fetch_remote_newforms(int64_t level, const std::string& cache_dir,
                                                 const std::string& base_url = "");
std::vector<CurveRecord> fetch_remote_curves(int64_t level, const std::string& cache_dir,
                                             const std::string& base_url = "");

}  // namespace nvcert
