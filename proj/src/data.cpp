#include "nvcert/data.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <unistd.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nvcert {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& path, size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::pair<size_t, json>> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::pair<size_t, json>> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) fail(path, lineno, "invalid JSON");
        if (!j.is_object()) fail(path, lineno, "expected a JSON object");
        out.emplace_back(lineno, std::move(j));
    }
    return out;
}

Enclosure with_precision(double v, int prec) {
    if (prec <= 0) return Enclosure(v);
    const double half = 0.5 * std::pow(10.0, -prec);
    return Enclosure(v) + Enclosure::symmetric(detail::next_up(half));
}

}  // namespace

Enclosure CurveRecord::lprime_enclosure() const { return with_precision(lprime, lprime_prec); }
Enclosure CurveRecord::norm_enclosure() const { return with_precision(petersson_norm, norm_prec); }

std::vector<NewformRecord> load_newforms(const std::string& path) {
    std::vector<NewformRecord> out;
    for (const auto& [lineno, j] : read_jsonl(path)) {
        NewformRecord r;
        try {
            r.label = j.at("label").get<std::string>();
            r.level = j.at("level").get<int64_t>();
            r.weight = j.at("weight").get<int>();
            r.fricke_sign = j.at("fricke_sign").get<int>();
            r.orbit_size = j.at("orbit_size").get<int64_t>();
            if (j.contains("an")) {
                r.an = j.at("an").get<std::vector<double>>();
            } else if (j.contains("ap")) {
                r.prime_list = true;
                for (const auto& [k, v] : j.at("ap").items())
                    r.ap[std::stoll(k)] = v.get<double>();
            } else {
                fail(path, lineno, "record needs \"an\" or \"ap\"");
            }
            if (j.contains("prec")) r.prec = j.at("prec").get<int>();
        } catch (const json::exception& e) {
            fail(path, lineno, std::string("schema: ") + e.what());
        }
        if (r.weight != 2) fail(path, lineno, "weight must be 2");
        if (r.fricke_sign != 1 && r.fricke_sign != -1) fail(path, lineno, "fricke_sign must be +-1");
        if (r.level < 1) fail(path, lineno, "level must be >= 1");
        if (r.orbit_size < 1) fail(path, lineno, "orbit_size must be >= 1");
        if (!r.prime_list) {
            if (r.an.empty() || r.an[0] != 1.0) fail(path, lineno, "form not normalised (a_1 != 1)");
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<CurveRecord> load_curves(const std::string& path) {
    std::vector<CurveRecord> out;
    for (const auto& [lineno, j] : read_jsonl(path)) {
        CurveRecord r;
        try {
            r.label = j.at("label").get<std::string>();
            r.conductor = j.at("conductor").get<int64_t>();
            r.analytic_rank = j.at("analytic_rank").get<int>();
            r.lprime = j.at("lprime").get<double>();
            r.petersson_norm = j.at("petersson_norm").get<double>();
            if (j.contains("lprime_prec")) r.lprime_prec = j.at("lprime_prec").get<int>();
            if (j.contains("norm_prec")) r.norm_prec = j.at("norm_prec").get<int>();
        } catch (const json::exception& e) {
            fail(path, lineno, std::string("schema: ") + e.what());
        }
        if (r.conductor < 11) fail(path, lineno, "conductor must be >= 11");
        if (r.petersson_norm <= 0.0) fail(path, lineno, "petersson_norm must be positive");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<DimRecord> load_dims(const std::string& path) {
    std::vector<DimRecord> out;
    for (const auto& [lineno, j] : read_jsonl(path)) {
        DimRecord r;
        try {
            r.level_param = j.at("level_param").get<int64_t>();
            r.dim_plus_new = j.at("dim_plus_new").get<int64_t>();
        } catch (const json::exception& e) {
            fail(path, lineno, std::string("schema: ") + e.what());
        }
        if (r.level_param < 2 || r.dim_plus_new < 0) fail(path, lineno, "invalid dimension row");
        out.push_back(r);
    }
    return out;
}

std::string serialize_newforms(const std::vector<NewformRecord>& records) {
    std::ostringstream os;
    for (const auto& r : records) {
        json j;
        j["label"] = r.label;
        j["level"] = r.level;
        j["weight"] = r.weight;
        j["fricke_sign"] = r.fricke_sign;
        j["orbit_size"] = r.orbit_size;
        if (r.prime_list) {
            json ap = json::object();
            for (const auto& [p, v] : r.ap) ap[std::to_string(p)] = v;
            j["ap"] = ap;
        } else {
            j["an"] = r.an;
        }
        if (r.prec > 0) j["prec"] = r.prec;
        os << j.dump() << "\n";
    }
    return os.str();
}

std::string serialize_curves(const std::vector<CurveRecord>& records) {
    std::ostringstream os;
    for (const auto& r : records) {
        json j;
        j["label"] = r.label;
        j["conductor"] = r.conductor;
        j["analytic_rank"] = r.analytic_rank;
        j["lprime"] = r.lprime;
        j["petersson_norm"] = r.petersson_norm;
        if (r.lprime_prec > 0) j["lprime_prec"] = r.lprime_prec;
        if (r.norm_prec > 0) j["norm_prec"] = r.norm_prec;
        os << j.dump() << "\n";
    }
    return os.str();
}

// ---- compact SHA-256 ----

namespace {

struct Sha256 {
    uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                     0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    uint64_t len = 0;
    unsigned char buf[64];
    size_t fill = 0;

    static uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void block(const unsigned char* p) {
        static const uint32_t K[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (uint32_t(p[4 * i]) << 24) | (uint32_t(p[4 * i + 1]) << 16) |
                   (uint32_t(p[4 * i + 2]) << 8) | uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const uint32_t ch = (e & f) ^ (~e & g);
            const uint32_t t1 = hh + S1 + ch + K[i] + w[i];
            const uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const uint32_t t2 = S0 + maj;
            hh = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }

    void update(const void* data, size_t n) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        len += n;
        while (n) {
            const size_t take = std::min(n, sizeof(buf) - fill);
            std::memcpy(buf + fill, p, take);
            fill += take;
            p += take;
            n -= take;
            if (fill == sizeof(buf)) {
                block(buf);
                fill = 0;
            }
        }
    }

    std::string hex() {
        const uint64_t bits = len * 8;
        unsigned char pad = 0x80;
        update(&pad, 1);
        const unsigned char zero = 0;
        while (fill != 56) update(&zero, 1);
        unsigned char lb[8];
        for (int i = 0; i < 8; ++i) lb[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        update(lb, 8);
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (uint32_t v : h)
            for (int i = 28; i >= 0; i -= 4) out.push_back(digits[(v >> i) & 0xf]);
        return out;
    }
};

std::string sha256_hex(const std::string& bytes) {
    Sha256 s;
    s.update(bytes.data(), bytes.size());
    return s.hex();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// fetch <base>/<kind>/<level>.jsonl through the cache; returns the local path
std::string fetch_cached(int64_t level, const std::string& kind, const std::string& cache_dir,
                         std::string base_url) {
    if (base_url.empty()) {
        const char* env = std::getenv("NVCERT_DATA_URL");
        if (!env || !*env) throw std::runtime_error("fetch_remote: no base URL configured");
        base_url = env;
    }
    fs::create_directories(cache_dir);
    const std::string key =
        sha256_hex(base_url + "|" + kind + "|" + std::to_string(level)).substr(0, 32);
    const std::string payload_path = cache_dir + "/" + key + ".jsonl";
    const std::string digest_path = payload_path + ".sha256";
    if (fs::exists(payload_path) && fs::exists(digest_path)) {
        const std::string body = slurp(payload_path);
        std::string want = slurp(digest_path);
        while (!want.empty() && (want.back() == '\n' || want.back() == '\r')) want.pop_back();
        if (sha256_hex(body) != want)
            throw std::runtime_error("fetch_remote: cache integrity failure for " + payload_path);
        return payload_path;
    }
    // split scheme://host from path prefix
    std::string host = base_url, prefix;
    const auto scheme = host.find("://");
    const auto slash = host.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (slash != std::string::npos) {
        prefix = host.substr(slash);
        host = host.substr(0, slash);
    }
    httplib::Client client(host);
    client.set_connection_timeout(10);
    const std::string target = prefix + "/" + kind + "/" + std::to_string(level) + ".jsonl";
    auto res = client.Get(target);
    if (!res || (res->status != 200 && res->status != 404))
        throw std::runtime_error("fetch_remote: request failed for " + host + target);
    const std::string body = res->status == 404 ? "" : res->body;
    // atomic single-writer creation
    const std::string tmp = payload_path + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary);
        out << body;
    }
    std::ofstream(digest_path + ".tmp" + std::to_string(::getpid())) << sha256_hex(body) << "\n";
    fs::rename(digest_path + ".tmp" + std::to_string(::getpid()), digest_path);
    fs::rename(tmp, payload_path);
    return payload_path;
}

}  // namespace

std::string file_sha256(const std::string& path) { return sha256_hex(slurp(path)); }

std::vector<NewformRecord> fetch_remote_newforms(int64_t level, const std::string& cache_dir,
                                                 const std::string& base_url) {
    return load_newforms(fetch_cached(level, "newforms", cache_dir, base_url));
}

std::vector<CurveRecord> fetch_remote_curves(int64_t level, const std::string& cache_dir,
                                             const std::string& base_url) {
    return load_curves(fetch_cached(level, "curves", cache_dir, base_url));
}

}  // namespace nvcert
