#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "nvcert/data.hpp"

using namespace nvcert;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("nvcert_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream(p, std::ios::binary) << content;
        return p.string();
    }
};

const char* kForm67 =
    R"({"label":"67.2.a.b","level":67,"weight":2,"fricke_sign":1,"orbit_size":2,)"
    R"("ap":{"2":1.414213562373095,"3":-1.0},"prec":12})"
    "\n";

}  // namespace

TEST_CASE("load_newforms accepts valid records") {
    TempDir t;
    const auto forms = load_newforms(t.file("f.jsonl", kForm67));
    REQUIRE(forms.size() == 1);
    CHECK(forms[0].label == "67.2.a.b");
    CHECK(forms[0].level == 67);
    CHECK(forms[0].fricke_sign == 1);
    CHECK(forms[0].orbit_size == 2);
    CHECK(forms[0].prime_list);
    CHECK(forms[0].ap.at(3) == -1.0);
    CHECK(forms[0].prec == 12);
}

TEST_CASE("load_newforms rejects bad records with line numbers") {
    TempDir t;
    const std::string good =
        R"({"label":"x","level":37,"weight":2,"fricke_sign":1,"orbit_size":1,"an":[1.0,-2.0]})"
        "\n";
    const std::string unnormalised =
        R"({"label":"x","level":37,"weight":2,"fricke_sign":1,"orbit_size":1,"an":[2.0]})"
        "\n";
    CHECK_NOTHROW(load_newforms(t.file("ok.jsonl", good)));
    try {
        load_newforms(t.file("bad.jsonl", good + unnormalised));
        FAIL("expected a validation error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
        CHECK(std::string(e.what()).find("normalised") != std::string::npos);
    }
    const std::string badweight =
        R"({"label":"x","level":37,"weight":4,"fricke_sign":1,"orbit_size":1,"an":[1.0]})";
    CHECK_THROWS_AS(load_newforms(t.file("w.jsonl", badweight)), std::runtime_error);
    const std::string badsign =
        R"({"label":"x","level":37,"weight":2,"fricke_sign":0,"orbit_size":1,"an":[1.0]})";
    CHECK_THROWS_AS(load_newforms(t.file("s.jsonl", badsign)), std::runtime_error);
    CHECK_THROWS_AS(load_newforms(t.file("nj.jsonl", "not json\n")), std::runtime_error);
    CHECK_THROWS_AS(load_newforms((t.path / "missing.jsonl").string()), std::runtime_error);
}

TEST_CASE("empty files load as empty lists") {
    TempDir t;
    CHECK(load_newforms(t.file("e1.jsonl", "")).empty());
    CHECK(load_curves(t.file("e2.jsonl", "\n\n")).empty());
    CHECK(load_dims(t.file("e3.jsonl", "")).empty());
}

TEST_CASE("load_curves validation and enclosures") {
    TempDir t;
    const std::string line =
        R"({"label":"37a1","conductor":37,"analytic_rank":1,"lprime":0.3059997738,)"
        R"("petersson_norm":0.0000291,"lprime_prec":9,"norm_prec":7})"
        "\n";
    const auto curves = load_curves(t.file("c.jsonl", line));
    REQUIRE(curves.size() == 1);
    const Enclosure lp = curves[0].lprime_enclosure();
    CHECK(lp.contains(0.3059997738));
    CHECK(lp.width() <= 1.1e-9);
    CHECK(curves[0].norm_enclosure().lo > 0.0);

    const std::string missing = R"({"label":"37a1","conductor":37,"analytic_rank":1})";
    CHECK_THROWS_AS(load_curves(t.file("m.jsonl", missing)), std::runtime_error);
    const std::string lowcond =
        R"({"label":"x","conductor":10,"analytic_rank":1,"lprime":1.0,"petersson_norm":1.0})";
    CHECK_THROWS_AS(load_curves(t.file("lc.jsonl", lowcond)), std::runtime_error);
    const std::string badnorm =
        R"({"label":"x","conductor":37,"analytic_rank":1,"lprime":1.0,"petersson_norm":0.0})";
    CHECK_THROWS_AS(load_curves(t.file("bn.jsonl", badnorm)), std::runtime_error);
}

TEST_CASE("load_dims") {
    TempDir t;
    const auto dims = load_dims(t.file("d.jsonl",
                                       R"({"level_param":13,"dim_plus_new":3})"
                                       "\n"
                                       R"({"level_param":17,"dim_plus_new":6})"
                                       "\n"));
    REQUIRE(dims.size() == 2);
    CHECK(dims[1].level_param == 17);
    CHECK(dims[1].dim_plus_new == 6);
    CHECK_THROWS_AS(load_dims(t.file("bad.jsonl", R"({"level_param":13,"dim_plus_new":-1})")),
                    std::runtime_error);
}

TEST_CASE("serialize/load round-trips byte-identically on canonical files") {
    TempDir t;
    const auto forms = load_newforms(t.file("f.jsonl", kForm67));
    const std::string canonical = serialize_newforms(forms);
    const auto again = load_newforms(t.file("f2.jsonl", canonical));
    CHECK(serialize_newforms(again) == canonical);

    const std::string curve_line =
        R"({"label":"37a1","conductor":37,"analytic_rank":1,"lprime":0.30599977,)"
        R"("petersson_norm":2.9e-05})"
        "\n";
    const auto curves = load_curves(t.file("c.jsonl", curve_line));
    const std::string ccanon = serialize_curves(curves);
    CHECK(serialize_curves(load_curves(t.file("c2.jsonl", ccanon))) == ccanon);
}

TEST_CASE("file_sha256 known vectors") {
    TempDir t;
    CHECK(file_sha256(t.file("empty", "")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(file_sha256(t.file("abc", "abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("remote fetch with content-addressed cache") {
    TempDir t;
    httplib::Server svr;
    std::atomic<int> hits{0};
    svr.Get("/data/newforms/67.jsonl", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.set_content(kForm67, "application/jsonl");
    });
    const int port = svr.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server([&] { svr.listen_after_bind(); });
    while (!svr.is_running()) std::this_thread::yield();
    const std::string base = "http://127.0.0.1:" + std::to_string(port) + "/data";
    const std::string cache = (t.path / "cache").string();

    const auto first = fetch_remote_newforms(67, cache, base);
    REQUIRE(first.size() == 1);
    CHECK(first[0].level == 67);
    CHECK(hits == 1);

    // warm cache: no further network traffic
    const auto second = fetch_remote_newforms(67, cache, base);
    CHECK(second.size() == 1);
    CHECK(hits == 1);

    // unknown level: 404 becomes an empty, cached result distinct from an error
    const auto none = fetch_remote_newforms(9999, cache, base);
    CHECK(none.empty());

    // poisoned cache payload is rejected
    for (const auto& entry : fs::directory_iterator(cache)) {
        if (entry.path().extension() == ".jsonl" &&
            !fs::file_size(entry.path())) continue;
        if (entry.path().extension() == ".jsonl")
            std::ofstream(entry.path(), std::ios::app) << "\n";
    }
    bool integrity_error = false;
    try {
        (void)fetch_remote_newforms(67, cache, base);
    } catch (const std::runtime_error& e) {
        integrity_error = std::string(e.what()).find("integrity") != std::string::npos;
    }
    CHECK(integrity_error);

    svr.stop();
    server.join();
}

TEST_CASE("fetch without a configured base URL fails loudly") {
    TempDir t;
    ::unsetenv("NVCERT_DATA_URL");
    CHECK_THROWS_AS(fetch_remote_newforms(67, (t.path / "c").string()), std::runtime_error);
}
