#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "spfh/driver.hpp"

using namespace spfh;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("spfh-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

std::vector<std::uint8_t> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Job ext_job(const std::string& f, const std::string& g, int max_degree, const fs::path& cache) {
    Job j;
    j.command = "ext";
    j.f = f;
    j.g = g;
    j.max_degree = max_degree;
    j.cache_dir = cache.string();
    return j;
}

std::vector<long long> dims_of(const nlohmann::json& doc) {
    std::vector<long long> out;
    for (const auto& row : doc.at("rows")) out.push_back(row.at("dim"));
    return out;
}

struct Process {
    int status = -1;
    std::string out;
};

Process run_cli(const std::string& args, const fs::path& cache) {
    const std::string cmd =
        "SPFH_CACHE_DIR='" + cache.string() + "' '" + std::string(SPFH_CLI_PATH) + "' " + args + " 2>/dev/null";
    Process p;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) p.out.append(buf, n);
    int raw = pclose(pipe);
    p.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return p;
}

}  // namespace

TEST_SUITE("driver") {
    TEST_CASE("cache put then get is byte identical") {
        TempDir dir;
        Cache cache(dir.path);
        auto f2 = Field::get(2);
        std::vector<std::uint8_t> payload(1000);
        std::mt19937 rng(3);
        for (auto& b : payload) b = std::uint8_t(rng());
        cache.put("key", *f2, payload);
        auto got = cache.get("key", *f2);
        REQUIRE(got);
        CHECK(*got == payload);
        CHECK_FALSE(cache.get("other", *f2));
    }

    TEST_CASE("a key differing only in the field misses") {
        TempDir dir;
        Cache cache(dir.path);
        cache.put("key", *Field::get(2), bytes_of("payload"));
        CHECK_FALSE(cache.get("key", *Field::get(3)));
        CHECK_FALSE(cache.get("key", *Field::get(2, 2)));
        CHECK(cache.get("key", *Field::get(2)));
    }

    TEST_CASE("envelope layout") {
        TempDir dir;
        Cache cache(dir.path);
        auto f = Field::get(3, 2);
        cache.put("k", *f, bytes_of("abc"));
        auto raw = read_file(cache.path_of("k", *f));
        REQUIRE(raw.size() == 5 + 1 + 8 + 4 + 1 + 8 + 3 + 8);
        CHECK(std::string(raw.begin(), raw.begin() + 5) == "SPFH1");
        CHECK(raw[5] == Cache::kSchemaVersion);
        CHECK(raw[6] == 3);  // p, little-endian
        CHECK(raw[10] == 2);  // r
        std::uint64_t sum = 0;
        for (int i = 0; i < 8; ++i) sum |= std::uint64_t(raw[raw.size() - 8 + i]) << (8 * i);
        CHECK(sum == checksum64(raw.data(), raw.size() - 8));
        // no temporary files left behind
        int files = 0;
        for (const auto& e : fs::directory_iterator(dir.path)) files += e.is_regular_file();
        CHECK(files == 1);
    }

    TEST_CASE("corrupted entries are detected and dropped") {
        TempDir dir;
        Cache cache(dir.path);
        auto f = Field::get(2);
        cache.put("k", *f, bytes_of("some payload bytes"));
        const fs::path p = cache.path_of("k", *f);
        auto raw = read_file(p);
        raw[raw.size() / 2] ^= 0x10;
        std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(raw.data()), std::streamsize(raw.size()));
        CHECK_FALSE(cache.get("k", *f));
        CHECK_FALSE(fs::exists(p));
        // truncated files too
        cache.put("k", *f, bytes_of("x"));
        fs::resize_file(p, 7);
        CHECK_FALSE(cache.get("k", *f));
    }

    TEST_CASE("resolutions round trip through the payload codec") {
        for (auto [p, e] : {std::pair{2, "twist(id,1)"}, std::pair{3, "sym(3)"}, std::pair{2, "ext(2)*sym(2)"}}) {
            CAPTURE(e);
            auto f = Field::get(p);
            auto m = eval_cached(parse_expr(e), 3, f);
            Resolution res = resolve(m, 4);
            auto bytes = encode_resolution(res);
            Resolution back = decode_resolution(bytes, m);
            CHECK(back.certified());
            CHECK(encode_resolution(back) == bytes);
            auto n = eval_cached(parse_expr(e), 3, f);
            CHECK(ext(back, *n, 3) == ext(res, *n, 3));
        }
        auto m = eval_cached(parse_expr("id"), 2, Field::get(2));
        auto bytes = encode_resolution(resolve(m, 2));
        bytes.pop_back();
        CHECK_THROWS(decode_resolution(bytes, m));
        CHECK_THROWS(decode_resolution(encode_resolution(resolve(m, 2)), eval_cached(parse_expr("id"), 2, Field::get(3))));
    }

    TEST_CASE("cached resolutions") {
        TempDir dir;
        Cache cache(dir.path);
        auto f = Field::get(2);
        Expr e = parse_expr("twist(id,2)");
        bool hit = true;
        Resolution a = cached_resolution(e, 4, f, 4, {}, &cache, &hit);
        CHECK_FALSE(hit);
        Resolution b = cached_resolution(e, 4, f, 4, {}, &cache, &hit);
        CHECK(hit);
        CHECK(encode_resolution(a) == encode_resolution(b));
        ResolveOptions rev;
        rev.policy = CoverPolicy::Reverse;
        cached_resolution(e, 4, f, 4, rev, &cache, &hit);
        CHECK_FALSE(hit);
        cached_resolution(e, 3, f, 4, {}, &cache, &hit);
        CHECK_FALSE(hit);
    }

    TEST_CASE("ext job") {
        TempDir dir;
        auto res = run(ext_job("twist(id,1)", "twist(id,1)", 2, dir.path));
        CHECK(res.exit_code == kExitOk);
        CHECK(dims_of(res.document) == std::vector<long long>{1, 0, 1});
        CHECK(res.document.at("engine_version") == kEngineVersion);
        for (const auto& row : res.document.at("rows")) CHECK(row.contains("certificate"));
        CHECK(summary(res.document) == "(1,0,1)");
    }

    TEST_CASE("results are deterministic and cache hits are identical") {
        TempDir dir;
        Job j = ext_job("twist(id,2)", "twist(sym(2),1)", 3, dir.path);
        j.n = 4;
        const std::string first = run(j).document.dump();
        const std::string second = run(j).document.dump();
        j.use_cache = false;
        const std::string third = run(j).document.dump();
        j.workers = 2;
        const std::string fourth = run(j).document.dump();
        CHECK(first == second);
        CHECK(first == third);
        CHECK(first == fourth);
    }

    TEST_CASE("a cache hit is at least ten times faster on the D = 4 instance") {
        TempDir dir;
        Job j = ext_job("twist(id,2)", "twist(sym(2),1)", 3, dir.path);
        j.n = 4;
        using clock = std::chrono::steady_clock;
        auto timed = [&](const Job& job) {
            auto t0 = clock::now();
            auto res = run(job);
            return std::pair{std::chrono::duration<double>(clock::now() - t0).count(), res.document.dump()};
        };
        clear_eval_cache();
        auto [cold, doc] = timed(j);
        // The warm in-process recomputation is the stricter baseline: the
        // evaluation memo no longer contributes.
        Job uncached = j;
        uncached.use_cache = false;
        double recompute = 1e9, hit = 1e9;
        for (int i = 0; i < 3; ++i) {
            auto [t, d] = timed(uncached);
            recompute = std::min(recompute, t);
            CHECK(d == doc);
        }
        for (int i = 0; i < 3; ++i) {
            auto [t, d] = timed(j);
            hit = std::min(hit, t);
            CHECK(d == doc);
        }
        MESSAGE("cold " << cold << " s, recompute " << recompute << " s, hit " << hit << " s");
        CHECK(hit * 10 <= cold);
        CHECK(hit * 10 <= recompute);
    }

    TEST_CASE("oracle job") {
        Job j;
        j.command = "oracle";
        j.kind = "ffss";
        j.pair = "GS";
        j.twist = 1;
        j.p = 2;
        j.weight = 2;
        j.max_degree = 8;
        auto res = run(j);
        CHECK(summary(res.document) == "(1@0, 1@4, 2@8)");
        CHECK(res.document.at("rows").size() == 9);
        j.kind = "nope";
        CHECK_THROWS_AS(run(j), JobError);
    }

    TEST_CASE("validation") {
        auto code_of = [](const Job& j) {
            try {
                validate(j);
            } catch (const JobError& e) {
                return e.code();
            }
            return std::string("ok");
        };
        Job j = ext_job("id", "id", 2, "");
        CHECK(code_of(j) == "ok");
        Job bad = j;
        bad.command = "frobnicate";
        CHECK(code_of(bad) == "bad-command");
        bad = j;
        bad.p = 4;
        CHECK(code_of(bad) == "bad-field");
        bad = j;
        bad.f = "sym(";
        CHECK(code_of(bad) == "bad-expression");
        bad = j;
        bad.g = "sym(11)";
        CHECK(code_of(bad) == "over-cap");
        bad = j;
        bad.max_degree = -1;
        CHECK(code_of(bad) == "bad-parameter");
        bad = j;
        bad.policy = "random";
        CHECK(code_of(bad) == "bad-parameter");
        bad = j;
        bad.command = "fqcat-ext";
        bad.N = 9;
        CHECK(code_of(bad) == "over-cap");
        bad.N = 2;
        bad.q = 6;
        CHECK(code_of(bad) == "bad-field");
    }

    TEST_CASE("job documents round trip") {
        Job j = ext_job("sym(2)", "div(2)", 3, "/x");
        j.n = 3;
        j.policy = "reverse";
        Job back = Job::from_json(j.to_json());
        CHECK(back.to_json() == j.to_json());
        Job base;
        base.max_degree = 7;
        CHECK(Job::from_json(nlohmann::json{{"F", "id"}}, base).max_degree == 7);
    }

    TEST_CASE("csv flattening") {
        TempDir dir;
        auto res = run(ext_job("twist(id,1)", "twist(id,1)", 2, dir.path));
        std::string csv = to_csv(res.document);
        CHECK(csv.rfind("degree,dim,certificate\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
        CHECK(csv.find("\"exact (GF(2), n=2, resolution certified)\"") != std::string::npos);
    }

    TEST_CASE("compare and verdict jobs") {
        TempDir dir;
        Job j;
        j.command = "compare";
        j.f = "sym(1)";
        j.g = "sym(2)";
        j.q = 2;
        j.N = 2;
        j.max_degree = 0;
        j.cache_dir = dir.path.string();
        auto res = run(j);
        CHECK(res.exit_code == kExitOk);
        const auto& row = res.document.at("rows").at(0);
        for (const char* key : {"map", "f", "g", "q", "r", "s", "twist_level", "N", "rank_n", "components", "degree",
                                "source", "target", "rank", "verdict", "predicted_iso", "stability", "certificate"})
            CHECK_MESSAGE(row.contains(key), key);
        CHECK(row.at("verdict") == "not surjective");
        j.kind = "generalized";
        j.s = 2;
        CHECK(run(j).document.at("rows").at(0).at("verdict") == "iso");

        Job suite;
        suite.command = "suite";
        suite.kind = "verdicts";
        suite.instances = nlohmann::json::array({{{"map", "strong"}, {"F", "div(2)"}, {"G", "sym(2)"}, {"q", 4}}});
        auto s = run(suite);
        CHECK(s.exit_code == kExitOk);
        CHECK(s.document.at("rows").size() == 1);
        suite.instances = nlohmann::json::array({{{"map", "weak"}, {"F", "id"}, {"G", "id"}}});
        CHECK_THROWS_AS(run(suite), JobError);
    }

    TEST_CASE("command line") {
        TempDir dir;
        auto p = run_cli("ext --p 2 --F 'twist(id,1)' --G 'twist(id,1)' --max-degree 2 --format summary", dir.path);
        CHECK(p.status == 0);
        CHECK(p.out == "(1,0,1)\n");
        p = run_cli("oracle ffss --pair GS --r 1 --p 2 --weight 2 --max-degree 8 --format summary", dir.path);
        CHECK(p.out == "(1@0, 1@4, 2@8)\n");
        p = run_cli("ext --p 4 --F id --G id", dir.path);
        CHECK(p.status == kExitFailure);
        CHECK(nlohmann::json::parse(p.out).at("error").at("code") == "bad-field");
        p = run_cli("fqcat-ext --F id --G 'sym(2)' --q 2 --N 2 --max-degree 0 --format summary", dir.path);
        CHECK(p.out == "(1)\n");

        // A JSON config supplies defaults; explicit flags win.
        const fs::path cfg = dir.path / "job.json";
        std::ofstream(cfg) << R"js({"F": "twist(id,1)", "G": "twist(id,1)", "max_degree": 4})js";
        p = run_cli("ext --config '" + cfg.string() + "' --max-degree 3 --format summary", dir.path);
        CHECK(p.out == "(1,0,1,0)\n");
        p = run_cli("ext --config '" + cfg.string() + "' -o '" + (dir.path / "out.json").string() + "'", dir.path);
        CHECK(p.status == 0);
        CHECK(dims_of(nlohmann::json::parse(std::ifstream(dir.path / "out.json"))).size() == 5);
    }

    TEST_CASE("acceptance suite runs selected criteria") {
        auto r = acceptance_suite(1, {1, 9});
        REQUIRE(r.size() == 2);
        CHECK(r[0].pass);
        CHECK(r[1].pass);
        CHECK(format_criterion(r[0]).rfind("criterion 1: PASS", 0) == 0);
    }
}
