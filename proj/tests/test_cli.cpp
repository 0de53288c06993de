#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string bin_path() {
    const char* b = std::getenv("YMLATTICE_BIN");
    if (!b) throw std::runtime_error("YMLATTICE_BIN not set");
    return b;
}

struct CmdResult {
    int code = -1;
    std::string out;
};

CmdResult run_cmd(const std::string& args) {
    std::string full = bin_path() + " " + args + " 2>&1";
    FILE* p = popen(full.c_str(), "r");
    if (!p) throw std::runtime_error("popen failed");
    std::string out;
    char buf[4096];
    std::size_t k;
    while ((k = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, k);
    int st = pclose(p);
    CmdResult r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.out = out;
    return r;
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = fs::path("cli_tmp") / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::uint64_t fnv64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string sample_config(long long sweeps = 40) {
    json j;
    j["schema_version"] = 1;
    j["experiment"] = "sample";
    j["d"] = 2;
    j["L"] = 1;
    j["N"] = 2;
    j["beta"] = 0.2;
    j["seed"] = 5;
    j["sweeps"] = sweeps;
    j["burn_in"] = 50;
    j["measure_every"] = 1;
    j["checkpoint_every"] = 16;
    return j.dump();
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("validate accepts a good config and prints its hash") {
    fs::path d = fresh_dir("validate_ok");
    write_file(d / "cfg.json", sample_config());
    auto r = run_cmd("validate --config " + (d / "cfg.json").string());
    CHECK(r.code == 0);
    CHECK(r.out.find("valid\n") != std::string::npos);
    CHECK(r.out.find("config_hash ") != std::string::npos);
    CHECK(r.out.find("\"experiment\":\"sample\"") != std::string::npos);
}

TEST_CASE("validate rejects malformed and invalid configs with exit 1") {
    fs::path d = fresh_dir("validate_bad");

    write_file(d / "broken.json", "{ not json");
    CHECK(run_cmd("validate --config " + (d / "broken.json").string()).code == 1);

    json j = json::parse(sample_config());
    j["volume"] = 3;  // unknown key
    write_file(d / "unknown.json", j.dump());
    CHECK(run_cmd("validate --config " + (d / "unknown.json").string()).code == 1);

    j = json::parse(sample_config());
    j["beta_map"] = {0.1, 0.1};  // both beta and beta_map
    write_file(d / "twobeta.json", j.dump());
    CHECK(run_cmd("validate --config " + (d / "twobeta.json").string()).code == 1);

    CHECK(run_cmd("validate --config " + (d / "missing.json").string()).code == 1);

    j = json::parse(sample_config());
    j["observable"] = "plaquette";  // not a loop kind
    write_file(d / "obs.json", j.dump());
    CHECK(run_cmd("validate --config " + (d / "obs.json").string()).code == 1);

    j = json::parse(sample_config());
    j["experiment"] = "beta_derivative";
    j["target_plaquette"] = 999;  // off the L=1 lattice
    write_file(d / "target.json", j.dump());
    CHECK(run_cmd("validate --config " + (d / "target.json").string()).code == 1);

    j = json::parse(sample_config());
    j["experiment"] = "mass_gap_scan";
    j["max_distance"] = 50;  // no plaquette pairs that far apart
    write_file(d / "dist.json", j.dump());
    CHECK(run_cmd("validate --config " + (d / "dist.json").string()).code == 1);

    j = json::parse(sample_config());
    j["beta_map"] = {0.1, 0.1, 0.1};  // wrong length for the 4-plaquette lattice
    j.erase("beta");
    write_file(d / "map.json", j.dump());
    CHECK(run_cmd("validate --config " + (d / "map.json").string()).code == 1);
}

TEST_CASE("bad command lines exit 1, help exits 0") {
    CHECK(run_cmd("").code == 1);                  // a subcommand is required
    CHECK(run_cmd("run --config x.json").code == 1);  // --out missing
    CHECK(run_cmd("frobnicate").code == 1);
    CHECK(run_cmd("--help").code == 0);
}

TEST_CASE("run sample produces csv, checkpoint and manifest") {
    fs::path d = fresh_dir("run_sample");
    write_file(d / "cfg.json", sample_config());
    auto r = run_cmd("run --config " + (d / "cfg.json").string() + " --out " +
                     (d / "out").string());
    CHECK(r.code == 0);
    CHECK(r.out.find("sample run complete") != std::string::npos);

    REQUIRE(fs::exists(d / "out/samples.csv"));
    REQUIRE(fs::exists(d / "out/checkpoint.bin"));
    REQUIRE(fs::exists(d / "out/config.json"));
    REQUIRE(fs::exists(d / "out/manifest.json"));

    std::string csv = read_file(d / "out/samples.csv");
    CHECK(csv.rfind("sweep,accept_rate,u_trace,su_trace,u1_phase\n", 0) == 0);
    CHECK(count_lines(csv) == 41);  // header + one row per sweep

    json m = json::parse(read_file(d / "out/manifest.json"));
    CHECK(m.at("status") == "complete");
    CHECK(m.at("experiment") == "sample");
    CHECK(m.at("schema_version") == 1);
    CHECK(m.at("results").at("sweeps") == 40);
    REQUIRE(m.at("outputs").is_array());
    for (const auto& o : m.at("outputs")) {
        std::string bytes = read_file(d / "out" / o.at("file").get<std::string>());
        CHECK(o.at("bytes").get<std::size_t>() == bytes.size());
        CHECK(o.at("fnv64").get<std::string>() == hex64(fnv64(bytes)));
    }

    // config hash in the manifest matches validate's report
    auto v = run_cmd("validate --config " + (d / "cfg.json").string());
    CHECK(v.out.find("config_hash " + m.at("config_hash").get<std::string>()) !=
          std::string::npos);
}

TEST_CASE("two runs of the same config are byte-identical") {
    fs::path d = fresh_dir("determinism");
    write_file(d / "cfg.json", sample_config());
    std::string cfg = (d / "cfg.json").string();
    CHECK(run_cmd("run --config " + cfg + " --out " + (d / "a").string()).code == 0);
    CHECK(run_cmd("run --config " + cfg + " --out " + (d / "b").string()).code == 0);
    for (const char* f : {"samples.csv", "checkpoint.bin", "manifest.json", "config.json"})
        CHECK(read_file(d / "a" / f) == read_file(d / "b" / f));
}

TEST_CASE("interrupted run resumes to the same bytes") {
    fs::path d = fresh_dir("resume");
    write_file(d / "cfg.json", sample_config());
    std::string cfg = (d / "cfg.json").string();

    CHECK(run_cmd("run --config " + cfg + " --out " + (d / "ref").string()).code == 0);

    auto r1 = run_cmd("run --config " + cfg + " --out " + (d / "cut").string() +
                      " --stop-after-sweeps 7");
    CHECK(r1.code == 0);
    CHECK(r1.out.find("stopped after 7 sweeps") != std::string::npos);
    CHECK(!fs::exists(d / "cut/manifest.json"));
    REQUIRE(fs::exists(d / "cut/checkpoint.bin"));

    // a second slice, then run to completion
    auto r2 = run_cmd("resume --out " + (d / "cut").string() + " --stop-after-sweeps 9");
    CHECK(r2.code == 0);
    CHECK(!fs::exists(d / "cut/manifest.json"));
    auto r3 = run_cmd("resume --out " + (d / "cut").string());
    CHECK(r3.code == 0);
    REQUIRE(fs::exists(d / "cut/manifest.json"));

    for (const char* f : {"samples.csv", "checkpoint.bin", "manifest.json"})
        CHECK(read_file(d / "ref" / f) == read_file(d / "cut" / f));

    // resuming a finished run is a no-op with the same outputs
    CHECK(run_cmd("resume --out " + (d / "cut").string()).code == 0);
    CHECK(read_file(d / "ref/manifest.json") == read_file(d / "cut/manifest.json"));
}

TEST_CASE("resume without a config errors, unwritable out dir is a runtime error") {
    fs::path d = fresh_dir("resume_bad");
    CHECK(run_cmd("resume --out " + (d / "nothing").string()).code == 1);

    write_file(d / "blocker", "x");
    write_file(d / "cfg.json", sample_config());
    auto r = run_cmd("run --config " + (d / "cfg.json").string() + " --out " +
                     (d / "blocker" / "sub").string());
    CHECK(r.code == 2);
}

TEST_CASE("mass gap scan runs end to end and resume reports completion") {
    fs::path d = fresh_dir("mass_gap");
    json j = json::parse(sample_config());
    j["experiment"] = "mass_gap_scan";
    j["L"] = 2;
    j["beta"] = 0.3;
    j["sweeps"] = 400;
    j["burn_in"] = 100;
    j["max_distance"] = 1;
    j["observable"] = "su_trace";
    j["n_batches"] = 8;
    j.erase("checkpoint_every");
    write_file(d / "cfg.json", j.dump());

    auto r = run_cmd("run --config " + (d / "cfg.json").string() + " --out " +
                     (d / "out").string());
    CHECK(r.code == 0);
    REQUIRE(fs::exists(d / "out/mass_gap.csv"));
    std::string csv = read_file(d / "out/mass_gap.csv");
    CHECK(csv.rfind("r,cov,sigma,n_pairs,used\n", 0) == 0);
    CHECK(count_lines(csv) == 3);  // header + rows for r = 0, 1

    json m = json::parse(read_file(d / "out/manifest.json"));
    CHECK(m.at("results").contains("slope"));
    CHECK(m.at("results").at("observable") == "su_trace");

    auto rr = run_cmd("resume --out " + (d / "out").string());
    CHECK(rr.code == 0);
    CHECK(rr.out.find("already complete") != std::string::npos);
}
