#include "ym/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ym/observables.hpp"

namespace ym {

using nlohmann::json;

const std::vector<std::string> kKnownExperiments = {
    "sample",          "mass_gap_scan",      "volume_scan",
    "beta_derivative", "large_n_scan",       "langevin_haar",
    "langevin_stationarity"};

namespace {

const std::set<std::string> kKnownKeys = {
    "schema_version", "experiment",    "d",
    "L",              "N",             "beta",
    "beta_map",       "c_d_star",      "seed",
    "sweeps",         "burn_in",       "measure_every",
    "n_batches",      "observable",    "max_distance",
    "l_values",       "n_values",      "delta",
    "target_plaquette", "probe_plaquette", "step_h",
    "steps",          "burn_steps",    "checkpoint_every"};

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void require(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
    require(j.is_object(), "top level must be an object");
    for (const auto& item : j.items())
        require(kKnownKeys.count(item.key()) > 0, "unknown key '" + item.key() + "'");

    RunConfig c;
    try {
        require(j.contains("schema_version"), "missing schema_version");
        c.schema_version = j.at("schema_version").get<int>();
        require(c.schema_version == 1, "unsupported schema_version");

        require(j.contains("experiment"), "missing experiment");
        c.experiment = j.at("experiment").get<std::string>();
        require(std::find(kKnownExperiments.begin(), kKnownExperiments.end(), c.experiment) !=
                    kKnownExperiments.end(),
                "unknown experiment '" + c.experiment + "'");

        require(j.contains("d"), "missing d");
        c.d = j.at("d").get<int>();
        require(j.contains("L"), "missing L");
        c.L = j.at("L").get<int>();
        require(j.contains("N"), "missing N");
        c.n = j.at("N").get<int>();
        require(j.contains("seed"), "missing seed");
        c.seed = j.at("seed").get<std::uint64_t>();

        require(j.contains("beta") != j.contains("beta_map"),
                "exactly one of beta / beta_map required");
        if (j.contains("beta")) {
            c.uniform_beta = true;
            c.beta = j.at("beta").get<double>();
        } else {
            c.uniform_beta = false;
            c.beta_map = j.at("beta_map").get<std::vector<double>>();
        }
        if (j.contains("c_d_star")) c.c_d_star = j.at("c_d_star").get<double>();

        if (j.contains("sweeps")) c.sweeps = j.at("sweeps").get<long long>();
        if (j.contains("burn_in")) c.burn_in = j.at("burn_in").get<long long>();
        if (j.contains("measure_every")) c.measure_every = j.at("measure_every").get<int>();
        if (j.contains("n_batches")) c.n_batches = j.at("n_batches").get<int>();
        if (j.contains("observable")) c.observable = j.at("observable").get<std::string>();
        if (j.contains("max_distance")) c.max_distance = j.at("max_distance").get<int>();
        if (j.contains("l_values")) c.l_values = j.at("l_values").get<std::vector<int>>();
        if (j.contains("n_values")) c.n_values = j.at("n_values").get<std::vector<int>>();
        if (j.contains("delta")) c.delta = j.at("delta").get<double>();
        if (j.contains("target_plaquette"))
            c.target_plaquette = j.at("target_plaquette").get<int>();
        if (j.contains("probe_plaquette")) c.probe_plaquette = j.at("probe_plaquette").get<int>();
        if (j.contains("step_h")) c.step_h = j.at("step_h").get<double>();
        if (j.contains("steps")) c.steps = j.at("steps").get<long long>();
        if (j.contains("burn_steps")) c.burn_steps = j.at("burn_steps").get<long long>();
        if (j.contains("checkpoint_every"))
            c.checkpoint_every = j.at("checkpoint_every").get<int>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(std::string("bad value type: ") + e.what());
    }

    require(c.d >= 2 && c.d <= 4, "d must be in [2, 4]");
    require(c.L >= 1, "L must be >= 1");
    require(c.n >= 2, "N must be >= 2");
    if (c.uniform_beta) require(c.beta >= 0.0, "beta must be >= 0");
    for (double b : c.beta_map) require(b >= 0.0, "beta_map entries must be >= 0");
    require(c.c_d_star > 0.0, "c_d_star must be > 0");
    require(c.sweeps >= 1, "sweeps must be >= 1");
    require(c.burn_in >= 0, "burn_in must be >= 0");
    require(c.measure_every >= 1, "measure_every must be >= 1");
    require(c.n_batches >= 2, "n_batches must be >= 2");
    require(c.max_distance >= 0, "max_distance must be >= 0");
    require(c.delta > 0.0, "delta must be > 0");
    require(c.step_h > 0.0, "step_h must be > 0");
    require(c.steps >= 1, "steps must be >= 1");
    require(c.burn_steps >= 0, "burn_steps must be >= 0");
    require(c.checkpoint_every >= 0, "checkpoint_every must be >= 0");
    try {
        loop_kind_from_name(c.observable);
    } catch (const std::exception&) {
        fail("unknown observable '" + c.observable + "'");
    }
    if (c.experiment == "volume_scan") {
        require(!c.l_values.empty(), "volume_scan requires l_values");
        for (int L : c.l_values) require(L >= 1, "l_values entries must be >= 1");
        require(c.uniform_beta, "volume_scan requires uniform beta");
    }
    if (c.experiment == "large_n_scan") {
        require(c.n_values.size() >= 2, "large_n_scan requires >= 2 n_values");
        for (int n : c.n_values) require(n >= 2, "n_values entries must be >= 2");
        require(c.uniform_beta, "large_n_scan requires uniform beta");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

std::string canonical_config_json(const RunConfig& c) {
    json j;  // nlohmann::json objects iterate in sorted key order
    j["schema_version"] = c.schema_version;
    j["experiment"] = c.experiment;
    j["d"] = c.d;
    j["L"] = c.L;
    j["N"] = c.n;
    if (c.uniform_beta) j["beta"] = c.beta;
    else j["beta_map"] = c.beta_map;
    j["c_d_star"] = c.c_d_star;
    j["seed"] = c.seed;
    j["sweeps"] = c.sweeps;
    j["burn_in"] = c.burn_in;
    j["measure_every"] = c.measure_every;
    j["n_batches"] = c.n_batches;
    j["observable"] = c.observable;
    j["max_distance"] = c.max_distance;
    j["l_values"] = c.l_values;
    j["n_values"] = c.n_values;
    j["delta"] = c.delta;
    j["target_plaquette"] = c.target_plaquette;
    j["probe_plaquette"] = c.probe_plaquette;
    j["step_h"] = c.step_h;
    j["steps"] = c.steps;
    j["burn_steps"] = c.burn_steps;
    j["checkpoint_every"] = c.checkpoint_every;
    return j.dump();
}

std::uint64_t config_hash(const RunConfig& c) {
    std::string s = canonical_config_json(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<double> resolved_beta(const RunConfig& c, int n_plaquettes) {
    if (c.uniform_beta) return std::vector<double>(n_plaquettes, c.beta);
    if (static_cast<int>(c.beta_map.size()) != n_plaquettes)
        throw ConfigError("config: beta_map has " + std::to_string(c.beta_map.size()) +
                          " entries, lattice has " + std::to_string(n_plaquettes) +
                          " plaquettes");
    return c.beta_map;
}

}  // namespace ym
