#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ym {

// Invalid user input (bad config file, bad arguments). The CLI maps this to
// exit code 1; any other failure is a runtime error with exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    int schema_version = 1;
    std::string experiment;  // see kKnownExperiments

    int d = 2;
    int L = 2;
    int n = 2;  // JSON key "N"
    bool uniform_beta = true;
    double beta = 0.0;
    std::vector<double> beta_map;  // per plaquette, replaces uniform beta
    double c_d_star = 1.0;
    std::uint64_t seed = 1;

    long long sweeps = 20000;
    long long burn_in = 2000;
    int measure_every = 1;
    int n_batches = 32;

    std::string observable = "u_trace";
    int max_distance = 3;        // mass_gap_scan
    std::vector<int> l_values;   // volume_scan
    std::vector<int> n_values;   // large_n_scan
    double delta = 0.02;         // beta_derivative
    int target_plaquette = 0;
    int probe_plaquette = -1;    // -1: same as target
    double step_h = 0.004;       // langevin experiments
    long long steps = 20000;
    long long burn_steps = 2000;
    int checkpoint_every = 1000;  // sample experiment; 0 = final only
};

extern const std::vector<std::string> kKnownExperiments;

// Parses and validates; throws ConfigError on malformed JSON, unknown keys,
// missing required keys or out-of-range values.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical (sorted-key, defaults-resolved) JSON of the config.
std::string canonical_config_json(const RunConfig& c);

// FNV-1a over the canonical JSON; ties checkpoints to their config.
std::uint64_t config_hash(const RunConfig& c);

// Resolved per-plaquette couplings; validates beta_map length.
std::vector<double> resolved_beta(const RunConfig& c, int n_plaquettes);

}  // namespace ym
