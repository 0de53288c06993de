#include "ym/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ym/checkpoint.hpp"
#include "ym/config.hpp"
#include "ym/experiments.hpp"
#include "ym/thetacond.hpp"

namespace ym {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr unsigned long long kStreamSample = 11;

std::uint64_t fnv1a_bytes(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << text;
    if (!os) throw std::runtime_error("write failed for " + path);
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

McOptions mc_from(const RunConfig& c) {
    McOptions mc;
    mc.burn_sweeps = c.burn_in;
    mc.sweeps = c.sweeps;
    mc.measure_every = c.measure_every;
    mc.n_batches = c.n_batches;
    mc.seed = c.seed;
    return mc;
}

json output_entry(const std::string& dir, const std::string& name) {
    std::string bytes = read_file(dir + "/" + name);
    json o;
    o["file"] = name;
    o["bytes"] = bytes.size();
    o["fnv64"] = hex64(fnv1a_bytes(bytes));
    return o;
}

void write_manifest(const std::string& dir, const RunConfig& c,
                    const std::vector<std::string>& files, const json& results) {
    json m;
    m["schema_version"] = c.schema_version;
    m["experiment"] = c.experiment;
    m["config_hash"] = hex64(config_hash(c));
    m["status"] = "complete";
    m["results"] = results;
    json outs = json::array();
    for (const auto& f : files) outs.push_back(output_entry(dir, f));
    m["outputs"] = outs;
    write_text(dir + "/manifest.json", m.dump(2) + "\n");
}

// Structural checks beyond per-key validation: lattice size, plaquette ids.
void check_against_lattice(const RunConfig& c) {
    double vertices = 1.0;
    for (int a = 0; a < c.d; ++a) vertices *= 2.0 * c.L + 1.0;
    if (vertices > 2e7) throw ConfigError("config: lattice too large");
    if (c.experiment == "volume_scan" || c.experiment == "large_n_scan") return;
    Lattice lat = Lattice::cube(c.d, c.L);
    resolved_beta(c, lat.n_plaquettes());
    if (c.experiment == "beta_derivative") {
        if (c.target_plaquette < 0 || c.target_plaquette >= lat.n_plaquettes())
            throw ConfigError("config: target_plaquette out of range");
        int probe = c.probe_plaquette < 0 ? c.target_plaquette : c.probe_plaquette;
        if (probe >= lat.n_plaquettes()) throw ConfigError("config: probe_plaquette out of range");
    }
    if (c.experiment == "mass_gap_scan") {
        if (plaquette_pairs_at_distance(lat, c.max_distance).empty())
            throw ConfigError("config: max_distance exceeds the lattice");
    }
}

Couplings couplings_for(const RunConfig& c, const Lattice& lat) {
    Couplings cpl;
    cpl.n = c.n;
    cpl.c_d_star = c.c_d_star;
    cpl.beta = resolved_beta(c, lat.n_plaquettes());
    return cpl;
}

// Keeps the header and every row with sweep <= last_sweep.
void truncate_samples(const std::string& path, long long last_sweep) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("resume: missing " + path);
    std::string line, out;
    if (std::getline(is, line)) out = line + "\n";
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double sweep = std::strtod(line.c_str(), nullptr);
        if (sweep <= static_cast<double>(last_sweep)) out += line + "\n";
    }
    write_text(path, out);
}

int run_sample(const RunConfig& c, const std::string& dir, long long stop_after, bool resume) {
    Lattice lat = Lattice::cube(c.d, c.L);
    Couplings cpl = couplings_for(c, lat);
    UnChain chain(lat, cpl, c.n, c.seed, kStreamSample);
    const std::string csv = dir + "/samples.csv";
    const std::string ckpath = dir + "/checkpoint.bin";
    const std::uint64_t chash = config_hash(c);

    std::vector<std::vector<OrientedEdge>> loops(lat.n_plaquettes());
    for (int p = 0; p < lat.n_plaquettes(); ++p) loops[p] = plaquette_loop(lat, p);

    long long start_sweep = 0;
    if (resume && fs::exists(ckpath)) {
        Checkpoint ck = read_checkpoint(ckpath);
        if (ck.config_hash != chash)
            throw ConfigError("resume: checkpoint belongs to a different config");
        chain.field() = ck.field;
        chain.rng().restore(ck.rng_state);
        chain.restore_frozen(ck.eps);
        start_sweep = ck.sweep;
        truncate_samples(csv, start_sweep);
    } else {
        chain.burn(c.burn_in);
        write_text(csv, "sweep,accept_rate,u_trace,su_trace,u1_phase\n");
    }

    auto save = [&](long long sweep) {
        Checkpoint ck;
        ck.config_hash = chash;
        ck.sweep = sweep;
        ck.eps = chain.eps();
        ck.rng_state = chain.rng().state();
        ck.field = chain.field();
        write_checkpoint(ckpath, ck);
    };

    if (start_sweep < c.sweeps) {
        std::ofstream os(csv, std::ios::binary | std::ios::app);
        if (!os) throw std::runtime_error("cannot open " + csv);
        long long done_here = 0;
        for (long long s = start_sweep + 1; s <= c.sweeps; ++s) {
            SweepStats st = chain.sweep();
            if (s % c.measure_every == 0) {
                DecomposedField df = decompose_field(chain.field());
                double mu = 0.0, ms = 0.0, mp = 0.0;
                for (int p = 0; p < lat.n_plaquettes(); ++p) {
                    mu += loop_value(df, loops[p], LoopKind::u_trace);
                    ms += loop_value(df, loops[p], LoopKind::su_trace);
                    mp += loop_value(df, loops[p], LoopKind::u1_phase);
                }
                const double np = lat.n_plaquettes();
                os << format_g17(double(s)) << "," << format_g17(st.rate()) << ","
                   << format_g17(mu / np) << "," << format_g17(ms / np) << ","
                   << format_g17(mp / np) << "\n";
            }
            ++done_here;
            bool interrupted = stop_after > 0 && done_here >= stop_after && s < c.sweeps;
            if ((c.checkpoint_every > 0 && s % c.checkpoint_every == 0) || interrupted ||
                s == c.sweeps) {
                os.flush();
                save(s);
            }
            if (interrupted) {
                std::cout << "stopped after " << done_here << " sweeps at sweep " << s
                          << " (resume to continue)\n";
                return 0;
            }
        }
    }

    json results;
    results["sweeps"] = c.sweeps;
    results["final_eps"] = chain.eps();
    write_manifest(dir, c, {"samples.csv", "checkpoint.bin"}, results);
    std::cout << "sample run complete: " << c.sweeps << " sweeps\n";
    return 0;
}

int run_experiment(const RunConfig& c, const std::string& dir, long long stop_after,
                   bool resume) {
    if (c.experiment == "sample") return run_sample(c, dir, stop_after, resume);
    if (resume && fs::exists(dir + "/manifest.json")) {
        std::cout << "already complete\n";
        return 0;
    }

    json results;
    std::vector<std::string> files;
    if (c.experiment == "mass_gap_scan") {
        Lattice lat = Lattice::cube(c.d, c.L);
        auto res = mass_gap_scan(lat, couplings_for(c, lat), c.n,
                                 loop_kind_from_name(c.observable), c.max_distance, mc_from(c));
        write_csv(dir + "/mass_gap.csv", res.table());
        files = {"mass_gap.csv"};
        results["fit_ok"] = res.fit_ok;
        results["slope"] = res.slope;
        results["slope_sigma"] = res.slope_sigma;
        results["r2"] = res.r2;
        results["n_used"] = res.n_used;
        results["observable"] = loop_kind_name(res.kind);
    } else if (c.experiment == "volume_scan") {
        auto res = volume_scan(c.d, c.n, c.beta, c.c_d_star, c.l_values,
                               loop_kind_from_name(c.observable), mc_from(c));
        write_csv(dir + "/volume_scan.csv", res.table());
        files = {"volume_scan.csv"};
        const auto& rows = res.rows;
        if (rows.size() >= 2) {
            const auto& a = rows[rows.size() - 2];
            const auto& b = rows[rows.size() - 1];
            results["last_diff"] = b.mean - a.mean;
            results["last_diff_sigma"] = std::sqrt(a.sigma * a.sigma + b.sigma * b.sigma);
        }
        results["observable"] = loop_kind_name(res.kind);
    } else if (c.experiment == "beta_derivative") {
        Lattice lat = Lattice::cube(c.d, c.L);
        int probe = c.probe_plaquette < 0 ? c.target_plaquette : c.probe_plaquette;
        auto res = beta_derivative_check(lat, couplings_for(c, lat), c.n, c.target_plaquette,
                                         probe, c.delta, mc_from(c));
        write_csv(dir + "/beta_derivative.csv", res.table());
        files = {"beta_derivative.csv"};
        results["fd"] = res.fd;
        results["cov"] = res.cov;
        results["abs_diff"] = std::abs(res.fd - res.cov);
        results["combined_sigma"] =
            std::sqrt(res.fd_sigma * res.fd_sigma + res.cov_sigma * res.cov_sigma);
    } else if (c.experiment == "large_n_scan") {
        auto res = large_n_scan(c.d, c.L, c.beta, c.c_d_star, c.n_values, mc_from(c));
        write_csv(dir + "/large_n.csv", res.table());
        files = {"large_n.csv"};
        results["fit_ok"] = res.fit_ok;
        results["slope"] = res.slope;
        results["slope_sigma"] = res.slope_sigma;
    } else if (c.experiment == "langevin_haar") {
        Lattice lat = Lattice::cube(c.d, c.L);
        auto res =
            langevin_haar_check(lat, c.n, c.step_h, c.burn_steps, c.steps, c.n_batches, c.seed);
        write_csv(dir + "/langevin_haar.csv", res.table());
        files = {"langevin_haar.csv"};
        results["mean_abs2"] = res.mean_abs2;
        results["abs2_sigma"] = res.abs2_sigma;
        results["max_defect"] = res.max_defect;
    } else if (c.experiment == "langevin_stationarity") {
        Lattice lat = Lattice::cube(c.d, c.L);
        Couplings cpl = couplings_for(c, lat);
        ThetaFourier::Options opt;
        opt.tol = 1e-8;
        opt.max_k = 24;
        FourierPhaseEstimator phases(lat, cpl, opt);
        auto res = langevin_stationarity_check(lat, cpl, c.n, phases, c.step_h, c.burn_steps,
                                               c.steps, c.burn_in, c.sweeps, c.n_batches, c.seed);
        write_csv(dir + "/langevin_stationarity.csv", res.table());
        files = {"langevin_stationarity.csv"};
        results["langevin_mean"] = res.langevin_mean;
        results["reference_mean"] = res.reference_mean;
        results["abs_diff"] = std::abs(res.langevin_mean - res.reference_mean);
        results["combined_sigma"] = std::sqrt(res.langevin_sigma * res.langevin_sigma +
                                              res.reference_sigma * res.reference_sigma);
    } else {
        throw ConfigError("config: unknown experiment '" + c.experiment + "'");
    }

    write_manifest(dir, c, files, results);
    std::cout << c.experiment << " complete\n";
    return 0;
}

int do_validate(const std::string& cfg_path) {
    RunConfig c = load_config(cfg_path);
    check_against_lattice(c);
    std::cout << canonical_config_json(c) << "\n"
              << "config_hash " << hex64(config_hash(c)) << "\n"
              << "valid\n";
    return 0;
}

int do_run(const std::string& cfg_path, const std::string& out_dir, long long stop_after) {
    RunConfig c = load_config(cfg_path);
    check_against_lattice(c);
    fs::create_directories(out_dir);
    write_text(out_dir + "/config.json", canonical_config_json(c) + "\n");
    return run_experiment(c, out_dir, stop_after, false);
}

int do_resume(const std::string& out_dir, long long stop_after) {
    const std::string cfg = out_dir + "/config.json";
    if (!fs::exists(cfg)) throw ConfigError("resume: no config.json in " + out_dir);
    RunConfig c = load_config(cfg);
    check_against_lattice(c);
    return run_experiment(c, out_dir, stop_after, true);
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"lattice gauge sampling and verification runs"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long stop_after = 0;

    auto* validate = app.add_subcommand("validate", "check a config file");
    validate->add_option("--config", config_path, "config JSON path")->required();

    auto* run = app.add_subcommand("run", "run the configured experiment");
    run->add_option("--config", config_path, "config JSON path")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--stop-after-sweeps", stop_after,
                    "stop (with checkpoint) after this many sweeps; testing aid");

    auto* resume = app.add_subcommand("resume", "continue an interrupted run");
    resume->add_option("--out", out_dir, "output directory of the interrupted run")->required();
    resume->add_option("--stop-after-sweeps", stop_after,
                       "stop (with checkpoint) after this many sweeps; testing aid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (validate->parsed()) return do_validate(config_path);
        if (run->parsed()) return do_run(config_path, out_dir, stop_after);
        if (resume->parsed()) return do_resume(out_dir, stop_after);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace ym
