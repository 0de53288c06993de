#pragma once

#include <string>
#include <vector>

#include "ym/fields.hpp"
#include "ym/geometry.hpp"
#include "ym/model.hpp"
#include "ym/observables.hpp"
#include "ym/samplers.hpp"
#include "ym/stats.hpp"

namespace ym {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Deterministic CSV: header line, then %.17g fields. Overwrites.
void write_csv(const std::string& path, const Table& t);
std::string format_g17(double v);

struct McOptions {
    long long burn_sweeps = 2000;
    long long sweeps = 20000;
    int measure_every = 1;
    int n_batches = 32;
    unsigned long long seed = 1;
    double eps0 = 0.6;
};

// Tuned per-edge Metropolis chain on the unitary theory.
class UnChain {
public:
    UnChain(const Lattice& lat, const Couplings& cpl, int n, unsigned long long seed,
            unsigned long long stream, double eps0 = 0.6);
    void burn(long long sweeps);  // adapts the step, then freezes it
    SweepStats sweep();
    GaugeField& field() { return u_; }
    const GaugeField& field() const { return u_; }
    const Lattice& lattice() const { return lat_; }
    const Couplings& couplings() const { return cpl_; }
    RngStream& rng() { return rng_; }
    double eps() const { return tuner_.eps(); }
    void restore_frozen(double eps);  // resume path: skip tuning

private:
    const Lattice& lat_;
    Couplings cpl_;
    GaugeField u_;
    RngStream rng_;
    StepTuner tuner_;
};

// Covariance of same-shape plaquette observables against support distance,
// translation-averaged, with a weighted log-linear fit over the rows that
// clear the noise floor |cov| >= 2 sigma.
struct MassGapRow {
    int r = 0;
    double cov = 0.0;
    double sigma = 0.0;
    int n_pairs = 0;
    bool used = false;
};
struct MassGapResult {
    LoopKind kind = LoopKind::u_trace;
    std::vector<MassGapRow> rows;
    bool fit_ok = false;
    double slope = 0.0, slope_sigma = 0.0, r2 = 0.0;
    int n_used = 0;
    Table table() const;
};
MassGapResult mass_gap_scan(const Lattice& lat, const Couplings& cpl, int n, LoopKind kind,
                            int max_r, const McOptions& mc);

// Mean of the center-plaquette observable across lattice sizes.
struct VolumeScanRow {
    int L = 0;
    double mean = 0.0;
    double sigma = 0.0;
};
struct VolumeScanResult {
    LoopKind kind = LoopKind::u_trace;
    std::vector<VolumeScanRow> rows;
    Table table() const;
};
VolumeScanResult volume_scan(int d, int n, double beta, double c_d_star,
                             const std::vector<int>& l_values, LoopKind kind,
                             const McOptions& mc);

// d<f>/d beta_target by central finite difference vs the covariance identity
// d<f>/d beta_p = Cov(f, n Re Tr U_p); f is the unnormalized trace observable
// of the probe plaquette.
struct BetaDerivativeResult {
    int target = -1, probe = -1;
    double delta = 0.0;
    double fd = 0.0, fd_sigma = 0.0;
    double cov = 0.0, cov_sigma = 0.0;
    Table table() const;
};
BetaDerivativeResult beta_derivative_check(const Lattice& lat, const Couplings& cpl, int n,
                                           int target_plaquette, int probe_plaquette,
                                           double delta, const McOptions& mc);

// Var(W_plaquette) and the two-loop factorization discrepancy
// |E[W W'] - E[W] E[W']| across matrix sizes, with a log-log variance slope.
struct LargeNRow {
    int n = 0;
    double var_w = 0.0, var_sigma = 0.0;
    double disc = 0.0, disc_sigma = 0.0;
};
struct LargeNResult {
    std::vector<LargeNRow> rows;
    bool fit_ok = false;
    double slope = 0.0, slope_sigma = 0.0;
    Table table() const;
};
LargeNResult large_n_scan(int d, int L, double beta, double c_d_star,
                          const std::vector<int>& n_values, const McOptions& mc);

// Free Langevin dynamics (beta = 0): stationary law is product Haar on
// SU(n); checks trace moments and group-membership drift.
struct LangevinHaarResult {
    double mean_re_tr = 0.0, mean_re_sigma = 0.0;
    double mean_abs2 = 0.0, abs2_sigma = 0.0;  // Haar: E|Tr|^2 = 1
    double max_defect = 0.0;                   // unitarity + det drift
    Table table() const;
};
LangevinHaarResult langevin_haar_check(const Lattice& lat, int n, double h, long long burn_steps,
                                       long long steps, int n_batches, unsigned long long seed);

// Marginal Langevin stationary mean of the SU plaquette trace vs the
// Q-marginal of the joint (theta, Q) Metropolis chain.
struct LangevinStationarityResult {
    double langevin_mean = 0.0, langevin_sigma = 0.0;
    double reference_mean = 0.0, reference_sigma = 0.0;
    Table table() const;
};
LangevinStationarityResult langevin_stationarity_check(const Lattice& lat, const Couplings& cpl,
                                                       int n, PhaseEstimator& phases, double h,
                                                       long long burn_steps, long long steps,
                                                       long long ref_burn, long long ref_sweeps,
                                                       int n_batches, unsigned long long seed);

// Conditional covariance of two plaquette-phase observables under the
// theta | Q law, by Metropolis on the angle sector.
EstimateWithError conditional_phase_covariance_mc(const Lattice& lat, const Couplings& cpl,
                                                  const GaugeField& q, int pa, int pb,
                                                  long long burn_sweeps, long long sweeps,
                                                  int n_batches, RngStream& rng);

}  // namespace ym
