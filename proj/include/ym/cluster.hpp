#pragma once

// Cluster expansion of the conditional expectation E[f(theta) | Q].  With
// phi_p = exp(n beta_p Re((e^{i theta_p/n} - 1 - i theta_p/n) Tr Q_p)) - 1
// and nu the product of per-edge tilt densities,
//   E[f | Q] = sum_K I_K * Z[A_K] / Z[P],
// where K runs over plaquette sets whose connected components all touch the
// support lambda_f of f, I_K integrates f * prod_{p in K} phi_p against nu,
// A_K drops K, its edge-neighbors and every plaquette touching lambda_f, and
// Z[R] integrates prod_{p in R}(1 + phi_p) against nu.  Truncating K at size
// m gives the order-m approximation; the full sum is exact.

#include <functional>
#include <vector>

#include "ym/fields.hpp"
#include "ym/geometry.hpp"
#include "ym/model.hpp"
#include "ym/rng.hpp"
#include "ym/stats.hpp"

namespace ym {

struct AngleObservable {
    std::vector<int> support;  // edges the function reads
    std::function<double(const AngleField&)> eval;

    // Optional exact form f = Re(w * prod_p e^{i s_p theta_p / n}); enables
    // closed-form cluster integrals.
    bool is_phase = false;
    cplx w{1.0, 0.0};
    std::vector<int> s;  // per plaquette

    static AngleObservable constant_one(const Lattice& lat);
    // Re(w * e^{i theta_p / n})
    static AngleObservable plaquette_phase(const Lattice& lat, int n, int p, cplx w);
};

// log Z[R]: integral of prod_{p in R}(1 + phi_p) against nu, evaluated in
// closed form (Fourier series with couplings zeroed off R plus the edge tilt
// left over from the plaquettes outside R).
double region_log_weight(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                         const std::vector<int>& region);

// Z[numer] / Z[denom] by Monte Carlo over shared nu draws.
EstimateWithError region_ratio_mc(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                                  const std::vector<int>& numer, const std::vector<int>& denom,
                                  long long n_samples, int n_batches, RngStream& rng);

// Exact integral of e^{i sum_p s_p theta_p / n} * prod_{p in K} phi_p
// against nu, by inclusion-exclusion over subsets of K.
cplx nu_phase_integral(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                       const std::vector<int>& cluster, const std::vector<int>& s);

// I_K via Gauss-Legendre over the edges K and f touch (capped at 6 dims).
double nu_cluster_integral_quad(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                                const std::vector<int>& cluster, const AngleObservable& f,
                                int nodes);

// I_K via Monte Carlo on nu draws.
EstimateWithError nu_cluster_integral_mc(const Lattice& lat, const Couplings& cpl,
                                         const GaugeField& q, const std::vector<int>& cluster,
                                         const AngleObservable& f, long long n_samples,
                                         int n_batches, RngStream& rng);

struct ClusterOptions {
    int m_max = 2;               // largest cluster size
    int quad_nodes = 16;
    long long mc_samples = 20000;
    int n_batches = 16;
    unsigned long long seed = 1;
    unsigned long long stream = 901;
    bool exact_ratios = false;   // closed-form Z ratios (small lattices)
    bool exact_phase_ik = false; // closed-form I_K when f.is_phase
};

struct ClusterTerm {
    std::vector<int> cluster;
    double i_k = 0.0;
    double i_k_sigma = 0.0;
    double ratio = 0.0;  // Z[A_K] / Z[P]
    double ratio_sigma = 0.0;
    double term = 0.0;
    double term_sigma = 0.0;
};

struct ClusterExpansionResult {
    double value = 0.0;  // sum of terms
    double sigma = 0.0;  // quadrature-combined term sigmas
    std::vector<ClusterTerm> terms;
    std::vector<double> partial_by_order;  // partial_by_order[m]: |K| <= m
};

// lambda_f must cover every edge f reads (f.support and, for phase
// observables, the loop edges of plaquettes with s_p != 0); otherwise the
// factorization behind Z[A_K] breaks.  Throws std::invalid_argument on a
// violation.
ClusterExpansionResult expand_conditional(const Lattice& lat, const Couplings& cpl,
                                          const GaugeField& q, const AngleObservable& f,
                                          const std::vector<int>& lambda_f,
                                          const ClusterOptions& opt);

// E[f | Q] by full tensor quadrature (free dims <= 6); the oracle the
// expansion is checked against.
double brute_force_conditional(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                               const AngleObservable& f, int nodes_per_dim);

// Z[region \ {removed_p}] / Z[region] in closed form.
double partition_ratio(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                       const std::vector<int>& region, int removed_p);

// E[f | boundary at theta_a] - E[f | boundary at theta_b], the boundary
// edges pinned and the rest integrated by quadrature.
double boundary_sensitivity(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                            const AngleObservable& f, const std::vector<int>& boundary_edges,
                            const std::vector<double>& theta_a, const std::vector<double>& theta_b,
                            int nodes_per_dim);

// Cov(f, g | Q) = E[fg|Q] - E[f|Q] E[g|Q]. Closed-form Fourier moments when
// both observables carry a phase form (any lattice the series handles),
// tensor quadrature otherwise (free dims <= 6).
double conditional_covariance(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                              const AngleObservable& f, const AngleObservable& g,
                              int nodes_per_dim = 24);

// Direct Metropolis estimate of E[f | Q] for cross-checks: tunes the step
// during burn-in, then averages f over measurement sweeps.
EstimateWithError conditional_expectation_mc(const Lattice& lat, const Couplings& cpl,
                                             const GaugeField& q, const AngleObservable& f,
                                             long long burn_sweeps, long long sweeps,
                                             int n_batches, RngStream& rng);

}  // namespace ym
