#pragma once

// Evaluators for the angle sector at fixed SU(N) field Q.  The conditional
// law of the angles theta given Q has density proportional to exp(S_U) with
// S_U(theta) = sum_p n*beta_p*Re(exp(i*theta_p/n)*Tr Q_p), a product of
// per-plaquette factors coupled through the edge angles.
//
// Two independent implementations:
//  * ThetaQuadrature: Gauss-Legendre tensor grid over the free edges.
//    Exact up to quadrature error, capped at 6 free dimensions.
//  * ThetaFourier: expands each plaquette factor in a Fourier-Bessel series
//    exp(z*cos(x/n + phi)) = sum_k I_k(z) exp(ik*phi) exp(ikx/n); the edge
//    integrals then factorize and the partition function becomes a sum over
//    integer frequency tuples.  Exact up to series truncation, practical for
//    a handful of plaquettes.
// Both support conditioning on a subset of edges held at fixed angles.

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "ym/fields.hpp"
#include "ym/geometry.hpp"
#include "ym/model.hpp"

namespace ym {

// Gauss-Legendre nodes and weights on [lo, hi].  1 <= n <= 64.
void gauss_legendre(int n, double lo, double hi, std::vector<double>& nodes,
                    std::vector<double>& weights);

class ThetaQuadrature {
 public:
  ThetaQuadrature(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                  int nodes = 24);

  // Pins the given edges to the given angles; they drop out of the grid.
  void fix_edge(int edge, double value);

  int free_dims() const { return static_cast<int>(free_.size()); }

  // E[f(theta) | Q, pinned edges] under the conditional law.
  double expect(const std::function<double(const AngleField&)>& f) const;
  cplx expect_c(const std::function<cplx(const AngleField&)>& f) const;

  // log integral of exp(S_U) over the free edges (pinned edges substituted).
  double log_z() const;

  // E[exp(-i*theta_p/n) | Q, pinned] for every plaquette.
  std::vector<cplx> plaquette_phases() const;

 private:
  void tensor_sum(const std::function<void(const AngleField&, double)>& sink) const;

  const Lattice& lat_;
  Couplings cpl_;
  int n_;
  std::vector<cplx> tr_p_;          // Tr Q_p per plaquette
  std::vector<char> fixed_;
  AngleField base_;                 // pinned values, 0 elsewhere
  std::vector<int> free_;
  std::vector<double> nodes_, weights_;
  double s_ref_;                    // subtracted from S_U before exp
};

class ThetaFourier {
 public:
  struct Options {
    double tol = 1e-15;       // per-plaquette series cutoff relative to I_0
    int max_k = 64;           // hard cap on per-plaquette frequency
    double max_terms = 6.0e7; // refuse larger frequency boxes
  };

  ThetaFourier(const Lattice& lat, const Couplings& cpl, const GaugeField& q);
  ThetaFourier(const Lattice& lat, const Couplings& cpl, const GaugeField& q, Options opt);

  void fix_edge(int edge, double value);

  // Adds a real per-edge factor exp(b_e * theta_e) to the integrand; with
  // couplings zeroed off a plaquette region this evaluates the tilted
  // reference integrals of the cluster terms in closed form.
  void set_edge_tilts(const std::vector<double>& b);

  // log integral of exp(S_U) * prod_e exp(b_e theta_e) d theta over free
  // edges.
  double log_z() const;

  // E[prod_p exp(i*s_p*theta_p/n) | Q, pinned].  s indexed by plaquette.
  cplx phase_moment(const std::vector<int>& s) const;

  // Unnormalized integral of exp(S_U) * tilt * prod_p e^{i s_p theta_p / n}.
  cplx raw_moment(const std::vector<int>& s) const;

  // E[exp(-i*theta_p/n) | Q, pinned] for every plaquette, one shared pass.
  std::vector<cplx> plaquette_phases() const;

 private:
  struct Target {
    std::vector<int> shift;        // per-edge frequency offset
    cplx acc;
  };
  void run(std::vector<Target>& targets) const;
  cplx edge_factor(int edge, long long m) const;

  const Lattice& lat_;
  Couplings cpl_;
  int n_;
  Options opt_;
  std::vector<char> fixed_;
  AngleField fixed_val_;
  std::vector<double> tilt_;
  std::vector<double> rho_;         // |Tr Q_p|
  std::vector<double> phi_;         // arg Tr Q_p
  std::vector<int> kmax_;           // per-plaquette truncation
  std::vector<std::vector<cplx>> coef_;  // a_{p,k}, index k + kmax_[p]
  // log of the target-independent prefactor: pinned-only plaquette weights
  // and 2 pi per free edge off every plaquette. Set by run().
  mutable double const_log_;
};

// Shared interface for estimating the per-plaquette conditional phases
// c_p = E[exp(-i*theta_p/n) | Q] used by the marginal drift.
class PhaseEstimator {
 public:
  virtual ~PhaseEstimator() = default;
  virtual std::vector<cplx> phases(const GaugeField& q) = 0;
};

class FourierPhaseEstimator : public PhaseEstimator {
 public:
  FourierPhaseEstimator(const Lattice& lat, Couplings cpl,
                        ThetaFourier::Options opt = ThetaFourier::Options())
      : lat_(lat), cpl_(std::move(cpl)), opt_(opt) {}
  std::vector<cplx> phases(const GaugeField& q) override {
    return ThetaFourier(lat_, cpl_, q, opt_).plaquette_phases();
  }

 private:
  const Lattice& lat_;
  Couplings cpl_;
  ThetaFourier::Options opt_;
};

class QuadraturePhaseEstimator : public PhaseEstimator {
 public:
  QuadraturePhaseEstimator(const Lattice& lat, Couplings cpl, int nodes = 24)
      : lat_(lat), cpl_(std::move(cpl)), nodes_(nodes) {}
  std::vector<cplx> phases(const GaugeField& q) override {
    return ThetaQuadrature(lat_, cpl_, q, nodes_).plaquette_phases();
  }

 private:
  const Lattice& lat_;
  Couplings cpl_;
  int nodes_;
};

// Zero-temperature angle sector: theta == 0, so every phase is exactly 1.
// Turns the marginal drift into the plain Wilson drift.
class UnitPhaseEstimator : public PhaseEstimator {
 public:
  explicit UnitPhaseEstimator(const Lattice& lat) : lat_(lat) {}
  std::vector<cplx> phases(const GaugeField&) override {
    return std::vector<cplx>(static_cast<std::size_t>(lat_.n_plaquettes()),
                             cplx(1.0, 0.0));
  }

 private:
  const Lattice& lat_;
};

}  // namespace ym
