#pragma once

#include <algorithm>
#include <vector>

#include "ym/fields.hpp"
#include "ym/geometry.hpp"
#include "ym/model.hpp"
#include "ym/rng.hpp"
#include "ym/thetacond.hpp"

namespace ym {

struct SweepStats {
    long long proposed = 0;
    long long accepted = 0;
    double rate() const { return proposed ? double(accepted) / double(proposed) : 0.0; }
};

// Multiplies per-sweep acceptance into the step size until it sits in
// [lo, hi], then freeze() pins it for measurement sweeps. The step is capped:
// beyond a few units a Gaussian tangent step already proposes near-uniform
// rotations, and larger arguments only degrade the matrix exponential.
class StepTuner {
public:
    static constexpr double kEpsMin = 1e-8;
    static constexpr double kEpsMax = 4.0;

    explicit StepTuner(double eps, double lo = 0.40, double hi = 0.60)
        : eps_(std::clamp(eps, kEpsMin, kEpsMax)), lo_(lo), hi_(hi) {}
    void observe(const SweepStats& s) {
        if (frozen_ || s.proposed == 0) return;
        double r = s.rate();
        if (r > hi_) eps_ *= 1.12;
        else if (r < lo_) eps_ /= 1.12;
        eps_ = std::clamp(eps_, kEpsMin, kEpsMax);
    }
    void freeze() { frozen_ = true; }
    double eps() const { return eps_; }
    bool frozen() const { return frozen_; }

private:
    double eps_;
    double lo_, hi_;
    bool frozen_ = false;
};

// Plaquette holonomy trace with the matrix at edge e overridden.
cplx plaq_trace_override(const Lattice& lat, const GaugeField& f, int p, int e, const CMat& qe);

// One heatbath-order sweep of per-edge Metropolis moves on the unitary
// theory: proposal u_e -> exp(eps X) u_e, X Gaussian in u(n). Action
// sum_p n beta_p Re Tr U_p, differences taken over incident plaquettes only.
SweepStats metropolis_sweep_un(const Lattice& lat, const Couplings& cpl, GaugeField& u,
                               double eps, RngStream& rng);

// Same on SU(n) matrices with X Gaussian in su(n); samples the SU-restricted
// theory (angles frozen at zero).
SweepStats metropolis_sweep_sun(const Lattice& lat, const Couplings& cpl, GaugeField& q,
                                double eps, RngStream& rng);

// Per-edge joint move on the decomposed field: wrapped shift of theta_e plus
// an SU move of q_e, accepted with the decomposed action. Invariant law:
// uniform angles x Haar SU(n) tilted by exp(S_U).
SweepStats metropolis_sweep_joint(const Lattice& lat, const Couplings& cpl, DecomposedField& f,
                                  double eps_theta, double eps_q, RngStream& rng);

// Angle-only sweep at fixed Q: the conditional law of theta given Q.
// Edges with mask != 0 are held fixed (empty mask moves every edge).
SweepStats conditional_theta_sweep(const Lattice& lat, const Couplings& cpl, AngleField& theta,
                                   const GaugeField& q, double eps, RngStream& rng,
                                   const std::vector<char>& frozen_mask = {});

// Exact independent draw from the product of per-edge tilt densities
// nu_{a_e}; the reference measure of the cluster terms.
AngleField nu_product_sample(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                             RngStream& rng);

// One Euler step of the marginal Langevin dynamics on SU(n)^E:
//   q_e <- exp(h G_e + sqrt(2 h) xi_e) q_e,
// with G_e the su-valued drift coefficient built from conditional plaquette
// phases and xi_e Gaussian in su(n). The exponential map supplies the
// curvature (Casimir) drift of the invariant SDE. All drifts are evaluated
// on the incoming field.
void langevin_step(const Lattice& lat, const Couplings& cpl, GaugeField& q,
                   PhaseEstimator& phases, double h, RngStream& rng);

// Same step with phases == 1: Langevin for the Wilson action on SU(n).
void langevin_step_wilson(const Lattice& lat, const Couplings& cpl, GaugeField& q, double h,
                          RngStream& rng);

// Estimates conditional plaquette phases by Metropolis on the angle sector,
// warm-starting from the previous call's angles.
class NestedMcPhaseEstimator : public PhaseEstimator {
public:
    NestedMcPhaseEstimator(const Lattice& lat, Couplings cpl, int n_inner, double eps,
                           unsigned long long seed, unsigned long long stream);
    std::vector<cplx> phases(const GaugeField& q) override;
    const AngleField& angles() const { return theta_; }

private:
    const Lattice& lat_;
    Couplings cpl_;
    int n_inner_;
    double eps_;
    RngStream rng_;
    AngleField theta_;
    bool started_ = false;
};

}  // namespace ym
