#pragma once

#include <vector>

#include "ym/fields.hpp"
#include "ym/geometry.hpp"
#include "ym/su.hpp"

namespace ym {

// Per-plaquette inverse temperatures in 't Hooft scaling: every plaquette
// contributes n * beta_p * Re Tr(U_p) to the action.
struct Couplings {
    int n = 2;
    double c_d_star = 1.0;
    std::vector<double> beta;

    static Couplings uniform(const Lattice& lat, int n, double beta, double c_d_star = 1.0);
    double beta_max() const;
};

// Small-coupling regime constants (d = lattice dimension).
double beta_star(int d);           // 10^{-6d}
double phi_regime_bound(int d);    // 10^{4-6d}, valid for beta <= beta_star, n > 8*pi
double phi_remainder_bound(int n); // 128*pi^2 / n^2 >= sup |e^{i t/n} - 1 - i t/n|, |t| < 8*pi
double k_tilde(int n, double beta, double c_d_star);  // (n+2)/2 - 1 - c* n beta
double beta_tilde(int d, double c_d_star);            // min(1/(3 c*), beta_star)

// S(U) = sum_p n beta_p Re Tr(U_p).
double wilson_action(const Lattice& lat, const Couplings& cpl, const GaugeField& u);

// S_U(theta, Q) = sum_p n beta_p Re(e^{i theta_p / n} Tr Q_p); equals
// wilson_action of the embedded field.
double decomposed_action(const Lattice& lat, const Couplings& cpl, const AngleField& theta,
                         const GaugeField& q);

// phi(t, Q_p) = exp(n beta Re((e^{i t / n} - 1 - i t / n) Tr Q_p)) - 1.
double phi_factor(double theta_p, cplx tr_qp, int n, double beta);

// Per-edge tilt rate a_e = -sum_p sgn(e,p) beta_p Im Tr(Q_p); the edge
// density on [0, 2*pi) is e^{a t} / nu_z(a).
double nu_rate(const Lattice& lat, const Couplings& cpl, const GaugeField& q, int e);
double nu_z(double a);                      // (e^{2 pi a} - 1) / a, series for |a| < 1e-6
double nu_logdensity(double a, double t);
double nu_mean(double a);
double nu_sample(double a, RngStream& rng);  // inverse CDF draw

// Pointwise decomposition of the action weight:
//   exp(S_U) = prod_p (1 + phi_p) * prod_e e^{a_e theta_e} * exp(S(Q)).
// Returns the log of each factor group for identity tests.
struct ActionSplit {
    double log_phi_part;   // sum_p log(1 + phi_p)
    double log_tilt_part;  // sum_e a_e theta_e
    double su_action;      // wilson_action on the SU part
};
ActionSplit decomposed_action_split(const Lattice& lat, const Couplings& cpl,
                                    const AngleField& theta, const GaugeField& q);

// Gradient core: with per-plaquette scalars c_p approximating
// E[e^{-i theta_p / n} | Q] (canonical orientation), the marginal-action
// gradient at edge e is n * proj_su(sum_r beta_r c~_r Q_r*) Q_e, summing over
// incident plaquette loops re-oriented to start with +e (c~ conjugated for
// re-oriented ones). c == 1 gives the Wilson action gradient (theta == 0).
CMat grad_su_coeff(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                   const std::vector<cplx>& c, int e);  // element of su(n)
CMat grad_from_phases(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                      const std::vector<cplx>& c, int e);  // tangent at q_e

// Riemannian gradient of wilson_action along su directions; tangent at u_e.
CMat grad_wilson(const Lattice& lat, const Couplings& cpl, const GaugeField& u, int e);

// Second central difference of a scalar function along the geodesic
// t -> {exp(t X_e) Q_e}; used to probe Hessians of action functionals.
struct EdgeTangent {
    int edge;
    CMat x;  // su(n)
};
double tangent_norm2(const std::vector<EdgeTangent>& v);

template <typename F>
double hessian_probe(const GaugeField& q, const std::vector<EdgeTangent>& v, double h, F&& s) {
    GaugeField plus = q, minus = q;
    for (const auto& t : v) {
        CMat step = exp_mat(h * t.x);
        plus.q[t.edge] = step * q.q[t.edge];
        minus.q[t.edge] = step.adjoint() * q.q[t.edge];
    }
    return (s(plus) - 2.0 * s(q) + s(minus)) / (h * h);
}

}  // namespace ym
