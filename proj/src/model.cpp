#include "ym/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ym {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;
}  // namespace

Couplings Couplings::uniform(const Lattice& lat, int n, double beta, double c_d_star) {
    if (n < 2) throw std::invalid_argument("Couplings: n >= 2 required");
    if (beta < 0.0) throw std::invalid_argument("Couplings: beta >= 0 required");
    if (c_d_star <= 0.0) throw std::invalid_argument("Couplings: c_d_star > 0 required");
    Couplings c;
    c.n = n;
    c.c_d_star = c_d_star;
    c.beta.assign(lat.n_plaquettes(), beta);
    return c;
}

double Couplings::beta_max() const {
    double m = 0.0;
    for (double b : beta) m = std::max(m, b);
    return m;
}

double beta_star(int d) { return std::pow(10.0, -6.0 * d); }

double phi_regime_bound(int d) { return std::pow(10.0, 4.0 - 6.0 * d); }

double phi_remainder_bound(int n) { return 128.0 * kPi * kPi / (static_cast<double>(n) * n); }

double k_tilde(int n, double beta, double c_d_star) {
    return 0.5 * (n + 2.0) - 1.0 - c_d_star * n * beta;
}

double beta_tilde(int d, double c_d_star) {
    return std::min(1.0 / (3.0 * c_d_star), beta_star(d));
}

double wilson_action(const Lattice& lat, const Couplings& cpl, const GaugeField& u) {
    double s = 0.0;
    for (int p = 0; p < lat.n_plaquettes(); ++p)
        s += cpl.n * cpl.beta[p] * plaquette_product(lat, u, p).trace().real();
    return s;
}

double decomposed_action(const Lattice& lat, const Couplings& cpl, const AngleField& theta,
                         const GaugeField& q) {
    double s = 0.0;
    for (int p = 0; p < lat.n_plaquettes(); ++p) {
        cplx tr = plaquette_product(lat, q, p).trace();
        double tp = theta_p(lat, theta, p);
        s += cpl.n * cpl.beta[p] * (std::polar(1.0, tp / cpl.n) * tr).real();
    }
    return s;
}

double phi_factor(double theta_p, cplx tr_qp, int n, double beta) {
    cplx rem = std::polar(1.0, theta_p / n) - 1.0 - cplx(0.0, theta_p / n);
    return std::expm1(n * beta * (rem * tr_qp).real());
}

double nu_rate(const Lattice& lat, const Couplings& cpl, const GaugeField& q, int e) {
    double a = 0.0;
    for (const auto& inc : lat.plaquettes_containing(e))
        a -= inc.sign * cpl.beta[inc.plaq] *
             plaquette_product(lat, q, inc.plaq).trace().imag();
    return a;
}

double nu_z(double a) {
    if (std::abs(a) < 1e-6) {
        // 4-term series of (e^{2 pi a} - 1)/a, relative error < 1e-26 here
        double x = kTwoPi;
        return x * (1.0 + a * x / 2.0 * (1.0 + a * x / 3.0 * (1.0 + a * x / 4.0)));
    }
    return std::expm1(kTwoPi * a) / a;
}

double nu_logdensity(double a, double t) {
    if (t < 0.0 || t >= kTwoPi) return -std::numeric_limits<double>::infinity();
    return a * t - std::log(nu_z(a));
}

double nu_mean(double a) {
    if (std::abs(a) < 1e-4) {
        // mean - pi is odd in a; series error ~ a^5 here
        double x = kTwoPi;
        return x / 2.0 + a * x * x / 12.0 - a * a * a * x * x * x * x / 720.0;
    }
    return kTwoPi / -std::expm1(-kTwoPi * a) - 1.0 / a;
}

double nu_sample(double a, RngStream& rng) {
    double u = rng.u01();
    if (std::abs(a) < 1e-6) {
        // inverse CDF expanded to O(a^2): t = 2 pi u + a/2 t (2 pi - t) ...
        double t0 = kTwoPi * u;
        double t1 = t0 + 0.5 * a * t0 * (kTwoPi - t0);
        return std::min(std::max(t1, 0.0), std::nextafter(kTwoPi, 0.0));
    }
    // F(t) = (e^{a t} - 1)/(e^{2 pi a} - 1)
    double t = std::log1p(u * std::expm1(kTwoPi * a)) / a;
    return std::min(std::max(t, 0.0), std::nextafter(kTwoPi, 0.0));
}

ActionSplit decomposed_action_split(const Lattice& lat, const Couplings& cpl,
                                    const AngleField& theta, const GaugeField& q) {
    ActionSplit out{0.0, 0.0, 0.0};
    for (int p = 0; p < lat.n_plaquettes(); ++p) {
        cplx tr = plaquette_product(lat, q, p).trace();
        double tp = theta_p(lat, theta, p);
        out.log_phi_part += std::log1p(phi_factor(tp, tr, cpl.n, cpl.beta[p]));
        out.su_action += cpl.n * cpl.beta[p] * tr.real();
    }
    for (int e = 0; e < lat.n_edges(); ++e)
        out.log_tilt_part += nu_rate(lat, cpl, q, e) * theta[e];
    return out;
}

CMat grad_su_coeff(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                   const std::vector<cplx>& c, int e) {
    CMat m = CMat::Zero(q.n, q.n);
    for (const auto& s : lat.staple_loops(e)) {
        cplx ph = (s.sign > 0) ? c[s.plaq] : std::conj(c[s.plaq]);
        m += (cpl.beta[s.plaq] * ph) * loop_product(q, s.loop).adjoint();
    }
    return static_cast<double>(cpl.n) * project_su(m);
}

CMat grad_from_phases(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                      const std::vector<cplx>& c, int e) {
    return grad_su_coeff(lat, cpl, q, c, e) * q.q[e];
}

CMat grad_wilson(const Lattice& lat, const Couplings& cpl, const GaugeField& u, int e) {
    std::vector<cplx> ones(lat.n_plaquettes(), cplx(1.0, 0.0));
    return grad_from_phases(lat, cpl, u, ones, e);
}

double tangent_norm2(const std::vector<EdgeTangent>& v) {
    double s = 0.0;
    for (const auto& t : v) s += t.x.squaredNorm();
    return s;
}

}  // namespace ym
