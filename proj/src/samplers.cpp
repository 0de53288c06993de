#include "ym/samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace ym {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_angle(double t) {
    t = std::fmod(t, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

// sum over plaquettes containing e of n beta_p Re(e^{i theta_p / n} Tr Q_p),
// with optional overrides for edge e's angle and matrix.
double local_action(const Lattice& lat, const Couplings& cpl, const AngleField* theta,
                    const GaugeField& f, int e, const double* theta_e, const CMat* qe) {
    double s = 0.0;
    const int n = f.n;
    for (const auto& inc : lat.plaquettes_containing(e)) {
        cplx tr = qe ? plaq_trace_override(lat, f, inc.plaq, e, *qe)
                     : plaquette_product(lat, f, inc.plaq).trace();
        double tp = 0.0;
        if (theta) {
            for (const auto& oe : lat.plaquette(inc.plaq).loop) {
                double te = (oe.edge == e && theta_e) ? *theta_e : (*theta)[oe.edge];
                tp += oe.sign * te;
            }
        }
        s += n * cpl.beta[inc.plaq] * (std::cos(tp / n) * tr.real() - std::sin(tp / n) * tr.imag());
    }
    return s;
}

}  // namespace

cplx plaq_trace_override(const Lattice& lat, const GaugeField& f, int p, int e, const CMat& qe) {
    const auto& loop = lat.plaquette(p).loop;
    CMat m = CMat::Identity(f.n, f.n);
    for (const auto& oe : loop) {
        const CMat& q = (oe.edge == e) ? qe : f.q[oe.edge];
        if (oe.sign > 0) m = m * q;
        else m = m * q.adjoint();
    }
    return m.trace();
}

SweepStats metropolis_sweep_un(const Lattice& lat, const Couplings& cpl, GaugeField& u,
                               double eps, RngStream& rng) {
    SweepStats st;
    for (int e = 0; e < lat.n_edges(); ++e) {
        CMat prop = exp_mat(eps * gaussian_un(u.n, rng)) * u.q[e];
        double ds = local_action(lat, cpl, nullptr, u, e, nullptr, &prop) -
                    local_action(lat, cpl, nullptr, u, e, nullptr, nullptr);
        ++st.proposed;
        if (ds >= 0.0 || rng.u01() < std::exp(ds)) {
            u.q[e] = prop;
            ++st.accepted;
        }
    }
    return st;
}

SweepStats metropolis_sweep_sun(const Lattice& lat, const Couplings& cpl, GaugeField& q,
                                double eps, RngStream& rng) {
    SweepStats st;
    for (int e = 0; e < lat.n_edges(); ++e) {
        CMat prop = exp_mat(eps * gaussian_su(q.n, rng)) * q.q[e];
        double ds = local_action(lat, cpl, nullptr, q, e, nullptr, &prop) -
                    local_action(lat, cpl, nullptr, q, e, nullptr, nullptr);
        ++st.proposed;
        if (ds >= 0.0 || rng.u01() < std::exp(ds)) {
            q.q[e] = prop;
            ++st.accepted;
        }
    }
    return st;
}

SweepStats metropolis_sweep_joint(const Lattice& lat, const Couplings& cpl, DecomposedField& f,
                                  double eps_theta, double eps_q, RngStream& rng) {
    SweepStats st;
    for (int e = 0; e < lat.n_edges(); ++e) {
        double tprop = wrap_angle(f.theta[e] + eps_theta * rng.normal());
        CMat qprop = exp_mat(eps_q * gaussian_su(f.q.n, rng)) * f.q.q[e];
        double ds = local_action(lat, cpl, &f.theta, f.q, e, &tprop, &qprop) -
                    local_action(lat, cpl, &f.theta, f.q, e, nullptr, nullptr);
        ++st.proposed;
        if (ds >= 0.0 || rng.u01() < std::exp(ds)) {
            f.theta[e] = tprop;
            f.q.q[e] = qprop;
            ++st.accepted;
        }
    }
    return st;
}

SweepStats conditional_theta_sweep(const Lattice& lat, const Couplings& cpl, AngleField& theta,
                                   const GaugeField& q, double eps, RngStream& rng,
                                   const std::vector<char>& frozen_mask) {
    SweepStats st;
    for (int e = 0; e < lat.n_edges(); ++e) {
        if (!frozen_mask.empty() && frozen_mask[e]) continue;
        double tprop = wrap_angle(theta[e] + eps * rng.normal());
        double ds = local_action(lat, cpl, &theta, q, e, &tprop, nullptr) -
                    local_action(lat, cpl, &theta, q, e, nullptr, nullptr);
        ++st.proposed;
        if (ds >= 0.0 || rng.u01() < std::exp(ds)) {
            theta[e] = tprop;
            ++st.accepted;
        }
    }
    return st;
}

AngleField nu_product_sample(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                             RngStream& rng) {
    AngleField theta(lat.n_edges(), 0.0);
    for (int e = 0; e < lat.n_edges(); ++e) theta[e] = nu_sample(nu_rate(lat, cpl, q, e), rng);
    return theta;
}

void langevin_step(const Lattice& lat, const Couplings& cpl, GaugeField& q,
                   PhaseEstimator& phases, double h, RngStream& rng) {
    std::vector<cplx> c = phases.phases(q);
    std::vector<CMat> drift(lat.n_edges());
    for (int e = 0; e < lat.n_edges(); ++e) drift[e] = grad_su_coeff(lat, cpl, q, c, e);
    double sq = std::sqrt(2.0 * h);
    for (int e = 0; e < lat.n_edges(); ++e) {
        CMat step = h * drift[e] + sq * gaussian_su(q.n, rng);
        q.q[e] = exp_mat(step) * q.q[e];
    }
}

void langevin_step_wilson(const Lattice& lat, const Couplings& cpl, GaugeField& q, double h,
                          RngStream& rng) {
    UnitPhaseEstimator unit(lat);
    langevin_step(lat, cpl, q, unit, h, rng);
}

NestedMcPhaseEstimator::NestedMcPhaseEstimator(const Lattice& lat, Couplings cpl, int n_inner,
                                               double eps, unsigned long long seed,
                                               unsigned long long stream)
    : lat_(lat), cpl_(std::move(cpl)), n_inner_(n_inner), eps_(eps), rng_(seed, stream) {
    if (n_inner_ < 1) throw std::invalid_argument("NestedMcPhaseEstimator: n_inner < 1");
    theta_.assign(lat.n_edges(), 0.0);
}

std::vector<cplx> NestedMcPhaseEstimator::phases(const GaugeField& q) {
    const int P = lat_.n_plaquettes();
    if (!started_) {
        // cold start: equilibrate the angle sector before averaging
        for (int s = 0; s < 4 * n_inner_; ++s)
            conditional_theta_sweep(lat_, cpl_, theta_, q, eps_, rng_);
        started_ = true;
    }
    std::vector<cplx> acc(P, cplx(0.0, 0.0));
    for (int s = 0; s < n_inner_; ++s) {
        conditional_theta_sweep(lat_, cpl_, theta_, q, eps_, rng_);
        for (int p = 0; p < P; ++p) {
            double tp = theta_p(lat_, theta_, p);
            acc[p] += std::polar(1.0, -tp / q.n);
        }
    }
    for (auto& v : acc) v /= double(n_inner_);
    return acc;
}

}  // namespace ym
