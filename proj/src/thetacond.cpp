#include "ym/thetacond.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace ym {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_angle(double t) {
    t = std::fmod(t, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

}  // namespace

void gauss_legendre(int n, double lo, double hi, std::vector<double>& nodes,
                    std::vector<double>& weights) {
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: order out of range");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    // Roots of P_n on [-1, 1] by Newton iteration, symmetric pairs.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < n; ++i) {
        nodes[i] = mid - half * nodes[i];  // ascending in [lo, hi]
        weights[i] *= half;
    }
}

ThetaQuadrature::ThetaQuadrature(const Lattice& lat, const Couplings& cpl,
                                 const GaugeField& q, int nodes)
    : lat_(lat), cpl_(cpl), n_(q.n) {
    if (static_cast<int>(cpl.beta.size()) != lat.n_plaquettes())
        throw std::invalid_argument("ThetaQuadrature: coupling size mismatch");
    tr_p_.resize(lat.n_plaquettes());
    for (int p = 0; p < lat.n_plaquettes(); ++p) tr_p_[p] = plaquette_product(lat, q, p).trace();
    fixed_.assign(lat.n_edges(), 0);
    base_.assign(lat.n_edges(), 0.0);
    free_.resize(lat.n_edges());
    std::iota(free_.begin(), free_.end(), 0);
    gauss_legendre(nodes, 0.0, kTwoPi, nodes_, weights_);
    s_ref_ = 0.0;
    for (int p = 0; p < lat.n_plaquettes(); ++p)
        s_ref_ += n_ * cpl_.beta[p] * std::abs(tr_p_[p]);
}

void ThetaQuadrature::fix_edge(int edge, double value) {
    fixed_[edge] = 1;
    base_[edge] = wrap_angle(value);
    free_.clear();
    for (int e = 0; e < lat_.n_edges(); ++e)
        if (!fixed_[e]) free_.push_back(e);
}

void ThetaQuadrature::tensor_sum(
    const std::function<void(const AngleField&, double)>& sink) const {
    const int F = free_dims();
    if (F > 6) throw std::runtime_error("ThetaQuadrature: more than 6 free edges");
    const int P = lat_.n_plaquettes();
    AngleField theta = base_;
    std::vector<int> idx(F, 0);
    const int nn = static_cast<int>(nodes_.size());
    while (true) {
        double w = 1.0;
        for (int i = 0; i < F; ++i) {
            theta[free_[i]] = nodes_[idx[i]];
            w *= weights_[idx[i]];
        }
        double s = 0.0;
        for (int p = 0; p < P; ++p) {
            double tp = theta_loop(theta, lat_.plaquette(p).loop);
            s += n_ * cpl_.beta[p] *
                 (std::cos(tp / n_) * tr_p_[p].real() - std::sin(tp / n_) * tr_p_[p].imag());
        }
        sink(theta, w * std::exp(s - s_ref_));
        int i = 0;
        while (i < F && ++idx[i] == nn) idx[i++] = 0;
        if (i == F) break;
    }
}

double ThetaQuadrature::expect(const std::function<double(const AngleField&)>& f) const {
    double num = 0.0, den = 0.0;
    tensor_sum([&](const AngleField& th, double w) {
        num += w * f(th);
        den += w;
    });
    return num / den;
}

cplx ThetaQuadrature::expect_c(const std::function<cplx(const AngleField&)>& f) const {
    cplx num(0.0, 0.0);
    double den = 0.0;
    tensor_sum([&](const AngleField& th, double w) {
        num += w * f(th);
        den += w;
    });
    return num / den;
}

double ThetaQuadrature::log_z() const {
    double den = 0.0;
    tensor_sum([&](const AngleField&, double w) { den += w; });
    if (!(den > 0.0)) throw std::runtime_error("ThetaQuadrature: nonpositive normalizer");
    return std::log(den) + s_ref_;
}

std::vector<cplx> ThetaQuadrature::plaquette_phases() const {
    const int P = lat_.n_plaquettes();
    std::vector<cplx> num(P, cplx(0.0, 0.0));
    double den = 0.0;
    tensor_sum([&](const AngleField& th, double w) {
        den += w;
        for (int p = 0; p < P; ++p) {
            double tp = theta_loop(th, lat_.plaquette(p).loop);
            num[p] += w * std::polar(1.0, -tp / n_);
        }
    });
    for (auto& c : num) c /= den;
    return num;
}

ThetaFourier::ThetaFourier(const Lattice& lat, const Couplings& cpl, const GaugeField& q)
    : ThetaFourier(lat, cpl, q, Options()) {}

ThetaFourier::ThetaFourier(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                           Options opt)
    : lat_(lat), cpl_(cpl), n_(q.n), opt_(opt) {
    if (static_cast<int>(cpl.beta.size()) != lat.n_plaquettes())
        throw std::invalid_argument("ThetaFourier: coupling size mismatch");
    const int P = lat.n_plaquettes();
    rho_.resize(P);
    phi_.resize(P);
    kmax_.assign(P, 0);
    coef_.resize(P);
    fixed_.assign(lat.n_edges(), 0);
    fixed_val_.assign(lat.n_edges(), 0.0);
    tilt_.assign(lat.n_edges(), 0.0);
    for (int p = 0; p < P; ++p) {
        cplx tr = plaquette_product(lat, q, p).trace();
        rho_[p] = std::abs(tr);
        phi_[p] = (rho_[p] > 0.0) ? std::arg(tr) : 0.0;
    }
    const_log_ = 0.0;
}

void ThetaFourier::fix_edge(int edge, double value) {
    fixed_[edge] = 1;
    fixed_val_[edge] = wrap_angle(value);
}

void ThetaFourier::set_edge_tilts(const std::vector<double>& b) {
    if (static_cast<int>(b.size()) != lat_.n_edges())
        throw std::invalid_argument("ThetaFourier: tilt size mismatch");
    tilt_ = b;
}

cplx ThetaFourier::edge_factor(int edge, long long m) const {
    double b = tilt_[edge];
    if (fixed_[edge])
        return std::exp(b * fixed_val_[edge]) *
               std::polar(1.0, static_cast<double>(m) * fixed_val_[edge] / n_);
    // integral of e^{(b + i m / n) t} over [0, 2 pi)
    cplx c(b, static_cast<double>(m) / n_);
    double ac = std::abs(c);
    if (ac < 1e-9) {
        // (e^{2 pi c} - 1) / c, short series
        cplx x = kTwoPi * c;
        return kTwoPi * (1.0 + x * (0.5 + x * (1.0 / 6.0 + x / 24.0)));
    }
    cplx num = std::exp(kTwoPi * b) * std::polar(1.0, kTwoPi * static_cast<double>(m) / n_) -
               1.0;
    return num / c;
}

void ThetaFourier::run(std::vector<Target>& targets) const {
    const int P = lat_.n_plaquettes();
    const int E = lat_.n_edges();

    // Plaquettes with every edge pinned contribute a constant weight; the
    // rest need their Fourier series.
    std::vector<int> series;
    double folded_log = 0.0;
    for (int p = 0; p < P; ++p) {
        const auto& loop = lat_.plaquette(p).loop;
        bool all_pinned = true;
        for (const auto& oe : loop)
            if (!fixed_[oe.edge]) all_pinned = false;
        if (all_pinned) {
            double tp = 0.0;
            for (const auto& oe : loop) tp += oe.sign * fixed_val_[oe.edge];
            folded_log += n_ * cpl_.beta[p] * rho_[p] * std::cos(tp / n_ + phi_[p]);
        } else {
            series.push_back(p);
        }
    }

    // Truncation per series plaquette from Bessel decay.
    std::vector<std::vector<cplx>> coef(series.size());
    std::vector<int> kmax(series.size(), 0);
    double terms = 1.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        int p = series[i];
        double z = n_ * cpl_.beta[p] * rho_[p];
        int K = 0;
        if (z > 0.0) {
            double i0 = std::cyl_bessel_i(0, z);
            while (K < opt_.max_k && std::cyl_bessel_i(K + 1, z) > opt_.tol * i0) ++K;
        }
        kmax[i] = K;
        coef[i].resize(2 * K + 1);
        for (int k = -K; k <= K; ++k)
            coef[i][k + K] = std::cyl_bessel_i(std::abs(k), z > 0.0 ? z : 0.0) *
                             std::polar(1.0, k * phi_[p]);
        terms *= 2.0 * K + 1.0;
        if (terms > opt_.max_terms)
            throw std::runtime_error("ThetaFourier: frequency box too large");
    }

    // Edges on any plaquette get explicit factors; remaining free edges give
    // a 2 pi constant and remaining pinned edges give 1.
    std::vector<char> on_plaq(E, 0);
    for (int p = 0; p < P; ++p)
        for (const auto& oe : lat_.plaquette(p).loop) on_plaq[oe.edge] = 1;
    std::vector<int> active;
    int off_free = 0;
    for (int e = 0; e < E; ++e) {
        if (on_plaq[e]) active.push_back(e);
        else if (!fixed_[e]) ++off_free;
    }
    const_log_ = folded_log + off_free * std::log(kTwoPi);

    std::vector<long long> m(E, 0);
    std::function<void(std::size_t, cplx)> rec = [&](std::size_t lvl, cplx w) {
        if (lvl == series.size()) {
            for (auto& t : targets) {
                cplx prod = w;
                for (int e : active) {
                    prod *= edge_factor(e, m[e] + t.shift[e]);
                    if (prod == cplx(0.0, 0.0)) break;
                }
                t.acc += prod;
            }
            return;
        }
        const auto& loop = lat_.plaquette(series[lvl]).loop;
        int K = kmax[lvl];
        for (int k = -K; k <= K; ++k) {
            for (const auto& oe : loop) m[oe.edge] += static_cast<long long>(k) * oe.sign;
            rec(lvl + 1, w * coef[lvl][k + K]);
            for (const auto& oe : loop) m[oe.edge] -= static_cast<long long>(k) * oe.sign;
        }
    };
    for (auto& t : targets) t.acc = cplx(0.0, 0.0);
    rec(0, cplx(1.0, 0.0));
}

double ThetaFourier::log_z() const {
    std::vector<Target> ts(1);
    ts[0].shift.assign(lat_.n_edges(), 0);
    run(ts);
    double z = ts[0].acc.real();
    if (!(z > 0.0)) throw std::runtime_error("ThetaFourier: nonpositive normalizer");
    return std::log(z) + const_log_;
}

cplx ThetaFourier::phase_moment(const std::vector<int>& s) const {
    if (static_cast<int>(s.size()) != lat_.n_plaquettes())
        throw std::invalid_argument("ThetaFourier: moment index size mismatch");
    std::vector<Target> ts(2);
    ts[0].shift.assign(lat_.n_edges(), 0);
    ts[1].shift.assign(lat_.n_edges(), 0);
    for (int p = 0; p < lat_.n_plaquettes(); ++p) {
        if (s[p] == 0) continue;
        for (const auto& oe : lat_.plaquette(p).loop)
            ts[1].shift[oe.edge] += s[p] * oe.sign;
    }
    run(ts);
    return ts[1].acc / ts[0].acc.real();
}

cplx ThetaFourier::raw_moment(const std::vector<int>& s) const {
    if (static_cast<int>(s.size()) != lat_.n_plaquettes())
        throw std::invalid_argument("ThetaFourier: moment index size mismatch");
    std::vector<Target> ts(1);
    ts[0].shift.assign(lat_.n_edges(), 0);
    for (int p = 0; p < lat_.n_plaquettes(); ++p) {
        if (s[p] == 0) continue;
        for (const auto& oe : lat_.plaquette(p).loop) ts[0].shift[oe.edge] += s[p] * oe.sign;
    }
    run(ts);
    return ts[0].acc * std::exp(const_log_);
}

std::vector<cplx> ThetaFourier::plaquette_phases() const {
    const int P = lat_.n_plaquettes();
    std::vector<Target> ts(P + 1);
    ts[0].shift.assign(lat_.n_edges(), 0);
    for (int p = 0; p < P; ++p) {
        ts[p + 1].shift.assign(lat_.n_edges(), 0);
        for (const auto& oe : lat_.plaquette(p).loop) ts[p + 1].shift[oe.edge] -= oe.sign;
    }
    run(ts);
    std::vector<cplx> out(P);
    for (int p = 0; p < P; ++p) out[p] = ts[p + 1].acc / ts[0].acc.real();
    return out;
}

}  // namespace ym
