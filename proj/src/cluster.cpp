#include "ym/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "ym/samplers.hpp"
#include "ym/thetacond.hpp"

namespace ym {

namespace {

std::vector<int> cluster_edges(const Lattice& lat, const std::vector<int>& cluster) {
    std::set<int> es;
    for (int p : cluster)
        for (const auto& oe : lat.plaquette(p).loop) es.insert(oe.edge);
    return std::vector<int>(es.begin(), es.end());
}

Couplings zero_off_region(const Lattice& lat, const Couplings& cpl,
                          const std::vector<int>& region) {
    Couplings out = cpl;
    std::vector<char> keep(lat.n_plaquettes(), 0);
    for (int p : region) keep[p] = 1;
    for (int p = 0; p < lat.n_plaquettes(); ++p)
        if (!keep[p]) out.beta[p] = 0.0;
    return out;
}

// Tilt left over when the action is restricted to a region: full edge rates
// minus the rates the restricted couplings produce.
std::vector<double> residual_tilts(const Lattice& lat, const Couplings& full,
                                   const Couplings& restricted, const GaugeField& q) {
    std::vector<double> b(lat.n_edges(), 0.0);
    for (int e = 0; e < lat.n_edges(); ++e)
        b[e] = nu_rate(lat, full, q, e) - nu_rate(lat, restricted, q, e);
    return b;
}

double nu_log_norm(const Lattice& lat, const Couplings& cpl, const GaugeField& q) {
    double s = 0.0;
    for (int e = 0; e < lat.n_edges(); ++e) s += std::log(nu_z(nu_rate(lat, cpl, q, e)));
    return s;
}

}  // namespace

AngleObservable AngleObservable::constant_one(const Lattice& lat) {
    AngleObservable f;
    f.eval = [](const AngleField&) { return 1.0; };
    f.is_phase = true;
    f.w = cplx(1.0, 0.0);
    f.s.assign(lat.n_plaquettes(), 0);
    return f;
}

AngleObservable AngleObservable::plaquette_phase(const Lattice& lat, int n, int p, cplx w) {
    AngleObservable f;
    for (const auto& oe : lat.plaquette(p).loop) f.support.push_back(oe.edge);
    std::sort(f.support.begin(), f.support.end());
    const PlaqLoop loop = lat.plaquette(p).loop;
    f.eval = [loop, n, w](const AngleField& th) {
        double tp = theta_loop(th, loop);
        return (w * std::polar(1.0, tp / n)).real();
    };
    f.is_phase = true;
    f.w = w;
    f.s.assign(lat.n_plaquettes(), 0);
    f.s[p] = 1;
    return f;
}

double region_log_weight(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                         const std::vector<int>& region) {
    Couplings cr = zero_off_region(lat, cpl, region);
    ThetaFourier tf(lat, cr, q);
    tf.set_edge_tilts(residual_tilts(lat, cpl, cr, q));
    return tf.log_z() - wilson_action(lat, cr, q) - nu_log_norm(lat, cpl, q);
}

EstimateWithError region_ratio_mc(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                                  const std::vector<int>& numer, const std::vector<int>& denom,
                                  long long n_samples, int n_batches, RngStream& rng) {
    std::vector<cplx> tr(lat.n_plaquettes());
    for (int p = 0; p < lat.n_plaquettes(); ++p) tr[p] = plaquette_product(lat, q, p).trace();
    std::vector<double> xs, ys;
    xs.reserve(n_samples);
    ys.reserve(n_samples);
    for (long long i = 0; i < n_samples; ++i) {
        AngleField th = nu_product_sample(lat, cpl, q, rng);
        double x = 1.0, y = 1.0;
        for (int p : numer) x *= 1.0 + phi_factor(theta_p(lat, th, p), tr[p], q.n, cpl.beta[p]);
        for (int p : denom) y *= 1.0 + phi_factor(theta_p(lat, th, p), tr[p], q.n, cpl.beta[p]);
        xs.push_back(x);
        ys.push_back(y);
    }
    // ratio of means with batch-wise spread
    int nb = std::max(2, static_cast<int>(std::min<long long>(n_batches, n_samples / 2)));
    long long len = n_samples / nb;
    long long start = n_samples - nb * len;
    std::vector<double> br(nb);
    double sx = 0.0, sy = 0.0;
    for (int b = 0; b < nb; ++b) {
        double bx = 0.0, by = 0.0;
        for (long long i = 0; i < len; ++i) {
            bx += xs[start + b * len + i];
            by += ys[start + b * len + i];
        }
        br[b] = bx / by;
        sx += bx;
        sy += by;
    }
    EstimateWithError out;
    out.value = sx / sy;
    out.sigma = std::sqrt(variance(br) / nb);
    out.n = n_samples;
    return out;
}

cplx nu_phase_integral(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                       const std::vector<int>& cluster, const std::vector<int>& s) {
    const std::size_t k = cluster.size();
    if (k > 20) throw std::invalid_argument("nu_phase_integral: cluster too large");
    double log_nu = nu_log_norm(lat, cpl, q);
    cplx acc(0.0, 0.0);
    for (std::size_t mask = 0; mask < (std::size_t(1) << k); ++mask) {
        std::vector<int> sub;
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (std::size_t(1) << i)) sub.push_back(cluster[i]);
        Couplings ct = zero_off_region(lat, cpl, sub);
        ThetaFourier tf(lat, ct, q);
        tf.set_edge_tilts(residual_tilts(lat, cpl, ct, q));
        cplx raw = tf.raw_moment(s);
        double lg = -wilson_action(lat, ct, q) - log_nu;
        double sign = ((k - sub.size()) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * raw * std::exp(lg);
    }
    return acc;
}

double nu_cluster_integral_quad(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                                const std::vector<int>& cluster, const AngleObservable& f,
                                int nodes) {
    std::set<int> ds;
    for (int e : cluster_edges(lat, cluster)) ds.insert(e);
    for (int e : f.support) ds.insert(e);
    std::vector<int> dims(ds.begin(), ds.end());
    if (dims.size() > 6) throw std::runtime_error("nu_cluster_integral_quad: more than 6 dims");

    std::vector<cplx> tr(lat.n_plaquettes());
    for (int p : cluster) tr[p] = plaquette_product(lat, q, p).trace();
    std::vector<double> rate(dims.size()), lognorm(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
        rate[i] = nu_rate(lat, cpl, q, dims[i]);
        lognorm[i] = std::log(nu_z(rate[i]));
    }

    std::vector<double> xs, ws;
    gauss_legendre(nodes, 0.0, 2.0 * M_PI, xs, ws);
    AngleField th(lat.n_edges(), 0.0);
    std::vector<int> idx(dims.size(), 0);
    double acc = 0.0;
    while (true) {
        double logw = 0.0;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            th[dims[i]] = xs[idx[i]];
            logw += std::log(ws[idx[i]]) + rate[i] * xs[idx[i]] - lognorm[i];
        }
        double val = f.eval ? f.eval(th) : 1.0;
        for (int p : cluster) val *= phi_factor(theta_p(lat, th, p), tr[p], q.n, cpl.beta[p]);
        acc += val * std::exp(logw);
        std::size_t i = 0;
        while (i < dims.size() && ++idx[i] == static_cast<int>(xs.size())) idx[i++] = 0;
        if (i == dims.size()) break;
    }
    return acc;
}

EstimateWithError nu_cluster_integral_mc(const Lattice& lat, const Couplings& cpl,
                                         const GaugeField& q, const std::vector<int>& cluster,
                                         const AngleObservable& f, long long n_samples,
                                         int n_batches, RngStream& rng) {
    std::vector<cplx> tr(lat.n_plaquettes());
    for (int p : cluster) tr[p] = plaquette_product(lat, q, p).trace();
    std::vector<double> vals;
    vals.reserve(n_samples);
    for (long long i = 0; i < n_samples; ++i) {
        AngleField th = nu_product_sample(lat, cpl, q, rng);
        double v = f.eval ? f.eval(th) : 1.0;
        for (int p : cluster) v *= phi_factor(theta_p(lat, th, p), tr[p], q.n, cpl.beta[p]);
        vals.push_back(v);
    }
    return batch_mean(vals, n_batches);
}

ClusterExpansionResult expand_conditional(const Lattice& lat, const Couplings& cpl,
                                          const GaugeField& q, const AngleObservable& f,
                                          const std::vector<int>& lambda_f,
                                          const ClusterOptions& opt) {
    ClusterExpansionResult res;
    {
        std::set<int> lf(lambda_f.begin(), lambda_f.end());
        std::set<int> need(f.support.begin(), f.support.end());
        for (std::size_t p = 0; p < f.s.size(); ++p)
            if (f.s[p] != 0)
                for (const auto& oe : lat.plaquette(static_cast<int>(p)).loop)
                    need.insert(oe.edge);
        for (int e : need)
            if (!lf.count(e))
                throw std::invalid_argument("expand_conditional: lambda_f must cover f's edges");
    }
    auto clusters = lat.enumerate_clusters(lambda_f, opt.m_max);
    std::vector<int> all_p(lat.n_plaquettes());
    for (int p = 0; p < lat.n_plaquettes(); ++p) all_p[p] = p;

    RngStream rng(opt.seed, opt.stream);
    double log_zp = 0.0;
    if (opt.exact_ratios) log_zp = region_log_weight(lat, cpl, q, all_p);

    int max_order = 0;
    for (const auto& k : clusters) max_order = std::max<int>(max_order, k.size());
    res.partial_by_order.assign(max_order + 1, 0.0);

    for (const auto& k : clusters) {
        ClusterTerm t;
        t.cluster = k;

        if (opt.exact_phase_ik && f.is_phase) {
            t.i_k = (f.w * nu_phase_integral(lat, cpl, q, k, f.s)).real();
            t.i_k_sigma = 0.0;
        } else {
            std::set<int> ds;
            for (int e : cluster_edges(lat, k)) ds.insert(e);
            for (int e : f.support) ds.insert(e);
            if (ds.size() <= 6) {
                t.i_k = nu_cluster_integral_quad(lat, cpl, q, k, f, opt.quad_nodes);
                t.i_k_sigma = 0.0;
            } else {
                auto est =
                    nu_cluster_integral_mc(lat, cpl, q, k, f, opt.mc_samples, opt.n_batches, rng);
                t.i_k = est.value;
                t.i_k_sigma = est.sigma;
            }
        }

        auto a_k = lat.exterior_plaquettes(k, lambda_f);
        if (opt.exact_ratios) {
            t.ratio = std::exp(region_log_weight(lat, cpl, q, a_k) - log_zp);
            t.ratio_sigma = 0.0;
        } else {
            auto est =
                region_ratio_mc(lat, cpl, q, a_k, all_p, opt.mc_samples, opt.n_batches, rng);
            t.ratio = est.value;
            t.ratio_sigma = est.sigma;
        }

        t.term = t.i_k * t.ratio;
        t.term_sigma = std::sqrt(t.i_k_sigma * t.i_k_sigma * t.ratio * t.ratio +
                                 t.i_k * t.i_k * t.ratio_sigma * t.ratio_sigma);
        res.value += t.term;
        res.sigma += t.term_sigma * t.term_sigma;
        for (int m = static_cast<int>(k.size()); m <= max_order; ++m)
            res.partial_by_order[m] += t.term;
        res.terms.push_back(std::move(t));
    }
    res.sigma = std::sqrt(res.sigma);
    return res;
}

double brute_force_conditional(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                               const AngleObservable& f, int nodes_per_dim) {
    return ThetaQuadrature(lat, cpl, q, nodes_per_dim).expect(f.eval);
}

double partition_ratio(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                       const std::vector<int>& region, int removed_p) {
    std::vector<int> rest;
    bool found = false;
    for (int p : region) {
        if (p == removed_p) {
            found = true;
            continue;
        }
        rest.push_back(p);
    }
    if (!found) throw std::invalid_argument("partition_ratio: plaquette not in region");
    return std::exp(region_log_weight(lat, cpl, q, rest) - region_log_weight(lat, cpl, q, region));
}

double boundary_sensitivity(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                            const AngleObservable& f, const std::vector<int>& boundary_edges,
                            const std::vector<double>& theta_a, const std::vector<double>& theta_b,
                            int nodes_per_dim) {
    if (boundary_edges.size() != theta_a.size() || boundary_edges.size() != theta_b.size())
        throw std::invalid_argument("boundary_sensitivity: edge/value size mismatch");
    auto expect_at = [&](const std::vector<double>& vals) {
        ThetaQuadrature quad(lat, cpl, q, nodes_per_dim);
        for (std::size_t i = 0; i < boundary_edges.size(); ++i)
            quad.fix_edge(boundary_edges[i], vals[i]);
        return quad.expect(f.eval);
    };
    return expect_at(theta_a) - expect_at(theta_b);
}

double conditional_covariance(const Lattice& lat, const Couplings& cpl, const GaugeField& q,
                              const AngleObservable& f, const AngleObservable& g,
                              int nodes_per_dim) {
    const std::size_t np = static_cast<std::size_t>(lat.n_plaquettes());
    if (f.is_phase && g.is_phase && f.s.size() == np && g.s.size() == np) {
        ThetaFourier tf(lat, cpl, q);
        std::vector<int> sum(np), dif(np);
        for (std::size_t p = 0; p < np; ++p) {
            sum[p] = f.s[p] + g.s[p];
            dif[p] = f.s[p] - g.s[p];
        }
        // f g = Re(w_f P_s) Re(w_g P_t) with P_s = prod_p e^{i s_p theta_p/n};
        // E[f g] = Re(w_f w_g E[P_{s+t}] + w_f conj(w_g) E[P_{s-t}]) / 2.
        double efg = 0.5 * (f.w * g.w * tf.phase_moment(sum) +
                            f.w * std::conj(g.w) * tf.phase_moment(dif))
                               .real();
        double ef = (f.w * tf.phase_moment(f.s)).real();
        double eg = (g.w * tf.phase_moment(g.s)).real();
        return efg - ef * eg;
    }
    ThetaQuadrature quad(lat, cpl, q, nodes_per_dim);
    double efg = quad.expect([&](const AngleField& th) { return f.eval(th) * g.eval(th); });
    return efg - quad.expect(f.eval) * quad.expect(g.eval);
}

EstimateWithError conditional_expectation_mc(const Lattice& lat, const Couplings& cpl,
                                             const GaugeField& q, const AngleObservable& f,
                                             long long burn_sweeps, long long sweeps,
                                             int n_batches, RngStream& rng) {
    AngleField th(lat.n_edges(), 0.0);
    StepTuner tuner(0.8);
    for (long long i = 0; i < burn_sweeps; ++i)
        tuner.observe(conditional_theta_sweep(lat, cpl, th, q, tuner.eps(), rng));
    tuner.freeze();
    std::vector<double> vals;
    vals.reserve(sweeps);
    for (long long i = 0; i < sweeps; ++i) {
        conditional_theta_sweep(lat, cpl, th, q, tuner.eps(), rng);
        vals.push_back(f.eval(th));
    }
    return batch_mean(vals, n_batches);
}

}  // namespace ym
