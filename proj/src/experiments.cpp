#include "ym/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "ym/stats.hpp"
#include "ym/su.hpp"

namespace ym {

namespace {

// fixed rng stream ids so every experiment is reproducible in isolation
constexpr unsigned long long kStreamMassGap = 21;
constexpr unsigned long long kStreamVolume = 31;
constexpr unsigned long long kStreamBetaCenter = 41;
constexpr unsigned long long kStreamBetaPlus = 42;
constexpr unsigned long long kStreamBetaMinus = 43;
constexpr unsigned long long kStreamLargeN = 51;
constexpr unsigned long long kStreamLangevin = 61;
constexpr unsigned long long kStreamJointRef = 62;

struct BatchLayout {
    int nb;
    long long len;
    long long skip;  // leading measurements dropped to align batches
};

BatchLayout layout(long long n_meas, int n_batches) {
    BatchLayout b;
    b.nb = static_cast<int>(std::max<long long>(2, std::min<long long>(n_batches, n_meas / 2)));
    b.len = n_meas / b.nb;
    b.skip = n_meas - static_cast<long long>(b.nb) * b.len;
    return b;
}

double field_defect(const GaugeField& q, bool special) {
    double worst = 0.0;
    for (const auto& m : q.q) {
        double d = unitarity_defect(m);
        if (special) d = std::max(d, std::abs(m.determinant() - cplx(1.0, 0.0)));
        worst = std::max(worst, d);
    }
    return worst;
}

}  // namespace

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const Table& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << (c ? "," : "") << t.columns[c];
    os << "\n";
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size()) throw std::runtime_error("write_csv: ragged row");
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << format_g17(row[c]);
        os << "\n";
    }
    if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

UnChain::UnChain(const Lattice& lat, const Couplings& cpl, int n, unsigned long long seed,
                 unsigned long long stream, double eps0)
    : lat_(lat), cpl_(cpl), u_(GaugeField::identity(lat, n)), rng_(seed, stream), tuner_(eps0) {
    u_ = GaugeField::haar_un(lat, n, rng_);
}

void UnChain::burn(long long sweeps) {
    for (long long i = 0; i < sweeps; ++i)
        tuner_.observe(metropolis_sweep_un(lat_, cpl_, u_, tuner_.eps(), rng_));
    tuner_.freeze();
}

SweepStats UnChain::sweep() { return metropolis_sweep_un(lat_, cpl_, u_, tuner_.eps(), rng_); }

void UnChain::restore_frozen(double eps) {
    tuner_ = StepTuner(eps);
    tuner_.freeze();
}

Table MassGapResult::table() const {
    Table t;
    t.columns = {"r", "cov", "sigma", "n_pairs", "used"};
    for (const auto& r : rows)
        t.rows.push_back({double(r.r), r.cov, r.sigma, double(r.n_pairs), r.used ? 1.0 : 0.0});
    return t;
}

MassGapResult mass_gap_scan(const Lattice& lat, const Couplings& cpl, int n, LoopKind kind,
                            int max_r, const McOptions& mc) {
    const int P = lat.n_plaquettes();
    std::vector<std::vector<LoopPair>> pairs(max_r + 1);
    for (int r = 0; r <= max_r; ++r) {
        pairs[r] = plaquette_pairs_at_distance(lat, r);
        if (pairs[r].empty())
            throw std::invalid_argument("mass_gap_scan: no plaquette pairs at distance " +
                                        std::to_string(r));
    }
    std::vector<std::vector<OrientedEdge>> loops(P);
    for (int p = 0; p < P; ++p) loops[p] = plaquette_loop(lat, p);

    UnChain chain(lat, cpl, n, mc.seed, kStreamMassGap, mc.eps0);
    chain.burn(mc.burn_sweeps);

    const long long n_meas = std::max<long long>(1, mc.sweeps / std::max(1, mc.measure_every));
    BatchLayout bl = layout(n_meas, mc.n_batches);
    std::vector<std::vector<double>> sumv(bl.nb, std::vector<double>(P, 0.0));
    std::vector<std::vector<double>> sumab(bl.nb, std::vector<double>(max_r + 1, 0.0));

    long long meas = 0;
    std::vector<double> a(P);
    for (long long s = 0; s < mc.sweeps; ++s) {
        chain.sweep();
        if (s % std::max(1, mc.measure_every) != 0) continue;
        if (meas >= bl.skip + bl.nb * bl.len) break;
        long long idx = meas++ - bl.skip;
        if (idx < 0) continue;
        int b = static_cast<int>(idx / bl.len);
        DecomposedField df = decompose_field(chain.field());
        for (int p = 0; p < P; ++p) a[p] = loop_value(df, loops[p], kind);
        for (int p = 0; p < P; ++p) sumv[b][p] += a[p];
        for (int r = 0; r <= max_r; ++r) {
            double s2 = 0.0;
            for (const auto& pr : pairs[r]) s2 += a[pr.pa] * a[pr.pb];
            sumab[b][r] += s2;
        }
    }

    MassGapResult res;
    res.kind = kind;
    for (int r = 0; r <= max_r; ++r) {
        const double np = double(pairs[r].size());
        std::vector<double> bc(bl.nb, 0.0);
        for (int b = 0; b < bl.nb; ++b) {
            double crossmean = sumab[b][r] / (np * double(bl.len));
            double mm = 0.0;
            for (const auto& pr : pairs[r])
                mm += (sumv[b][pr.pa] / double(bl.len)) * (sumv[b][pr.pb] / double(bl.len));
            bc[b] = crossmean - mm / np;
        }
        MassGapRow row;
        row.r = r;
        row.n_pairs = static_cast<int>(np);
        row.cov = mean(bc);
        row.sigma = std::sqrt(variance(bc) / bl.nb);
        res.rows.push_back(row);
    }

    std::vector<double> xs, ys, ss;
    for (auto& row : res.rows) {
        row.used = row.sigma > 0.0 && std::abs(row.cov) >= 2.0 * row.sigma;
        if (row.used) {
            xs.push_back(row.r);
            ys.push_back(std::log(std::abs(row.cov)));
            ss.push_back(row.sigma / std::abs(row.cov));
        }
    }
    res.n_used = static_cast<int>(xs.size());
    if (res.n_used >= 2) {
        LinearFit f = fit_line_weighted(xs, ys, ss);
        res.slope = f.slope;
        res.slope_sigma = f.slope_sigma;
        res.r2 = f.r2;
        res.fit_ok = true;
    }
    return res;
}

Table VolumeScanResult::table() const {
    Table t;
    t.columns = {"L", "mean", "sigma"};
    for (const auto& r : rows) t.rows.push_back({double(r.L), r.mean, r.sigma});
    return t;
}

VolumeScanResult volume_scan(int d, int n, double beta, double c_d_star,
                             const std::vector<int>& l_values, LoopKind kind,
                             const McOptions& mc) {
    VolumeScanResult res;
    res.kind = kind;
    for (int L : l_values) {
        Lattice lat = Lattice::cube(d, L);
        Couplings cpl = Couplings::uniform(lat, n, beta, c_d_star);
        std::vector<int> org(d, 0);
        int v0 = lat.vertex_index(org);
        int p0 = lat.plaq_at(v0, 0, 1);
        if (p0 < 0) throw std::runtime_error("volume_scan: missing center plaquette");
        auto loop = plaquette_loop(lat, p0);

        UnChain chain(lat, cpl, n, mc.seed, kStreamVolume + static_cast<unsigned long long>(L),
                      mc.eps0);
        chain.burn(mc.burn_sweeps);
        std::vector<double> vals;
        const int every = std::max(1, mc.measure_every);
        vals.reserve(mc.sweeps / every + 1);
        for (long long s = 0; s < mc.sweeps; ++s) {
            chain.sweep();
            if (s % every != 0) continue;
            vals.push_back(loop_value(decompose_field(chain.field()), loop, kind));
        }
        auto est = batch_mean(vals, mc.n_batches);
        res.rows.push_back({L, est.value, est.sigma});
    }
    return res;
}

Table BetaDerivativeResult::table() const {
    Table t;
    t.columns = {"target", "probe", "delta", "fd", "fd_sigma", "cov", "cov_sigma"};
    t.rows.push_back({double(target), double(probe), delta, fd, fd_sigma, cov, cov_sigma});
    return t;
}

BetaDerivativeResult beta_derivative_check(const Lattice& lat, const Couplings& cpl, int n,
                                           int target_plaquette, int probe_plaquette,
                                           double delta, const McOptions& mc) {
    if (target_plaquette < 0 || target_plaquette >= lat.n_plaquettes() || probe_plaquette < 0 ||
        probe_plaquette >= lat.n_plaquettes())
        throw std::invalid_argument("beta_derivative_check: plaquette out of range");
    if (!(delta > 0.0)) throw std::invalid_argument("beta_derivative_check: delta <= 0");

    auto run_mean = [&](const Couplings& c, unsigned long long stream) {
        UnChain chain(lat, c, n, mc.seed, stream, mc.eps0);
        chain.burn(mc.burn_sweeps);
        std::vector<double> f;
        const int every = std::max(1, mc.measure_every);
        for (long long s = 0; s < mc.sweeps; ++s) {
            chain.sweep();
            if (s % every != 0) continue;
            f.push_back(n * plaquette_product(lat, chain.field(), probe_plaquette).trace().real());
        }
        return batch_mean(f, mc.n_batches);
    };

    Couplings plus = cpl, minus = cpl;
    plus.beta[target_plaquette] += delta;
    minus.beta[target_plaquette] -= delta;
    auto mp = run_mean(plus, kStreamBetaPlus);
    auto mm = run_mean(minus, kStreamBetaMinus);

    UnChain chain(lat, cpl, n, mc.seed, kStreamBetaCenter, mc.eps0);
    chain.burn(mc.burn_sweeps);
    std::vector<double> f, g;
    const int every = std::max(1, mc.measure_every);
    for (long long s = 0; s < mc.sweeps; ++s) {
        chain.sweep();
        if (s % every != 0) continue;
        f.push_back(n * plaquette_product(lat, chain.field(), probe_plaquette).trace().real());
        g.push_back(n * plaquette_product(lat, chain.field(), target_plaquette).trace().real());
    }
    auto cv = batch_covariance(f, g, mc.n_batches);

    BetaDerivativeResult res;
    res.target = target_plaquette;
    res.probe = probe_plaquette;
    res.delta = delta;
    res.fd = (mp.value - mm.value) / (2.0 * delta);
    res.fd_sigma = std::sqrt(mp.sigma * mp.sigma + mm.sigma * mm.sigma) / (2.0 * delta);
    res.cov = cv.value;
    res.cov_sigma = cv.sigma;
    return res;
}

Table LargeNResult::table() const {
    Table t;
    t.columns = {"n", "var_w", "var_sigma", "disc", "disc_sigma"};
    for (const auto& r : rows)
        t.rows.push_back({double(r.n), r.var_w, r.var_sigma, r.disc, r.disc_sigma});
    return t;
}

LargeNResult large_n_scan(int d, int L, double beta, double c_d_star,
                          const std::vector<int>& n_values, const McOptions& mc) {
    Lattice lat = Lattice::cube(d, L);
    const int P = lat.n_plaquettes();
    auto adj = plaquette_pairs_at_distance(lat, 0);
    if (adj.empty()) throw std::runtime_error("large_n_scan: no adjacent plaquette pairs");

    LargeNResult res;
    for (int n : n_values) {
        Couplings cpl = Couplings::uniform(lat, n, beta, c_d_star);
        UnChain chain(lat, cpl, n, mc.seed, kStreamLargeN + static_cast<unsigned long long>(n),
                      mc.eps0);
        chain.burn(mc.burn_sweeps);

        const long long n_meas = std::max<long long>(1, mc.sweeps / std::max(1, mc.measure_every));
        BatchLayout bl = layout(n_meas, mc.n_batches);
        std::vector<std::vector<double>> sv(bl.nb, std::vector<double>(P, 0.0));
        std::vector<std::vector<double>> sv2(bl.nb, std::vector<double>(P, 0.0));
        std::vector<double> sab(bl.nb, 0.0);

        long long meas = 0;
        std::vector<double> w(P);
        for (long long s = 0; s < mc.sweeps; ++s) {
            chain.sweep();
            if (s % std::max(1, mc.measure_every) != 0) continue;
            if (meas >= bl.skip + bl.nb * bl.len) break;
            long long idx = meas++ - bl.skip;
            if (idx < 0) continue;
            int b = static_cast<int>(idx / bl.len);
            for (int p = 0; p < P; ++p)
                w[p] = plaquette_product(lat, chain.field(), p).trace().real() / n;
            for (int p = 0; p < P; ++p) {
                sv[b][p] += w[p];
                sv2[b][p] += w[p] * w[p];
            }
            double s2 = 0.0;
            for (const auto& pr : adj) s2 += w[pr.pa] * w[pr.pb];
            sab[b] += s2;
        }

        std::vector<double> bvar(bl.nb, 0.0), bcov(bl.nb, 0.0);
        const double np = double(adj.size());
        for (int b = 0; b < bl.nb; ++b) {
            double v = 0.0;
            for (int p = 0; p < P; ++p) {
                double m1 = sv[b][p] / double(bl.len);
                v += sv2[b][p] / double(bl.len) - m1 * m1;
            }
            bvar[b] = v / P;
            double mm = 0.0;
            for (const auto& pr : adj)
                mm += (sv[b][pr.pa] / double(bl.len)) * (sv[b][pr.pb] / double(bl.len));
            bcov[b] = sab[b] / (np * double(bl.len)) - mm / np;
        }
        LargeNRow row;
        row.n = n;
        row.var_w = mean(bvar);
        row.var_sigma = std::sqrt(variance(bvar) / bl.nb);
        row.disc = std::abs(mean(bcov));
        row.disc_sigma = std::sqrt(variance(bcov) / bl.nb);
        res.rows.push_back(row);
    }

    std::vector<double> xs, ys, ss;
    for (const auto& r : res.rows) {
        if (r.var_w <= 0.0) continue;
        xs.push_back(std::log(double(r.n)));
        ys.push_back(std::log(r.var_w));
        ss.push_back(std::max(1e-12, r.var_sigma / r.var_w));
    }
    if (xs.size() >= 2) {
        LinearFit f = fit_line_weighted(xs, ys, ss);
        res.slope = f.slope;
        res.slope_sigma = f.slope_sigma;
        res.fit_ok = true;
    }
    return res;
}

Table LangevinHaarResult::table() const {
    Table t;
    t.columns = {"mean_re_tr", "mean_re_sigma", "mean_abs2", "abs2_sigma", "max_defect"};
    t.rows.push_back({mean_re_tr, mean_re_sigma, mean_abs2, abs2_sigma, max_defect});
    return t;
}

LangevinHaarResult langevin_haar_check(const Lattice& lat, int n, double h, long long burn_steps,
                                       long long steps, int n_batches, unsigned long long seed) {
    Couplings cpl = Couplings::uniform(lat, n, 0.0);
    GaugeField q = GaugeField::identity(lat, n);
    RngStream rng(seed, kStreamLangevin);
    LangevinHaarResult res;
    for (long long s = 0; s < burn_steps; ++s) langevin_step_wilson(lat, cpl, q, h, rng);
    std::vector<double> re, abs2;
    re.reserve(steps);
    abs2.reserve(steps);
    for (long long s = 0; s < steps; ++s) {
        langevin_step_wilson(lat, cpl, q, h, rng);
        double sr = 0.0, sa = 0.0;
        for (const auto& m : q.q) {
            cplx tr = m.trace();
            sr += tr.real();
            sa += std::norm(tr);
        }
        re.push_back(sr / double(q.q.size()));
        abs2.push_back(sa / double(q.q.size()));
        if (s % 100 == 0) res.max_defect = std::max(res.max_defect, field_defect(q, true));
    }
    res.max_defect = std::max(res.max_defect, field_defect(q, true));
    auto er = batch_mean(re, n_batches);
    auto ea = batch_mean(abs2, n_batches);
    res.mean_re_tr = er.value;
    res.mean_re_sigma = er.sigma;
    res.mean_abs2 = ea.value;
    res.abs2_sigma = ea.sigma;
    return res;
}

Table LangevinStationarityResult::table() const {
    Table t;
    t.columns = {"langevin_mean", "langevin_sigma", "reference_mean", "reference_sigma"};
    t.rows.push_back({langevin_mean, langevin_sigma, reference_mean, reference_sigma});
    return t;
}

LangevinStationarityResult langevin_stationarity_check(const Lattice& lat, const Couplings& cpl,
                                                       int n, PhaseEstimator& phases, double h,
                                                       long long burn_steps, long long steps,
                                                       long long ref_burn, long long ref_sweeps,
                                                       int n_batches, unsigned long long seed) {
    const int P = lat.n_plaquettes();
    auto su_mean = [&](const GaugeField& q) {
        double s = 0.0;
        for (int p = 0; p < P; ++p) s += plaquette_product(lat, q, p).trace().real() / n;
        return s / P;
    };

    RngStream rng(seed, kStreamLangevin);
    GaugeField q = GaugeField::haar_sun(lat, n, rng);
    for (long long s = 0; s < burn_steps; ++s) {
        langevin_step(lat, cpl, q, phases, h, rng);
        if (s % 1000 == 999)
            for (auto& m : q.q) m = reunitarize(m, true);
    }
    std::vector<double> vals;
    vals.reserve(steps);
    for (long long s = 0; s < steps; ++s) {
        langevin_step(lat, cpl, q, phases, h, rng);
        if (s % 1000 == 999)
            for (auto& m : q.q) m = reunitarize(m, true);
        vals.push_back(su_mean(q));
    }
    auto le = batch_mean(vals, n_batches);

    RngStream rng2(seed, kStreamJointRef);
    DecomposedField f;
    f.theta = zero_angles(lat);
    f.q = GaugeField::haar_sun(lat, n, rng2);
    StepTuner tuner(0.6);
    for (long long s = 0; s < ref_burn; ++s)
        tuner.observe(metropolis_sweep_joint(lat, cpl, f, tuner.eps(), tuner.eps(), rng2));
    tuner.freeze();
    std::vector<double> ref;
    ref.reserve(ref_sweeps);
    for (long long s = 0; s < ref_sweeps; ++s) {
        metropolis_sweep_joint(lat, cpl, f, tuner.eps(), tuner.eps(), rng2);
        ref.push_back(su_mean(f.q));
    }
    auto re = batch_mean(ref, n_batches);

    LangevinStationarityResult res;
    res.langevin_mean = le.value;
    res.langevin_sigma = le.sigma;
    res.reference_mean = re.value;
    res.reference_sigma = re.sigma;
    return res;
}

EstimateWithError conditional_phase_covariance_mc(const Lattice& lat, const Couplings& cpl,
                                                  const GaugeField& q, int pa, int pb,
                                                  long long burn_sweeps, long long sweeps,
                                                  int n_batches, RngStream& rng) {
    AngleField th = zero_angles(lat);
    StepTuner tuner(0.8);
    for (long long s = 0; s < burn_sweeps; ++s)
        tuner.observe(conditional_theta_sweep(lat, cpl, th, q, tuner.eps(), rng));
    tuner.freeze();
    std::vector<double> fa, fb;
    fa.reserve(sweeps);
    fb.reserve(sweeps);
    for (long long s = 0; s < sweeps; ++s) {
        conditional_theta_sweep(lat, cpl, th, q, tuner.eps(), rng);
        fa.push_back(std::cos(theta_p(lat, th, pa) / q.n));
        fb.push_back(std::cos(theta_p(lat, th, pb) / q.n));
    }
    return batch_covariance(fa, fb, n_batches);
}

}  // namespace ym
