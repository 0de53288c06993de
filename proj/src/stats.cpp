#include "ym/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ym {

double mean(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("mean: empty series");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double m = mean(x), s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(n - 1);
}

EstimateWithError batch_mean(const std::vector<double>& x, int n_batches) {
    if (x.empty()) throw std::invalid_argument("batch_mean: empty series");
    const long long n = static_cast<long long>(x.size());
    int nb = std::max(2, static_cast<int>(std::min<long long>(n_batches, n)));
    long long len = n / nb;  // drop the remainder at the front
    long long start = n - nb * len;
    std::vector<double> bm(nb, 0.0);
    for (int b = 0; b < nb; ++b) {
        double s = 0.0;
        for (long long i = 0; i < len; ++i) s += x[start + b * len + i];
        bm[b] = s / static_cast<double>(len);
    }
    EstimateWithError out;
    out.value = mean(x);
    out.sigma = std::sqrt(variance(bm) / nb);
    out.n = n;
    return out;
}

EstimateWithError batch_covariance(const std::vector<double>& x, const std::vector<double>& y,
                                   int n_batches) {
    if (x.size() != y.size() || x.size() < 4)
        throw std::invalid_argument("batch_covariance: need paired series, n >= 4");
    const long long n = static_cast<long long>(x.size());
    int nb = std::max(2, static_cast<int>(std::min<long long>(n_batches, n / 2)));
    long long len = n / nb;
    long long start = n - nb * len;
    double mx = mean(x), my = mean(y);
    std::vector<double> bc(nb, 0.0);
    for (int b = 0; b < nb; ++b) {
        double s = 0.0;
        for (long long i = 0; i < len; ++i) {
            long long j = start + b * len + i;
            s += (x[j] - mx) * (y[j] - my);
        }
        bc[b] = s / static_cast<double>(len);
    }
    EstimateWithError out;
    out.value = mean(bc);
    out.sigma = std::sqrt(variance(bc) / nb);
    out.n = n;
    return out;
}

double autocovariance(const std::vector<double>& x, int lag) {
    const long long n = static_cast<long long>(x.size());
    if (lag < 0 || lag >= n) throw std::invalid_argument("autocovariance: bad lag");
    double m = mean(x), s = 0.0;
    for (long long i = 0; i + lag < n; ++i) s += (x[i] - m) * (x[i + lag] - m);
    return s / static_cast<double>(n);
}

double integrated_autocorr(const std::vector<double>& x, int max_lag) {
    const long long n = static_cast<long long>(x.size());
    if (n < 8) throw std::invalid_argument("integrated_autocorr: series too short");
    if (max_lag < 0) max_lag = static_cast<int>(n / 4);
    double g0 = autocovariance(x, 0);
    if (g0 <= 0.0) return 1.0;
    double tau = 1.0;
    for (int k = 1; k <= max_lag; ++k) {
        double rho = autocovariance(x, k) / g0;
        if (rho <= 0.0) break;
        tau += 2.0 * rho;
    }
    return tau;
}

double autocorr_decay_rate(const std::vector<double>& x, int k_lo, int k_hi) {
    if (k_lo < 0 || k_hi <= k_lo) throw std::invalid_argument("autocorr_decay_rate: bad lag window");
    std::vector<double> ks, lg;
    for (int k = k_lo; k <= k_hi; ++k) {
        double g = autocovariance(x, k);
        if (g <= 0.0) continue;
        ks.push_back(k);
        lg.push_back(std::log(g));
    }
    if (ks.size() < 3) throw std::runtime_error("autocorr_decay_rate: tail too noisy");
    return -fit_line(ks, lg).slope;
}

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> ones(xs.size(), 1.0);
    LinearFit f = fit_line_weighted(xs, ys, ones);
    // No per-point sigmas: scale the slope error by the residual variance.
    if (f.n > 2) {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double r = ys[i] - f.intercept - f.slope * xs[i];
            ss_res += r * r;
        }
        f.slope_sigma *= std::sqrt(ss_res / (f.n - 2));
    }
    return f;
}

LinearFit fit_line_weighted(const std::vector<double>& xs, const std::vector<double>& ys,
                            const std::vector<double>& sigmas) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n || sigmas.size() != n)
        throw std::invalid_argument("fit_line: need >= 2 matched points");
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sigmas[i] > 0.0)) throw std::invalid_argument("fit_line: nonpositive sigma");
        double w = 1.0 / (sigmas[i] * sigmas[i]);
        sw += w;
        swx += w * xs[i];
        swy += w * ys[i];
        swxx += w * xs[i] * xs[i];
        swxy += w * xs[i] * ys[i];
    }
    double det = sw * swxx - swx * swx;
    if (!(std::abs(det) > 0.0)) throw std::runtime_error("fit_line: degenerate abscissae");
    LinearFit f;
    f.n = static_cast<int>(n);
    f.slope = (sw * swxy - swx * swy) / det;
    f.intercept = (swxx * swy - swx * swxy) / det;
    f.slope_sigma = std::sqrt(sw / det);
    double ss_res = 0, ss_tot = 0, ym = swy / sw;
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0 / (sigmas[i] * sigmas[i]);
        double r = ys[i] - f.intercept - f.slope * xs[i];
        ss_res += w * r * r;
        ss_tot += w * (ys[i] - ym) * (ys[i] - ym);
    }
    f.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

}  // namespace ym
