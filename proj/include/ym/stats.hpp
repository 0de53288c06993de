#pragma once

#include <vector>

namespace ym {

struct EstimateWithError {
    double value = 0.0;
    double sigma = 0.0;  // standard error of value
    long long n = 0;     // samples behind the estimate
};

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // unbiased, 0 if n < 2

// Mean with a batch-means standard error; robust to autocorrelation once
// batches are longer than the correlation time.
EstimateWithError batch_mean(const std::vector<double>& x, int n_batches = 32);

// Covariance of a paired series, error from batch-wise covariances.
EstimateWithError batch_covariance(const std::vector<double>& x, const std::vector<double>& y,
                                   int n_batches = 32);

// Biased (1/n) autocovariance at the given lag.
double autocovariance(const std::vector<double>& x, int lag);

// tau = 1 + 2 sum rho(k), truncated at the first nonpositive rho or max_lag
// (default n/4). Near 1 for independent samples.
double integrated_autocorr(const std::vector<double>& x, int max_lag = -1);

// Least-squares decay rate of the autocovariance tail: fits
// log gamma(k) ~ a - rate * k over lags [k_lo, k_hi], skipping nonpositive
// gamma. Returns the rate (-slope).
double autocorr_decay_rate(const std::vector<double>& x, int k_lo, int k_hi);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_sigma = 0.0;
    double r2 = 1.0;
    int n = 0;
};

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);
// Weights 1 / sigma^2; slope_sigma from the normal-equation covariance.
LinearFit fit_line_weighted(const std::vector<double>& xs, const std::vector<double>& ys,
                            const std::vector<double>& sigmas);

}  // namespace ym
