#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace levyhom::stats {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

MeanEstimate mean_estimate(std::span<const double> xs);
double variance(std::span<const double> xs);  // unbiased

double normal_cdf(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// One-sample KS test. `cdf_at_sorted[i]` is the hypothesized CDF evaluated
/// at the i-th order statistic. The p-value uses Stephens' small-sample
/// correction of the asymptotic law.
KsResult ks_from_sorted_cdf(std::span<const double> cdf_at_sorted);

/// One-sample KS test against a CDF callable (samples need not be sorted).
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap interval for a statistic of an index-resampled
/// dataset of size n. `statistic` receives resampled indices.
Interval bootstrap_interval(std::size_t n, const std::function<double(std::span<const std::size_t>)>& statistic,
                            std::uint64_t seed, std::uint64_t stream_index, int resamples = 1000,
                            double level = 0.95);

/// Percentile bootstrap interval for the mean of xs.
Interval bootstrap_mean_interval(std::span<const double> xs, std::uint64_t seed, std::uint64_t stream_index,
                                 int resamples = 1000, double level = 0.95);

double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace levyhom::stats
