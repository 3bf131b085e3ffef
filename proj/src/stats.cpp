#include "levyhom/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levyhom/error.hpp"
#include "levyhom/rng.hpp"

namespace levyhom::stats {

MeanEstimate mean_estimate(std::span<const double> xs) {
  MeanEstimate out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) out.std_error = std::sqrt(variance(xs) / static_cast<double>(xs.size()));
  return out;
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_from_sorted_cdf(std::span<const double> cdf) {
  KsResult out;
  out.n = cdf.size();
  if (cdf.empty()) throw ConfigError("KS test needs at least one sample");
  const double n = static_cast<double>(cdf.size());
  double d = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, hi - cdf[i], cdf[i] - lo});
  }
  out.statistic = d;
  const double sn = std::sqrt(n);
  out.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
  return out;
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  std::vector<double> values(samples.size());
  std::transform(samples.begin(), samples.end(), values.begin(), cdf);
  return ks_from_sorted_cdf(values);
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

Interval bootstrap_interval(std::size_t n, const std::function<double(std::span<const std::size_t>)>& statistic,
                            std::uint64_t seed, std::uint64_t stream_index, int resamples, double level) {
  if (n == 0) return {};
  RandomStream rng(seed, stream_index, StreamPurpose::bootstrap);
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  std::vector<std::size_t> idx(n);
  for (auto& s : stats) {
    for (auto& i : idx) i = rng.below(n);
    s = statistic(idx);
  }
  std::sort(stats.begin(), stats.end());
  const double tail = 0.5 * (1.0 - level);
  return {quantile_sorted(stats, tail), quantile_sorted(stats, 1.0 - tail)};
}

Interval bootstrap_mean_interval(std::span<const double> xs, std::uint64_t seed, std::uint64_t stream_index,
                                 int resamples, double level) {
  return bootstrap_interval(
      xs.size(),
      [&xs](std::span<const std::size_t> idx) {
        double s = 0.0;
        for (auto i : idx) s += xs[i];
        return s / static_cast<double>(idx.size());
      },
      seed, stream_index, resamples, level);
}

}  // namespace levyhom::stats
