#include "levyhom/limit_law.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "levyhom/error.hpp"
#include "levyhom/quadrature.hpp"
#include "levyhom/rng.hpp"

namespace levyhom {

namespace {

constexpr double kPi = std::numbers::pi;

double compute_stable_constant(double alpha) {
  // [0, 1]: int (1 - cos v) v^{-1-alpha} = sum_k (-1)^{k+1} / ((2k)! (2k - alpha)).
  double head = 0.0;
  double fact = 1.0;
  for (int k = 1; k <= 20; ++k) {
    fact *= (2.0 * k - 1.0) * (2.0 * k);
    const double term = 1.0 / (fact * (2.0 * k - alpha));
    head += (k % 2 == 1) ? term : -term;
    if (term < 1e-20) break;
  }
  // [1, inf): 1/alpha - int_1^inf cos v v^{-1-alpha} dv, and two integrations by parts give
  // int_1^inf cos v v^{-1-alpha} = -sin 1 + (1+alpha) cos 1 - (1+alpha)(2+alpha) J,
  // J = int_1^inf cos v v^{-3-alpha} dv.
  const auto& gl = quad::GaussLegendre::get(20);
  const auto g = [alpha](double v) { return std::cos(v) * std::pow(v, -3.0 - alpha); };
  double j = gl.integrate(g, 1.0, 0.5 * kPi);
  // Half periods between zeros of cos, summed in pairs until negligible.
  for (long k = 0;; ++k) {
    const double a = (k + 0.5) * kPi;
    const double pair = gl.integrate(g, a, a + kPi) + gl.integrate(g, a + kPi, a + 2.0 * kPi);
    k += 1;
    j += pair;
    if (std::abs(pair) < 1e-19 && k > 8) break;
    if (k > 10000000) throw NumericalError("stable_constant: tail sum did not converge");
  }
  const double cos_tail = -std::sin(1.0) + (1.0 + alpha) * std::cos(1.0) - (1.0 + alpha) * (2.0 + alpha) * j;
  return 2.0 * (head + 1.0 / alpha - cos_tail);
}

}  // namespace

void LevyTriplet::validate() const {
  if (!(A >= 0.0) || !std::isfinite(A)) throw ConfigError("triplet: A must be nonnegative");
  if (!(theta_bar >= 0.0) || !std::isfinite(theta_bar)) throw ConfigError("triplet: theta_bar must be nonnegative");
  if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("triplet: alpha must lie in (0, 2)");
}

double stable_constant(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("stable_constant: alpha must lie in (0, 2)");
  static std::mutex mutex;
  static std::map<double, double> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (const auto it = cache.find(alpha); it != cache.end()) return it->second;
  }
  const double value = compute_stable_constant(alpha);
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(alpha, value).first->second;
}

double stable_integral(double alpha, double u) {
  if (u == 0.0) return 0.0;
  return -stable_constant(alpha) * std::pow(std::abs(u), alpha);
}

std::complex<double> exponent(const LevyTriplet& triplet, double u) {
  triplet.validate();
  const double jump = triplet.theta_bar == 0.0 ? 0.0 : triplet.theta_bar * stable_integral(triplet.alpha, u);
  return {-0.5 * triplet.A * u * u + jump, 0.0};
}

std::vector<std::complex<double>> exponent(const LevyTriplet& triplet, const std::vector<double>& u) {
  triplet.validate();
  std::vector<std::complex<double>> out;
  out.reserve(u.size());
  for (const double v : u) out.push_back(exponent(triplet, v));
  return out;
}

double standard_symmetric_stable(double alpha, double angle_uniform, double exp_variate) {
  const double v = kPi * (angle_uniform - 0.5);
  if (alpha == 1.0) return std::tan(v);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / exp_variate, (1.0 - alpha) / alpha);
}

std::vector<double> sample_limit(const LevyTriplet& triplet, double t, std::size_t n, std::uint64_t seed) {
  triplet.validate();
  if (n < 1) throw ConfigError("sample_limit: n must be >= 1");
  const double gauss = std::sqrt(triplet.A * t);
  const double scale = triplet.theta_bar > 0.0
                           ? std::pow(t * triplet.theta_bar * stable_constant(triplet.alpha), 1.0 / triplet.alpha)
                           : 0.0;
  RandomStream rng(seed, 0, StreamPurpose::sampler);
  std::vector<double> out(n);
  for (auto& x : out) {
    const double z = rng.normal();
    const double angle = rng.uniform();
    const double w = rng.exponential();
    x = gauss * z + (scale > 0.0 ? scale * standard_symmetric_stable(triplet.alpha, angle, w) : 0.0);
  }
  return out;
}

TripletReport triplet_report(const LevyTriplet& triplet, double t) {
  triplet.validate();
  TripletReport r;
  r.gaussian = triplet.A * t;
  r.jump_intensity = triplet.theta_bar;
  const double a = triplet.alpha;
  r.h2_closed_form = 2.0 / (2.0 - a) + 2.0 / a;
  // Per half-line: int_0^1 z^{1-alpha} dz, plus the mass beyond 1, which in
  // the variable s = z^{-alpha} is int_0^1 ds / alpha.
  const double inner = quad::log_spaced([a](double z) { return std::pow(z, 1.0 - a); }, 1e-14, 1.0, 16);
  const double outer = quad::composite([a](double) { return 1.0 / a; }, 0.0, 1.0, 1);
  r.h2_quadrature = 2.0 * (inner + std::pow(1e-14, 2.0 - a) / (2.0 - a) + outer);
  r.compensator_slope = triplet.A + triplet.theta_bar * r.h2_closed_form;
  return r;
}

}  // namespace levyhom
