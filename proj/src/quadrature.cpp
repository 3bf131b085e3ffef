#include "levyhom/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "levyhom/error.hpp"

namespace levyhom::quad {

GaussLegendre::GaussLegendre(int order) : nodes(order), weights(order) {
  if (order < 1) throw ConfigError("Gauss-Legendre order must be positive");
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

const GaussLegendre& GaussLegendre::get(int order) {
  static std::mutex mutex;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, GaussLegendre(order)).first;
  return it->second;
}

double composite(const Integrand& f, double a, double b, int pieces, int order) {
  const auto& rule = GaussLegendre::get(order);
  const double h = (b - a) / pieces;
  double sum = 0.0;
  for (int i = 0; i < pieces; ++i) sum += rule.integrate(f, a + i * h, a + (i + 1) * h);
  return sum;
}

double log_spaced(const Integrand& f, double a, double b, int pieces_per_decade, int order) {
  if (!(a > 0.0) || !(b > a)) throw ConfigError("log_spaced needs 0 < a < b");
  const double decades = std::log10(b / a);
  const int pieces = std::max(1, static_cast<int>(std::ceil(decades * pieces_per_decade)));
  const auto g = [&f](double s) {
    const double u = std::exp(s);
    return f(u) * u;
  };
  return composite(g, std::log(a), std::log(b), pieces, order);
}

namespace {

double adaptive_step(const Integrand& f, double a, double b, double whole, double tol, int depth,
                     const GaussLegendre& rule) {
  const double mid = 0.5 * (a + b);
  const double left = rule.integrate(f, a, mid);
  const double right = rule.integrate(f, mid, b);
  const double refined = left + right;
  if (std::abs(refined - whole) <= tol) return refined;
  if (depth <= 0)
    throw NumericalError("adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]");
  return adaptive_step(f, a, mid, left, 0.5 * tol, depth - 1, rule) +
         adaptive_step(f, mid, b, right, 0.5 * tol, depth - 1, rule);
}

}  // namespace

double adaptive(const Integrand& f, double a, double b, double tol, int max_depth) {
  const auto& rule = GaussLegendre::get(10);
  return adaptive_step(f, a, b, rule.integrate(f, a, b), tol, max_depth, rule);
}

double periodic_mean(const Integrand& f, double period, std::size_t n) {
  double sum = 0.0;
  const double h = period / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) sum += f(h * static_cast<double>(i));
  return sum / static_cast<double>(n);
}

}  // namespace levyhom::quad
