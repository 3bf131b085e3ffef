#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace levyhom::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int order);

  /// Shared rule of the given order; built once, read-only afterwards.
  static const GaussLegendre& get(int order);

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return half * sum;
  }
};

using Integrand = std::function<double(double)>;

/// Composite Gauss-Legendre with `pieces` equal subintervals.
double composite(const Integrand& f, double a, double b, int pieces, int order = 10);

/// Integral over [a, b] with 0 < a < b, computed in the variable s = ln u
/// so that integrands spanning many decades (power-law weights) are
/// resolved evenly.
double log_spaced(const Integrand& f, double a, double b, int pieces_per_decade = 8, int order = 10);

/// Adaptive bisection driven by the difference between one GL rule on an
/// interval and the same rule on its two halves. Throws NumericalError when
/// the depth budget is exhausted before reaching `tol`.
double adaptive(const Integrand& f, double a, double b, double tol = 1e-12, int max_depth = 40);

/// Periodic trapezoid rule: mean of f over n uniform nodes of [0, period).
/// Spectrally accurate for smooth periodic integrands.
double periodic_mean(const Integrand& f, double period, std::size_t n);

}  // namespace levyhom::quad
