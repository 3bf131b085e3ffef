#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "levyhom/medium.hpp"
#include "levyhom/stats.hpp"

namespace levyhom {

/// Profile chi of the tail-inverted family; c(omega, z) = cbar * chi(z).
enum class ChiType {
  one,                     // chi = 1
  one_plus_gauss,          // 1 + amp exp(-(z / width)^2)
  one_plus_shifted_gauss,  // 1 + amp exp(-((z - shift) / width)^2); not even
  one_plus_cos,            // 1 + amp cos(2 pi z / width); has no limit at infinity
};

struct ChiProfile {
  ChiType type = ChiType::one;
  double amp = 0.0;
  double width = 1.0;
  double shift = 0.0;

  double operator()(double z) const;
  bool even() const;
  /// True when chi(z) -> 1 as |z| -> infinity.
  bool converges_to_one() const;
  double lower_bound() const;
  double upper_bound() const;
  /// Length scale on which chi varies; sets quadrature resolution.
  double feature_scale() const;
  /// |z| beyond which chi - 1 is neglected (exactly zero for chi = 1).
  double support_end() const;
  void validate() const;
};

enum class KernelFamily { linear, tail_inverted };

struct KernelSpec {
  KernelFamily family = KernelFamily::linear;
  double alpha = 1.0;
  double C = 1.0;     // linear family
  double cbar = 1.0;  // tail-inverted family
  ChiProfile chi;     // tail-inverted family
  void validate() const;
};

/// Monotone tail table for one half-line of the target profile:
/// T(y) = int_y^inf chi(u) u^{-1-alpha} du = y^{-alpha} / alpha + R(y),
/// and its inverse Gamma with T(Gamma(w)) = w^{-alpha} / alpha.
class TailTable {
 public:
  TailTable(std::function<double(double)> chi, double chi_at_zero, double alpha, double feature, double support_end);

  double tail(double y) const;  // T(y)
  /// Gamma(w) from Hermite interpolation in log-log coordinates (hot path).
  double inverse(double w) const;
  /// Gamma(w) by safeguarded Newton on T, relative tolerance 1e-13.
  double inverse_exact(double w) const;
  double chi(double y) const { return chi_(y); }

 private:
  double remainder(double y) const;  // R(y)

  std::function<double(double)> chi_;
  double chi0_;
  double alpha_;
  double log_lo_, log_hi_, dlog_;
  std::vector<double> r_;        // R at log nodes
  std::vector<double> log_g_;    // ln Gamma at log nodes of w
  std::vector<double> slope_g_;  // d ln Gamma / d ln w
};

/// Jump amplitude map gamma(omega, y) together with its derived objects.
/// Immutable after construction; the medium model is shared, the phase is
/// supplied per evaluation through a FieldSample.
class JumpKernel {
 public:
  static JumpKernel linear(std::shared_ptr<const MediumModel> model, double C, double alpha);
  static JumpKernel tail_inverted(std::shared_ptr<const MediumModel> model, double cbar, ChiProfile chi,
                                  double alpha);
  static JumpKernel from_spec(std::shared_ptr<const MediumModel> model, const KernelSpec& spec);

  const KernelSpec& spec() const { return spec_; }
  KernelFamily family() const { return spec_.family; }
  double alpha() const { return spec_.alpha; }
  const MediumModel& model() const { return *model_; }

  /// gamma(omega, y) with omega the environment described by f.
  double gamma(const FieldSample& f, double y) const;
  /// Same through the exact (non-tabulated) inverse; for checks.
  double gamma_exact(const FieldSample& f, double y) const;
  double gamma(const Medium& m, double x, double y) const { return gamma(m.eval(x), y); }

  /// c(omega, z). Both families have c independent of omega.
  double c(double z) const;
  /// theta = lim c(omega, z) as |z| -> infinity, and its mean.
  double theta_bar() const;
  /// True when gamma(omega, -y) = -gamma(omega, y) by construction.
  bool odd() const;

  /// int_{|y| < delta} gamma(omega, y)^2 nu(dy).
  double small_jump_variance(const FieldSample& f, double delta) const;
  /// int_{delta <= |y| <= 1} gamma(omega, y) nu(dy); zero for odd kernels.
  double band_compensator(const FieldSample& f, double delta) const;

  /// Principal-value drift at the truncation levels beta = 1e-1, 1e-2, 1e-3.
  std::vector<double> drift_e_levels(const FieldSample& f) const;
  /// Principal-value drift e(omega). Throws NumericalError when the beta
  /// levels are not Cauchy.
  double drift_e(const FieldSample& f) const;

  /// int g(z) c(z / eps) nu(dz) as a principal value (symmetric cutoffs).
  /// Multiplying by exp(2 V) gives the jump-functional integrand.
  double weighted_c_integral(const std::function<double(double)>& g, double eps) const;
  /// pv int h(z) c(z / eps) nu(dz) with h the unit truncation; times exp(2V)
  /// this is the drift g_eps(omega) of the truncated characteristics.
  double truncated_drift_integral(double eps) const;

  /// sup over |y| <= 1 of |gamma(omega, y)| for the given environment.
  double small_mark_bound(const FieldSample& f) const;

 private:
  JumpKernel(std::shared_ptr<const MediumModel> model, KernelSpec spec);
  double scale(const FieldSample& f) const;  // s with gamma = Gamma(|y| s)

  std::shared_ptr<const MediumModel> model_;
  KernelSpec spec_;
  std::shared_ptr<const TailTable> positive_;
  std::shared_ptr<const TailTable> negative_;
};

/// int h^2 d nu with the unit truncation h, closed form 2/(2-alpha) + 2/alpha.
double truncated_second_moment(double alpha);

struct PushforwardResult {
  stats::KsResult ks;
  double cutoff = 0.0;  // target cutoff from mass matching
  std::size_t n = 0;
};

/// Samples |z| >= delta_floor from nu, maps through gamma_omega (scaled by
/// `corruption`, 1 for the honest check) and runs a KS test of the images
/// against the normalized target law exp(2V) c(z) |z|^{-1-alpha} on
/// |z| >= cutoff. The cutoff and the target CDF are computed from the
/// target measure alone.
PushforwardResult pushforward_check(const JumpKernel& kernel, const Medium& medium, std::size_t n_samples,
                                    double delta_floor, std::uint64_t seed, double corruption = 1.0);

}  // namespace levyhom
