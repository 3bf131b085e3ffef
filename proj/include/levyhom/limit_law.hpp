#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace levyhom {

/// Triplet of the limiting symmetric Levy process: Gaussian part A, jump
/// measure theta_bar |z|^{-1-alpha} dz, zero drift under the unit truncation.
struct LevyTriplet {
  double A = 1.0;
  double theta_bar = 0.0;
  double alpha = 1.0;
  void validate() const;
};

/// sigma_alpha = 2 int_0^inf (1 - cos v) v^{-1-alpha} dv, computed by
/// quadrature (series on [0, 1], integration by parts plus half-period
/// pairing on [1, inf)) and cached per alpha.
double stable_constant(double alpha);

/// int (e^{iuz} - 1 - iuz 1_{|z|<=1}) |z|^{-1-alpha} dz = -sigma_alpha |u|^alpha.
double stable_integral(double alpha, double u);

/// phi(u) = -A u^2 / 2 + theta_bar * stable_integral(alpha, u).
std::complex<double> exponent(const LevyTriplet& triplet, double u);
std::vector<std::complex<double>> exponent(const LevyTriplet& triplet, const std::vector<double>& u);

/// Symmetric alpha-stable variate with E exp(iuX) = exp(-|u|^alpha)
/// (Chambers-Mallows-Stuck transform of a uniform angle and an exponential).
double standard_symmetric_stable(double alpha, double angle_uniform, double exp_variate);

/// n samples of L_t = sqrt(A t) Z + (t theta_bar sigma_alpha)^{1/alpha} X.
std::vector<double> sample_limit(const LevyTriplet& triplet, double t, std::size_t n, std::uint64_t seed);

struct TripletReport {
  double drift = 0.0;             // B^{(h)}
  double gaussian = 0.0;          // C = A t
  double jump_intensity = 0.0;    // theta_bar (jump measure theta_bar nu)
  double h2_closed_form = 0.0;    // 2/(2-alpha) + 2/alpha
  double h2_quadrature = 0.0;     // int h^2 d nu by quadrature
  double compensator_slope = 0.0; // A + theta_bar int h^2 d nu
};
TripletReport triplet_report(const LevyTriplet& triplet, double t);

}  // namespace levyhom
