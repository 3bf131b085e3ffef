#pragma once

#include <cstddef>
#include <vector>

#include "levyhom/jump_kernel.hpp"
#include "levyhom/medium.hpp"

namespace levyhom {

struct GeneratorOptions {
  double z_min = 1e-3;         // Taylor band |z| < max(z_min, grid step)
  double z_max_periods = 256;  // explicit cells up to this many periods
};

/// Periodic grid discretization of the generator in conservative form,
/// L = -P^{-1} (K^d + eps^{2-alpha} K^j), with P the pi-weights. K^d is the
/// cyclic tridiagonal stiffness of 1/2 (a Dphi, Dpsi)_pi and K^j the
/// symmetric circulant stiffness of the nonlocal form in its c-representation.
class DiscreteGenerator {
 public:
  static DiscreteGenerator assemble(const Medium& medium, const JumpKernel* kernel, double eps, std::size_t n,
                                    GeneratorOptions options = {});

  std::size_t size() const { return n_; }
  double step() const { return h_; }
  double period() const { return period_; }
  double eps() const { return eps_; }
  bool has_jumps() const { return has_jumps_; }
  double jump_factor() const { return jump_factor_; }  // eps^{2-alpha}
  double node(std::size_t i) const { return h_ * static_cast<double>(i); }

  const std::vector<FieldSample>& fields() const { return fields_; }
  const std::vector<double>& pi_weights() const { return p_; }
  /// a exp(-2V) at midpoints i + 1/2.
  const std::vector<double>& conductance() const { return w_; }
  /// mbar exp(-2V) at midpoints: the pi-weights of gradients.
  const std::vector<double>& midpoint_pi_weights() const { return q_; }
  /// Circulant weights S_r, r = 0..n-1 (S_0 = 0, S_r = S_{n-r}).
  const std::vector<double>& circulant() const { return s_; }
  double mu_weight() const { return mbar_; }

  std::vector<double> apply(const std::vector<double>& phi) const;            // L phi
  std::vector<double> apply_stiffness(const std::vector<double>& phi) const;  // (K^d + eps^{2-alpha} K^j) phi
  double form_d(const std::vector<double>& phi, const std::vector<double>& psi) const;
  /// Unscaled nonlocal form B^j.
  double form_j(const std::vector<double>& phi, const std::vector<double>& psi) const;
  double inner_pi(const std::vector<double>& phi, const std::vector<double>& psi) const;
  /// |D phi|_pi^2 with forward differences at midpoints.
  double gradient_norm2(const std::vector<double>& phi) const;
  double mean_pi(const std::vector<double>& f) const;
  std::vector<double> row_sums() const;
  /// Diagonal of K^d + eps^{2-alpha} K^j.
  std::vector<double> apply_stiffness_diagonal() const;
  /// Samples a field functional at the nodes.
  std::vector<double> sample(const FieldFunctional& f) const;

 private:
  std::vector<double> apply_jump(const std::vector<double>& phi) const;

  std::size_t n_ = 0;
  double h_ = 0.0, period_ = 1.0, eps_ = 1.0;
  bool has_jumps_ = false;
  double jump_factor_ = 0.0;
  double mbar_ = 0.0;
  std::vector<FieldSample> fields_;
  std::vector<double> p_;
  std::vector<double> w_;
  std::vector<double> q_;
  std::vector<double> s_;
};

struct ResolventSolution {
  std::vector<double> u;
  double relative_residual = 0.0;  // |r|_2 / |P f|_2
  double backward_error = 0.0;     // |r|_inf / (|M|_inf |u|_inf + |P f|_inf)
  bool contraction = false;  // |lambda u|_inf <= |f|_inf
  double mean_lambda_u = 0.0;
  double mean_f = 0.0;
};

/// Solves lambda u - L u = f, i.e. (lambda P + K) u = P f.
ResolventSolution solve_resolvent(const DiscreteGenerator& gen, double lambda, const std::vector<double>& f);

struct Energies {
  double l2 = 0.0;    // lambda |u|_pi^2
  double bd = 0.0;    // B^d(u, u)
  double bj = 0.0;    // eps^{2-alpha} B^j(u, u)
  double rhs = 0.0;   // (f, u)_pi
  double relative_gap() const;
};
Energies energy_identity(const DiscreteGenerator& gen, double lambda, const std::vector<double>& u,
                         const std::vector<double>& f);

struct EffectiveA {
  double euler_lagrange = 0.0;
  double variational = 0.0;
  double harmonic_mean = 0.0;
  double lower_bound = 0.0;  // 1 / M_pi[exp(4V) / a]
  double upper_bound = 0.0;  // M_pi[a]
  std::size_t cg_iterations = 0;
  std::vector<double> dchi;  // minimizer gradient at midpoints
  double value() const { return euler_lagrange; }
};

/// Homogenized coefficient inf M_pi[a (1 + D phi)^2] over periodic phi.
EffectiveA effective_A(const Medium& medium, std::size_t n);

struct CorrectorSolution {
  double eps = 0.0;
  double lambda = 0.0;
  std::vector<double> u;
  std::vector<double> du;  // midpoints
  std::vector<double> xi;  // midpoints, from the variational minimizer
  double e2u2 = 0.0;       // eps^2 |u|_pi^2
  double grad_dev = 0.0;   // |Du - xi|_pi
  double bd = 0.0;
  double bj = 0.0;         // eps^{2-alpha} B^j(u, u)
  double jump_energy = 0.0;  // eps^{2-alpha} M int (T_z u - u)^2 c nu(dz)
  double A = 0.0;
};

/// Resolvent at lambda = eps^2 with f = b.
CorrectorSolution corrector_solve(const Medium& medium, const JumpKernel* kernel, double eps, std::size_t n);

/// Periodic linear interpolation of a midpoint gradient at position p.
double interpolate_midpoints(const std::vector<double>& values, double period, double p);

struct ErgodicLimitRow {
  double eps = 0.0;
  double lambda = 0.0;
  double deviation = 0.0;       // |lambda u - M_pi[f]|_pi
  double estimate_lhs = 0.0;    // lambda |Du|_pi^2 + lambda eps^{2-alpha}/2 M int (T_z u - u)^2 c nu
  double estimate_rhs = 0.0;    // |f|_pi^2
  double estimate_lhs_weighted = 0.0;  // same with a |Du|^2, the form bounded without constants
};

struct ErgodicLimitReport {
  std::vector<ErgodicLimitRow> rows;
  bool decreasing = false;
  bool estimate_holds = false;
  bool weighted_estimate_holds = false;
  double final_deviation = 0.0;
};

/// Solves eps u - L u = f over the eps list (lambda(eps) = eps).
ErgodicLimitReport resolvent_ergodic_limit(const Medium& medium, const JumpKernel* kernel, const FieldFunctional& f,
                                           const std::vector<double>& eps_list, std::size_t n);

}  // namespace levyhom
