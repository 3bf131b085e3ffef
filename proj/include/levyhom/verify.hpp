#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levyhom/corrector.hpp"
#include "levyhom/jump_kernel.hpp"
#include "levyhom/limit_law.hpp"
#include "levyhom/sde_sim.hpp"
#include "levyhom/stats.hpp"

namespace levyhom {

/// Shared inputs of the ensemble-based tests.
struct EnsembleSetup {
  std::shared_ptr<const MediumModel> model;
  std::optional<JumpKernel> kernel;
  SimConfig sim;  // eps and start law are overridden per test
  std::size_t n_paths = 1000;
  int workers = 0;
  std::size_t grid = 1024;  // corrector grid
};

struct TrendRow {
  double eps = 0.0;
  double statistic = 0.0;
  double std_error = 0.0;
  stats::Interval ci;
};

struct TrendVerdict {
  bool monotone = false;   // point estimates strictly decrease with eps
  bool separated = false;  // CI at the largest eps lies above the CI at the smallest
  bool pass() const { return monotone && separated; }
};
TrendVerdict trend_verdict(std::vector<TrendRow> rows);

// ------------------------------------------------------------------- ECF

struct EcfReport {
  double eps = 0.0;
  double t = 0.0;
  std::size_t n = 0;
  std::vector<double> u;
  std::vector<double> ecf_re, ecf_im, se_re, se_im;
  std::vector<double> theory;  // exp(t phi(u)), real
  std::vector<double> z;       // max of the real and imaginary z-scores
  double sup_distance = 0.0;
  stats::Interval sup_ci;
  std::size_t exceed = 0;  // points with |z| > 3
  bool pass = false;       // at most 5% of points exceed
};

/// u in [-3, 3] with step 0.25.
std::vector<double> default_u_grid();

/// ECF of `increments` against exp(t phi). The bootstrap CI of the sup
/// distance uses `seed` and `stream`.
EcfReport ecf_test(std::span<const double> increments, const LevyTriplet& triplet, double t,
                   const std::vector<double>& u, std::uint64_t seed, std::uint64_t stream = 0, double eps = 0.0);

struct EcfSweep {
  LevyTriplet triplet;
  std::vector<EcfReport> reports;
  std::vector<TrendRow> rows;
  TrendVerdict trend;
};

/// Simulates X^eps_t for each eps (initial phase from setup.sim.start) and
/// compares with the limit law built from effective_A and theta_bar.
EcfSweep ecf_sweep(const EnsembleSetup& setup, const std::vector<double>& eps_list, double t,
                   const std::vector<double>& u);

// --------------------------------------------------------------- ergodic

struct ErgodicReport {
  double T = 0.0;
  double target = 0.0;  // M_pi[f]
  std::vector<TrendRow> rows;
  TrendVerdict trend;
  double final_statistic = 0.0;
};

/// sup_t |int_0^t f_eps(tau_Xbar omega) dr - t M_pi[f]| averaged over a
/// pi-started ensemble, per eps.
ErgodicReport ergodic_test(const EnsembleSetup& setup, const std::function<FieldFunctional(double)>& family,
                           const FieldFunctional& limit, double T, const std::vector<double>& eps_list);

// --------------------------------------------------------- jump functional

struct JumpFunctionalReport {
  double t = 0.0;
  double limit = 0.0;  // t theta_bar int g d nu
  std::vector<double> means;  // ensemble mean of the functional per eps
  std::vector<TrendRow> rows;  // mean |functional - limit|
  TrendVerdict trend;
};

/// int_0^t int g(eps gamma(tau_Xbar omega, z/eps)) nu(dz) dr, evaluated through
/// the integrand exp(2V) int g(z) c(z/eps) nu(dz). g must satisfy
/// |g(z)| <= min(1, z^2).
JumpFunctionalReport jump_functional_test(const EnsembleSetup& setup, const std::function<double(double)>& g,
                                          double t, const std::vector<double>& eps_list);

// ------------------------------------------------------------- compensator

struct CompensatorRow {
  double eps = 0.0;
  double slope = 0.0;  // ensemble mean of <M>_t / t
  double std_error = 0.0;
  double relative_deviation = 0.0;
};

struct CompensatorReport {
  double t = 0.0;
  double A = 0.0;
  double target = 0.0;  // A + theta_bar int h^2 d nu
  std::vector<CompensatorRow> rows;
  bool decreasing = false;
  double final_relative_deviation = 0.0;
};

/// <M>_t = int (1 + Du^eps)^2 a dr + int int h^2(eps gamma) nu(dz) dr along
/// pi-started paths, with u^eps the corrector at each eps.
CompensatorReport compensator_test(const EnsembleSetup& setup, double t, const std::vector<double>& eps_list);

// ------------------------------------------------------------ drift vanishing

struct DriftVanishingRow {
  double eps = 0.0;
  double g_sup = 0.0;     // sup_omega |g_eps|
  double path_sup = 0.0;  // ensemble mean of sup_t |int_0^t g_eps dr|
};

struct DriftVanishingReport {
  bool applicable = true;  // false for kernels outside the conforming class
  std::vector<DriftVanishingRow> rows;
  bool pass = false;
};

DriftVanishingReport drift_vanishing_test(const EnsembleSetup& setup, const std::vector<double>& eps_list);

// ------------------------------------------------------------------ modulus

struct ModulusRow {
  double delta = 0.0;
  double statistic = 0.0;
  double std_error = 0.0;
  double ratio = 0.0;  // statistic / (delta^{1/2} ln(1/delta))
};

struct ModulusReport {
  double eps = 0.0;
  std::vector<ModulusRow> rows;
  double fitted_C = 0.0;  // largest ratio
  double spread = 0.0;    // largest ratio / smallest ratio
  bool pass = false;      // spread <= 3
};

/// Mean over paths of sup_{|t-s|<=delta} |F_t - F_s| for the recorded
/// functional F (grid resolution).
ModulusReport modulus_diagnostic(const EnsembleResult& ensemble, std::size_t functional, std::vector<double> deltas);
/// Runs a pi-started ensemble recording (1/eps) int b dr.
ModulusReport modulus_test(const EnsembleSetup& setup, double eps, const std::vector<double>& deltas);

// ---------------------------------------------------------------- invariance

struct InvarianceRow {
  std::string name;
  double eps = 0.0;
  double t = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double z = 0.0;
};

struct InvarianceReport {
  std::vector<InvarianceRow> rows;
  bool pass = false;  // all |z| < 3
};

/// Annealed E[f(tau_{Xbar_t} omega)] with a pi-distributed start against M_pi[f].
InvarianceReport invariance_test(const EnsembleSetup& setup, double eps, const std::vector<PathFunctional>& fs,
                                 const std::vector<double>& times);

// -------------------------------------------------------- jump martingale

struct MartingaleReport {
  double eps = 0.0;
  double T = 0.0;
  double second_moment = 0.0;
  double second_moment_se = 0.0;
  double bound = 0.0;       // 4 T eps^{-alpha} M[int (T_y phi - phi)^2 c nu(dy)]
  double max_abs_z = 0.0;   // largest |mean| / SE over grid times
  bool bound_holds = false;
  bool mean_zero = false;
};

/// Compensated sum of phi-increments over the simulated jumps of a
/// pi-started ensemble, with phi a function of the environment coordinate.
MartingaleReport jump_martingale_test(const EnsembleSetup& setup, double eps, const std::function<double(double)>& phi);

/// M[int (phi(p + y) - phi(p))^2 c(y) nu(dy)] for phi periodic in p.
double nonlocal_energy(const MediumModel& model, const JumpKernel& kernel, const std::function<double(double)>& phi);

}  // namespace levyhom
