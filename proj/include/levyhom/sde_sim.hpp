#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "levyhom/jump_kernel.hpp"
#include "levyhom/medium.hpp"

namespace levyhom {

enum class SmallJumpPolicy { compensate_only, gaussian_correction };

struct SimConfig {
  double eps = 1.0;
  double t_max = 1.0;
  double dt_macro = 1.0 / 128.0;
  double micro_step = 0.0;  // 0: automatic
  double jump_floor = 0.0;  // 0: automatic
  SmallJumpPolicy small_jump_policy = SmallJumpPolicy::gaussian_correction;
  std::uint64_t seed = 1;
  double x0 = 0.0;
  PhaseLaw start = PhaseLaw::mu;
  bool record_jumps = false;

  void validate() const;
};

/// Accumulates int_0^t f(tau_{Xbar_r} omega) dr along a path.
struct PathFunctional {
  std::string name;
  FieldFunctional f;
};

struct JumpRecord {
  double t = 0.0;          // macroscopic time
  double mark = 0.0;       // y
  double amplitude = 0.0;  // eps * gamma(tau_{Xbar_-} omega, y)
  double env_before = 0.0;  // environment coordinate before the jump
};

struct PathSample {
  std::uint64_t index = 0;
  double phase = 0.0;
  std::vector<double> values;        // X at grid times
  std::vector<double> env;           // environment coordinate at grid times
  std::vector<std::uint32_t> njumps;  // cumulative jump count at grid times
  std::vector<std::vector<double>> functionals;  // [functional][grid]
  std::vector<JumpRecord> jumps;
};

/// Per-(medium model, kernel, config) simulator. Immutable; run() may be
/// called concurrently.
///
/// The microscopic process Y_s = Xbar_{eps^2 s} has drift b + eps^{2-alpha}e,
/// diffusion sqrt(a), and jumps gamma(., y) at mark intensity
/// eps^{2-alpha} |y|^{-1-alpha} dy; X_t = x0 + eps Y_{t / eps^2}.
class Simulator {
 public:
  Simulator(std::shared_ptr<const MediumModel> model, std::optional<JumpKernel> kernel, SimConfig cfg,
            std::vector<PathFunctional> functionals = {});

  /// Path with the given realization and the noise stream of `index`.
  PathSample run(const Medium& medium, std::uint64_t index) const;
  /// Path with a fresh realization drawn from the stream of `index`.
  PathSample run(std::uint64_t index) const;

  const SimConfig& config() const { return cfg_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<PathFunctional>& functionals() const { return functionals_; }
  const MediumModel& model() const { return *model_; }
  const std::optional<JumpKernel>& kernel() const { return kernel_; }
  double micro_step() const { return h_; }
  double jump_floor() const { return delta_; }
  /// Total rate of marks |y| >= delta per unit microscopic time.
  double jump_rate() const { return rate_; }
  /// eps^{2-alpha} int_{|y|<delta} gamma^2 nu(dy) at the given environment.
  double residual_variance(const FieldSample& f) const;

 private:
  double table(const std::vector<double>& t, double p) const;

  std::shared_ptr<const MediumModel> model_;
  std::optional<JumpKernel> kernel_;
  SimConfig cfg_;
  std::vector<PathFunctional> functionals_;
  std::vector<double> times_;
  double h_ = 0.0;
  double delta_ = 0.0;
  double rate_ = 0.0;
  double eps_factor_ = 0.0;  // eps^{2-alpha}
  // Periodic tables over the environment coordinate.
  std::vector<double> drift_table_;     // e - band compensator
  std::vector<double> variance_table_;  // small-jump variance (unscaled)
};

struct EnsembleResult {
  std::vector<double> times;
  std::vector<PathSample> paths;
};

/// Runs paths 0..n-1 in parallel. Results are stored by path index, so the
/// output does not depend on `workers`.
EnsembleResult simulate_ensemble(const Simulator& sim, std::size_t n_paths, int workers);
/// Serial reference implementation of simulate_ensemble.
EnsembleResult simulate_ensemble_serial(const Simulator& sim, std::size_t n_paths);

/// Single path of int_0^t f(tau_{Xbar} omega) dr on the macro grid.
std::vector<double> environment_functional(const Medium& medium, const std::optional<JumpKernel>& kernel,
                                           const SimConfig& cfg, const FieldFunctional& f);

/// Worker count from an explicit value, else LEVY_HOMOGENIZE_WORKERS, else
/// the OpenMP default.
int resolve_workers(int requested);

}  // namespace levyhom
