#include "levyhom/sde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "levyhom/error.hpp"
#include "levyhom/rng.hpp"

namespace levyhom {

namespace {

constexpr std::size_t kTableNodes = 512;
constexpr double kMaxJumpRate = 1e3;

double wrap(double p, double period) {
  double r = std::fmod(p, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

}  // namespace

void SimConfig::validate() const {
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("sim: eps must lie in (0, 1]");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("sim: t_max must be positive");
  if (!(dt_macro > 0.0) || dt_macro > t_max) throw ConfigError("sim: dt_macro must lie in (0, t_max]");
  if (micro_step < 0.0 || !std::isfinite(micro_step)) throw ConfigError("sim: micro_step must be positive (or 0 for auto)");
  if (!(jump_floor >= 0.0 && jump_floor < 1.0)) throw ConfigError("sim: jump_floor must lie in (0, 1) (or 0 for auto)");
  if (!std::isfinite(x0)) throw ConfigError("sim: non-finite start");
}

Simulator::Simulator(std::shared_ptr<const MediumModel> model, std::optional<JumpKernel> kernel, SimConfig cfg,
                     std::vector<PathFunctional> functionals)
    : model_(std::move(model)), kernel_(std::move(kernel)), cfg_(cfg), functionals_(std::move(functionals)) {
  if (!model_) throw ConfigError("sim: null medium model");
  cfg_.validate();
  const double L = model_->period();

  const auto steps = static_cast<std::size_t>(std::llround(cfg_.t_max / cfg_.dt_macro));
  if (std::abs(steps * cfg_.dt_macro - cfg_.t_max) > 1e-9 * cfg_.t_max)
    throw ConfigError("sim: t_max must be a multiple of dt_macro");
  times_.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) times_[k] = cfg_.dt_macro * static_cast<double>(k);

  std::vector<FieldSample> nodes(kTableNodes);
  double max_b = 0.0, min_a = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kTableNodes; ++i) {
    nodes[i] = model_->at(L * static_cast<double>(i) / kTableNodes);
    max_b = std::max(max_b, std::abs(nodes[i].b));
    min_a = std::min(min_a, nodes[i].a);
  }
  h_ = cfg_.micro_step > 0.0 ? cfg_.micro_step : (max_b > 0.0 ? std::min(1e-2, 1e-3 * L / max_b) : 1e-2);

  drift_table_.assign(kTableNodes, 0.0);
  variance_table_.assign(kTableNodes, 0.0);
  if (!kernel_) return;

  const double alpha = kernel_->alpha();
  eps_factor_ = std::pow(cfg_.eps, 2.0 - alpha);
  const double delta_rate_floor = std::pow(eps_factor_ * (2.0 / alpha) / kMaxJumpRate, 1.0 / alpha);
  if (cfg_.jump_floor > 0.0) {
    delta_ = cfg_.jump_floor;
  } else {
    // Largest delta whose dropped variance is below 1e-4 of the Brownian rate,
    // limited so that the big-jump clock stays affordable.
    const auto worst = [&](double d) {
      double v = 0.0;
      for (std::size_t i = 0; i < kTableNodes; i += 8) v = std::max(v, kernel_->small_jump_variance(nodes[i], d));
      return eps_factor_ * v;
    };
    double lo = std::log(1e-8), hi = std::log(0.5);
    if (worst(std::exp(hi)) <= 1e-4 * min_a) {
      lo = hi;
    } else {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (worst(std::exp(mid)) <= 1e-4 * min_a) lo = mid; else hi = mid;
      }
    }
    delta_ = std::min(0.5, std::max(std::exp(lo), delta_rate_floor));
  }
  rate_ = eps_factor_ * (2.0 / alpha) * std::pow(delta_, -alpha);

  for (std::size_t i = 0; i < kTableNodes; ++i) {
    const double e = kernel_->drift_e(nodes[i]);
    const double band = kernel_->band_compensator(nodes[i], delta_);
    if (kernel_->odd() && (std::abs(e) > 1e-12 || std::abs(band) > 1e-12))
      throw NumericalError("sim: odd kernel with nonzero drift or band compensator");
    drift_table_[i] = e - band;
    if (cfg_.small_jump_policy == SmallJumpPolicy::gaussian_correction)
      variance_table_[i] = kernel_->small_jump_variance(nodes[i], delta_);
  }
}

double Simulator::table(const std::vector<double>& t, double p) const {
  const double x = p / model_->period() * kTableNodes;
  std::size_t i = static_cast<std::size_t>(x);
  const double frac = x - static_cast<double>(i);
  i %= kTableNodes;
  const std::size_t j = (i + 1) % kTableNodes;
  return t[i] + frac * (t[j] - t[i]);
}

double Simulator::residual_variance(const FieldSample& f) const {
  if (!kernel_) return 0.0;
  return eps_factor_ * kernel_->small_jump_variance(f, delta_);
}

PathSample Simulator::run(std::uint64_t index) const {
  return run(make_medium(model_, cfg_.seed, index, cfg_.start), index);
}

PathSample Simulator::run(const Medium& medium, std::uint64_t index) const {
  const double eps = cfg_.eps;
  const double eps2 = eps * eps;
  const double L = model_->period();
  const std::size_t grid = times_.size();
  const bool gaussian = kernel_ && cfg_.small_jump_policy == SmallJumpPolicy::gaussian_correction;
  const bool has_drift_table = kernel_ && !kernel_->odd();
  const double alpha = kernel_ ? kernel_->alpha() : 1.0;

  RandomStream rng(cfg_.seed, index, StreamPurpose::noise);
  PathSample out;
  out.index = index;
  out.phase = medium.phase();
  out.values.resize(grid);
  out.env.resize(grid);
  out.njumps.resize(grid);
  out.functionals.assign(functionals_.size(), std::vector<double>(grid, 0.0));

  double y = 0.0;                                      // displacement of Y
  double p = wrap(medium.phase() + cfg_.x0 / eps, L);  // environment coordinate
  FieldSample f = model_->at(p);
  std::vector<double> acc(functionals_.size(), 0.0);
  std::vector<double> f_now(functionals_.size());
  for (std::size_t j = 0; j < functionals_.size(); ++j) f_now[j] = functionals_[j].f(f);
  std::uint32_t count = 0;

  const auto record = [&](std::size_t k) {
    out.values[k] = cfg_.x0 + eps * y;
    out.env[k] = p;
    out.njumps[k] = count;
    for (std::size_t j = 0; j < acc.size(); ++j) out.functionals[j][k] = acc[j];
  };
  record(0);

  const double inf = std::numeric_limits<double>::infinity();
  double s = 0.0;
  double next_jump = rate_ > 0.0 ? rng.exponential() / rate_ : inf;
  for (std::size_t k = 1; k < grid; ++k) {
    const double s_grid = times_[k] / eps2;
    for (;;) {
      const bool jump_first = next_jump < s_grid;
      const double target = jump_first ? next_jump : s_grid;
      while (s < target) {
        double dt = target - s;
        if (dt > h_ * (1.0 + 1e-9)) dt = h_;
        double drift = f.b;
        double var = f.a;
        if (has_drift_table) drift += eps_factor_ * table(drift_table_, p);
        if (gaussian) var += eps_factor_ * table(variance_table_, p);
        const double move = drift * dt;
        if (std::abs(move) > 0.1 * L)
          throw NumericalError("sim: drift step exceeds 0.1 period at t = " + std::to_string(eps2 * s) +
                               " (micro step too coarse)");
        const double dy = move + std::sqrt(var * dt) * rng.normal();
        y += dy;
        p = wrap(p + dy, L);
        if (!std::isfinite(y)) throw NumericalError("sim: non-finite state at t = " + std::to_string(eps2 * s));
        f = model_->at(p);
        for (std::size_t j = 0; j < acc.size(); ++j) {
          const double v = functionals_[j].f(f);
          acc[j] += 0.5 * (f_now[j] + v) * dt * eps2;
          f_now[j] = v;
        }
        s = (dt == target - s) ? target : s + dt;
      }
      if (!jump_first) break;
      // Jump with the pre-jump environment.
      const double mark_abs = delta_ * std::pow(rng.uniform(), -1.0 / alpha);
      const double mark = rng.uniform() < 0.5 ? -mark_abs : mark_abs;
      const double g = kernel_->gamma(f, mark);
      if (!std::isfinite(g)) throw NumericalError("sim: non-finite jump at t = " + std::to_string(eps2 * s));
      if (cfg_.record_jumps) out.jumps.push_back({eps2 * s, mark, eps * g, p});
      y += g;
      p = wrap(p + g, L);
      f = model_->at(p);
      for (std::size_t j = 0; j < acc.size(); ++j) f_now[j] = functionals_[j].f(f);
      ++count;
      next_jump += rng.exponential() / rate_;
    }
    record(k);
  }
  return out;
}

EnsembleResult simulate_ensemble_serial(const Simulator& sim, std::size_t n_paths) {
  if (n_paths < 1) throw ConfigError("ensemble: n_paths must be >= 1");
  EnsembleResult out;
  out.times = sim.times();
  out.paths.resize(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) {
    try {
      out.paths[i] = sim.run(i);
    } catch (const std::exception& e) {
      throw NumericalError("path " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

EnsembleResult simulate_ensemble(const Simulator& sim, std::size_t n_paths, int workers) {
  if (n_paths < 1) throw ConfigError("ensemble: n_paths must be >= 1");
  EnsembleResult out;
  out.times = sim.times();
  out.paths.resize(n_paths);
  std::vector<std::string> errors(n_paths);
  const auto n = static_cast<std::int64_t>(n_paths);
  (void)workers;
#pragma omp parallel for schedule(dynamic, 16) num_threads(resolve_workers(workers))
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out.paths[i] = sim.run(static_cast<std::uint64_t>(i));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < n_paths; ++i)
    if (!errors[i].empty()) throw NumericalError("path " + std::to_string(i) + ": " + errors[i]);
  return out;
}

std::vector<double> environment_functional(const Medium& medium, const std::optional<JumpKernel>& kernel,
                                           const SimConfig& cfg, const FieldFunctional& f) {
  Simulator sim(medium.model_ptr(), kernel, cfg, {{"f", f}});
  return sim.run(medium, 0).functionals[0];
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LEVY_HOMOGENIZE_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace levyhom
