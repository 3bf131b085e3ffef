#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "levyhom/error.hpp"
#include "levyhom/sde_sim.hpp"
#include "levyhom/stats.hpp"

using namespace levyhom;

namespace {

std::shared_ptr<const MediumModel> flat() { return std::make_shared<const MediumModel>(MediumSpec{}); }

std::shared_ptr<const MediumModel> wavy() {
  MediumSpec s;
  s.fourier_V = {{1, 0.3, 0.0}};
  s.fourier_a = {{1, 0.25, 0.0}};
  return std::make_shared<const MediumModel>(s);
}

SimConfig base(double eps) {
  SimConfig c;
  c.eps = eps;
  c.t_max = 1.0;
  c.dt_macro = 0.125;
  c.micro_step = 1e-2;
  c.jump_floor = 0.05;
  c.seed = 17;
  return c;
}

std::vector<double> endpoints(const EnsembleResult& e, double x0) {
  std::vector<double> out;
  for (const auto& p : e.paths) out.push_back(p.values.back() - x0);
  return out;
}

}  // namespace

TEST_CASE("pure Brownian case has the exact normal law") {
  SimConfig c = base(0.5);
  c.x0 = 0.3;
  const Simulator sim(flat(), std::nullopt, c);
  const auto ens = simulate_ensemble(sim, 4000, 0);
  const auto x = endpoints(ens, c.x0);
  const auto m = stats::mean_estimate(x);
  CHECK(std::abs(m.mean) < 3 * m.std_error);
  const double var = stats::variance(x);
  CHECK(std::abs(var - 1.0) < 3 * std::sqrt(2.0 / x.size()));
  CHECK(stats::ks_test(x, stats::normal_cdf).p_value > 0.01);
  CHECK(ens.paths[0].values.front() == c.x0);
}

TEST_CASE("jump count matches the Poisson rate") {
  const SimConfig c = base(0.5);
  const Simulator sim(flat(), JumpKernel::linear(flat(), 1.0, 1.0), c);
  const double expected_rate = c.t_max * std::pow(c.eps, -1.0) * 2.0 / std::pow(c.jump_floor, 1.0);
  CHECK(sim.jump_rate() == doctest::Approx(std::pow(c.eps, 1.0) * 2.0 / c.jump_floor));
  const auto ens = simulate_ensemble(sim, 400, 0);
  double total = 0.0;
  for (const auto& p : ens.paths) total += p.njumps.back();
  const double expected = expected_rate * 400;
  CHECK(std::abs(total - expected) < 3 * std::sqrt(expected));
}

TEST_CASE("symmetric driving terms give a centred law") {
  SimConfig c = base(1.0);
  const Simulator sim(flat(), JumpKernel::linear(flat(), 1.0, 1.0), c);
  const auto x = endpoints(simulate_ensemble(sim, 4000, 0), 0.0);
  // Cauchy-type tails: test the sign balance instead of the mean.
  double pos = 0;
  for (const double v : x) pos += v > 0;
  CHECK(std::abs(pos - 2000) < 3 * std::sqrt(1000.0));
  std::vector<double> clipped;
  for (const double v : x) clipped.push_back(std::max(-3.0, std::min(3.0, v)));
  const auto m = stats::mean_estimate(clipped);
  CHECK(std::abs(m.mean) < 3 * m.std_error);
}

TEST_CASE("jump records carry the pre-jump amplitude") {
  auto m = wavy();
  SimConfig c = base(0.5);
  c.record_jumps = true;
  const JumpKernel k = JumpKernel::linear(m, 1.0, 1.0);
  const Simulator sim(m, k, c);
  const auto p = sim.run(3);
  REQUIRE(p.jumps.size() > 5);
  for (const auto& j : p.jumps) {
    CHECK(std::abs(j.mark) >= c.jump_floor);
    CHECK(j.amplitude == doctest::Approx(c.eps * k.gamma(m->at(j.env_before), j.mark)).epsilon(1e-12));
    CHECK(j.t >= 0.0);
    CHECK(j.t <= c.t_max);
  }
  for (std::size_t i = 1; i < p.jumps.size(); ++i) CHECK(p.jumps[i].t >= p.jumps[i - 1].t);
}

TEST_CASE("constant functional integrates exactly") {
  auto m = wavy();
  const Simulator sim(m, JumpKernel::linear(m, 1.0, 1.0), base(0.3), {{"two", [](const FieldSample&) { return 2.0; }}});
  const auto p = sim.run(0);
  for (std::size_t k = 0; k < sim.times().size(); ++k)
    CHECK(p.functionals[0][k] == doctest::Approx(2.0 * sim.times()[k]).epsilon(1e-12));
  const auto series = environment_functional(Medium(m, 0.2), std::nullopt, base(0.3),
                                             [](const FieldSample&) { return 1.5; });
  CHECK(series.back() == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("residual small-jump variance") {
  auto m = wavy();
  const auto k = JumpKernel::linear(m, 1.0, 1.2);
  const SimConfig c = base(0.25);
  const Simulator sim(m, k, c);
  const auto f = m->at(0.3);
  const double s = std::exp(2 * f.V / 1.2);
  const double ref = std::pow(0.25, 0.8) * 2 * s * s * std::pow(0.05, 0.8) / 0.8;
  CHECK(sim.residual_variance(f) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("determinism across worker counts and the serial reference") {
  auto m = wavy();
  SimConfig c = base(0.3);
  c.start = PhaseLaw::pi;
  const Simulator sim(m, JumpKernel::linear(m, 1.0, 1.0), c, {{"b", [](const FieldSample& f) { return f.b; }}});
  const auto serial = simulate_ensemble_serial(sim, 24);
  const auto one = simulate_ensemble(sim, 24, 1);
  const auto three = simulate_ensemble(sim, 24, 3);
  for (std::size_t i = 0; i < 24; ++i) {
    CHECK(serial.paths[i].values == one.paths[i].values);
    CHECK(serial.paths[i].values == three.paths[i].values);
    CHECK(serial.paths[i].functionals == three.paths[i].functionals);
    CHECK(serial.paths[i].env == three.paths[i].env);
  }
  // One path reproduces the derived stream of index 0.
  const auto single = simulate_ensemble(sim, 1, 2);
  CHECK(single.paths[0].values == sim.run(0).values);
}

TEST_CASE("automatic micro step and jump floor") {
  auto m = wavy();
  SimConfig c = base(0.5);
  c.micro_step = 0.0;
  c.jump_floor = 0.0;
  const Simulator sim(m, JumpKernel::linear(m, 1.0, 1.0), c);
  CHECK(sim.micro_step() > 0.0);
  CHECK(sim.micro_step() <= 1e-2);
  CHECK(sim.jump_floor() > 0.0);
  CHECK(sim.jump_floor() < 1.0);
  CHECK(sim.jump_rate() <= 1e3 * (1 + 1e-12));
}

TEST_CASE("coarse steps and bad configs are rejected") {
  MediumSpec s;
  s.fourier_V = {{1, 3.0, 0.0}};
  auto steep = std::make_shared<const MediumModel>(s);
  SimConfig c = base(0.5);
  c.micro_step = 0.5;
  const Simulator sim(steep, std::nullopt, c);
  CHECK_THROWS_AS(simulate_ensemble(sim, 4, 1), NumericalError);

  SimConfig bad = base(0.5);
  bad.eps = 1.5;
  CHECK_THROWS_AS(Simulator(flat(), std::nullopt, bad), ConfigError);
  bad = base(0.5);
  bad.dt_macro = 0.3;
  CHECK_THROWS_AS(Simulator(flat(), std::nullopt, bad), ConfigError);
  CHECK_THROWS_AS(simulate_ensemble(Simulator(flat(), std::nullopt, base(0.5)), 0, 1), ConfigError);
}

TEST_CASE("worker resolution") {
  CHECK(resolve_workers(3) == 3);
  CHECK(resolve_workers(0) >= 1);
}
