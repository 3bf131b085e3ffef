#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "levyhom/error.hpp"
#include "levyhom/rng.hpp"
#include "levyhom/verify.hpp"

using namespace levyhom;

namespace {

std::shared_ptr<const MediumModel> wavy() {
  MediumSpec s;
  s.fourier_V = {{1, 0.3, 0.0}};
  s.fourier_a = {{1, 0.25, 0.0}};
  return std::make_shared<const MediumModel>(s);
}

TrendRow row(double eps, double stat, double lo, double hi) {
  TrendRow r;
  r.eps = eps;
  r.statistic = stat;
  r.ci = {lo, hi};
  return r;
}

EnsembleSetup setup(std::shared_ptr<const MediumModel> m, std::optional<JumpKernel> k, std::size_t n) {
  EnsembleSetup s;
  s.model = std::move(m);
  s.kernel = std::move(k);
  s.sim.t_max = 1.0;
  s.sim.dt_macro = 1.0 / 64;
  s.sim.micro_step = 1e-2;
  s.sim.jump_floor = 0.05;
  s.sim.seed = 99;
  s.n_paths = n;
  s.grid = 256;
  return s;
}

}  // namespace

TEST_CASE("trend verdict") {
  CHECK(trend_verdict({row(0.1, 1.0, 0.9, 1.1), row(0.4, 3.0, 2.8, 3.2), row(0.2, 2.0, 1.9, 2.1)}).pass());
  const auto flat = trend_verdict({row(0.4, 3.0, 2.0, 4.0), row(0.1, 2.9, 2.0, 3.5)});
  CHECK(flat.monotone);
  CHECK_FALSE(flat.separated);
  CHECK_FALSE(trend_verdict({row(0.4, 1.0, 0.9, 1.1), row(0.2, 2.0, 1.9, 2.1), row(0.1, 0.5, 0.4, 0.6)}).monotone);
  CHECK_FALSE(trend_verdict({row(0.4, 1.0, 0.9, 1.1)}).pass());
}

TEST_CASE("ecf test on exact and shifted samples") {
  const LevyTriplet t{0.8, 0.5, 1.3};
  const auto xs = sample_limit(t, 1.0, 10000, 4);
  const auto u = default_u_grid();
  CHECK(u.size() == 25);
  const auto good = ecf_test(xs, t, 1.0, u, 1, 2);
  CHECK(good.pass);
  CHECK(good.sup_ci.lo <= good.sup_distance);
  CHECK(good.sup_ci.hi >= good.sup_distance);
  // u = 0 is exact.
  CHECK(good.ecf_re[12] == 1.0);
  CHECK(good.z[12] == 0.0);
  auto shifted = xs;
  for (auto& x : shifted) x += 0.3;
  CHECK_FALSE(ecf_test(shifted, t, 1.0, u, 1, 2).pass);
  CHECK_THROWS_AS(ecf_test(std::vector<double>(50, 0.0), t, 1.0, u, 1, 2), ConfigError);
}

TEST_CASE("modulus diagnostic on synthetic paths") {
  EnsembleResult e;
  const int grid = 256;
  for (int k = 0; k <= grid; ++k) e.times.push_back(double(k) / grid);
  PathSample line;
  line.functionals.push_back(e.times);
  e.paths.push_back(line);
  const auto r = modulus_diagnostic(e, 0, {0.25, 0.0625, 2.0});
  CHECK(r.rows[0].delta == 2.0);
  CHECK(r.rows[0].statistic == doctest::Approx(1.0));  // global sup
  CHECK(r.rows[1].statistic == doctest::Approx(0.25));
  CHECK(r.rows[2].statistic == doctest::Approx(0.0625));

  // Brownian paths: E sup_{|t-s|<=d} |W_t - W_s| ~ sqrt(2 d ln(1/d)), ratio varies slowly.
  EnsembleResult b;
  b.times = e.times;
  RandomStream rng(6, 0, StreamPurpose::test);
  for (int p = 0; p < 300; ++p) {
    PathSample s;
    std::vector<double> w{0.0};
    for (int k = 0; k < grid; ++k) w.push_back(w.back() + rng.normal() / std::sqrt(double(grid)));
    s.functionals.push_back(w);
    b.paths.push_back(s);
  }
  const auto rb = modulus_diagnostic(b, 0, {0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125});
  CHECK(rb.pass);
  CHECK(rb.spread < 3.0);
}

TEST_CASE("invariance of pi under the environment process") {
  // Euler's invariant law is O(h) off pi, so the step is kept small.
  auto s = setup(wavy(), std::nullopt, 3000);
  s.sim.micro_step = 1e-3;
  const auto rep = invariance_test(s, 0.4,
                                   {{"a", [](const FieldSample& f) { return f.a; }},
                                    {"w", [](const FieldSample& f) { return std::exp(-2 * f.V); }}},
                                   {0.25, 1.0});
  CHECK(rep.rows.size() == 4);
  CHECK(rep.pass);
}

TEST_CASE("jump functional input checks and drift vanishing") {
  auto m = wavy();
  const auto lin = JumpKernel::linear(m, 1.0, 1.0);
  CHECK_THROWS_AS(jump_functional_test(setup(m, lin, 10), [](double z) { return std::abs(z); }, 1.0, {0.5}),
                  ConfigError);
  CHECK_THROWS_AS(jump_functional_test(setup(m, std::nullopt, 10), [](double) { return 0.0; }, 1.0, {0.5}),
                  ConfigError);
  const auto ok = drift_vanishing_test(setup(m, lin, 20), {0.4, 0.1});
  CHECK(ok.applicable);
  CHECK(ok.pass);
  CHECK(ok.rows[1].g_sup < 1e-8);
  const auto asym = JumpKernel::tail_inverted(m, 1.0, ChiProfile{ChiType::one_plus_shifted_gauss, 0.5, 1.0, 0.7}, 1.0);
  const auto bad = drift_vanishing_test(setup(m, asym, 20), {0.4});
  CHECK_FALSE(bad.applicable);
  CHECK_FALSE(bad.pass);
  CHECK(bad.rows[0].g_sup > 1e-3);
}

TEST_CASE("nonlocal energy of a Fourier mode") {
  // Average over p of (sin(2 pi (p + y)) - sin(2 pi p))^2 is 1 - cos(2 pi y); the nu-integral
  // is sigma_alpha (2 pi)^alpha.
  auto flat = std::make_shared<const MediumModel>(MediumSpec{});
  for (const double alpha : {0.7, 1.0, 1.5}) {
    const auto k = JumpKernel::linear(flat, 1.0, alpha);
    const double sigma = std::numbers::pi / (std::tgamma(1 + alpha) * std::sin(std::numbers::pi * alpha / 2));
    const double e = nonlocal_energy(*flat, k, [](double p) { return std::sin(2 * std::numbers::pi * p); });
    CHECK(e == doctest::Approx(sigma * std::pow(2 * std::numbers::pi, alpha)).epsilon(1e-4));
  }
}

TEST_CASE("compensated jump martingale") {
  auto m = wavy();
  const auto rep = jump_martingale_test(setup(m, JumpKernel::linear(m, 1.0, 1.0), 2000), 0.5,
                                        [](double p) { return std::cos(2 * std::numbers::pi * p); });
  CHECK(rep.mean_zero);
  CHECK(rep.bound_holds);
  CHECK(rep.second_moment > 0.0);
  // Doob's factor: the second moment sits near a quarter of the bound.
  CHECK(rep.second_moment < 0.5 * rep.bound);
}
