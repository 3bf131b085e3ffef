#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "doctest.h"
#include "levyhom/corrector.hpp"
#include "levyhom/error.hpp"
#include "levyhom/rng.hpp"

using namespace levyhom;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::shared_ptr<const MediumModel> wavy() {
  MediumSpec s;
  s.fourier_V = {{1, 0.3, 0.1}};
  s.fourier_a = {{1, 0.25, 0.0}, {2, 0.1, 0.05}};
  return std::make_shared<const MediumModel>(s);
}

std::shared_ptr<const MediumModel> direct_a(double amp) {
  MediumSpec s;
  s.fourier_a = {{0, 1.0, 0.0}, {1, amp, 0.0}};
  s.a_form = ConductivityForm::direct;
  return std::make_shared<const MediumModel>(s);
}

std::vector<double> random_vector(RandomStream& r, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = r.normal();
  return v;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("generator annihilates constants and is pi-symmetric") {
  auto m = wavy();
  const auto k = JumpKernel::linear(m, 1.0, 1.0);
  const auto ti = JumpKernel::tail_inverted(m, 1.0, ChiProfile{ChiType::one_plus_gauss, 0.5, 0.5, 0.0}, 1.4);
  RandomStream r(21, 0, StreamPurpose::test);
  for (const JumpKernel* kernel : {static_cast<const JumpKernel*>(nullptr), &k, &ti}) {
    const auto gen = DiscreteGenerator::assemble(Medium(m, 0.3), kernel, 0.3, 256);
    CHECK(max_abs(gen.row_sums()) < 1e-10);
    for (int t = 0; t < 20; ++t) {
      const auto phi = random_vector(r, 256), psi = random_vector(r, 256);
      const double lhs = gen.inner_pi(gen.apply(phi), psi), rhs = gen.inner_pi(phi, gen.apply(psi));
      CHECK(std::abs(lhs - rhs) < 1e-8 * std::abs(lhs) + 1e-12);
      // Dissipativity.
      CHECK(gen.inner_pi(gen.apply(phi), phi) < 0.0);
    }
  }
}

TEST_CASE("generator on a Fourier mode") {
  auto flat = std::make_shared<const MediumModel>(MediumSpec{});
  const std::size_t n = 512;
  for (const double alpha : {0.6, 1.0, 1.5}) {
    const auto k = JumpKernel::linear(flat, 1.0, alpha);
    const double eps = 0.5;
    const auto gen = DiscreteGenerator::assemble(Medium(flat, 0.0), &k, eps, n);
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = std::cos(two_pi * gen.node(i));
    const auto lphi = gen.apply(phi);
    // Continuum symbol: -1/2 (2 pi)^2 - eps^{2-alpha} sigma_alpha (2 pi)^alpha, sigma_alpha = pi / (Gamma(1 + alpha) sin(pi alpha / 2)).
    const double h = gen.step();
    const double diffusive = -(1.0 - std::cos(two_pi * h)) / (h * h);
    const double sigma = std::numbers::pi / (std::tgamma(1 + alpha) * std::sin(std::numbers::pi * alpha / 2));
    const double symbol = diffusive - std::pow(eps, 2 - alpha) * sigma * std::pow(two_pi, alpha);
    for (std::size_t i = 0; i < n; i += 37) CHECK(lphi[i] == doctest::Approx(symbol * phi[i]).epsilon(5e-3).scale(1.0));
  }
}

TEST_CASE("resolvent solve: energy identity, contraction, mean") {
  auto m = wavy();
  const auto k = JumpKernel::linear(m, 1.0, 1.2);
  RandomStream r(22, 0, StreamPurpose::test);
  for (const JumpKernel* kernel : {static_cast<const JumpKernel*>(nullptr), &k}) {
    const auto gen = DiscreteGenerator::assemble(Medium(m, 0.0), kernel, 0.2, 256);
    for (int t = 0; t < 5; ++t) {
      const auto f = random_vector(r, 256);
      const double lambda = 0.04;
      const auto s = solve_resolvent(gen, lambda, f);
      CHECK(s.relative_residual < 1e-10);
      CHECK(s.contraction);
      CHECK(s.mean_lambda_u == doctest::Approx(s.mean_f).epsilon(1e-9).scale(1.0));
      CHECK(energy_identity(gen, lambda, s.u, f).relative_gap() < 1e-8);
    }
  }
}

TEST_CASE("effective coefficient oracles") {
  // a = 1 + 0.5 cos, V = 0: harmonic mean 1 / M[1/a] = sqrt(1 - 0.25).
  const auto A1 = effective_A(Medium(direct_a(0.5), 0.0), 4096);
  CHECK(A1.value() == doctest::Approx(std::sqrt(0.75)).epsilon(1e-6));
  CHECK(A1.variational == doctest::Approx(A1.euler_lagrange).epsilon(1e-8));
  CHECK(A1.harmonic_mean == doctest::Approx(A1.euler_lagrange).epsilon(1e-8));
  CHECK(A1.lower_bound <= A1.value() * (1 + 1e-8));
  CHECK(A1.value() <= A1.upper_bound);

  // a = 1, V = 0.3 cos: A = 1 / (M[e^{2V}] M[e^{-2V}]) = 1 / I_0(0.6)^2.
  MediumSpec s;
  s.fourier_V = {{1, 0.3, 0.0}};
  const auto A2 = effective_A(Medium(std::make_shared<const MediumModel>(s), 0.4), 1024);
  CHECK(A2.value() == doctest::Approx(1.0 / std::pow(boost::math::cyl_bessel_i(0, 0.6), 2)).epsilon(1e-9));

  // Constant medium.
  const auto A3 = effective_A(Medium(std::make_shared<const MediumModel>(MediumSpec{}), 0.0), 256);
  CHECK(A3.value() == doctest::Approx(1.0).epsilon(1e-12));

  // Bounds are strict for a non-constant coefficient.
  const auto A4 = effective_A(Medium(wavy(), 0.0), 1024);
  CHECK(A4.lower_bound <= A4.value() * (1 + 1e-8));
  CHECK(A4.value() < A4.upper_bound);
  CHECK(A4.variational == doctest::Approx(A4.value()).epsilon(1e-8));
}

TEST_CASE("corrector gradient approaches the variational minimizer") {
  auto m = wavy();
  double prev = 1e300;
  for (const double eps : {0.4, 0.2, 0.1, 0.05}) {
    const auto c = corrector_solve(Medium(m, 0.0), nullptr, eps, 512);
    CHECK(c.grad_dev < prev);
    prev = c.grad_dev;
    CHECK(c.e2u2 >= 0.0);
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("resolvent ergodic limit") {
  auto m = wavy();
  const auto k = JumpKernel::linear(m, 1.0, 1.0);
  const auto rep = resolvent_ergodic_limit(Medium(m, 0.0), &k, [](const FieldSample& f) { return f.a; },
                                           {0.2, 0.1, 0.05, 0.02}, 512);
  CHECK(rep.decreasing);
  CHECK(rep.weighted_estimate_holds);
  CHECK(rep.final_deviation < 1e-2);
}

TEST_CASE("midpoint interpolation is exact on periodic linear data") {
  std::vector<double> v(8);
  for (std::size_t i = 0; i < 8; ++i) v[i] = std::cos(two_pi * (i + 0.5) / 8);
  CHECK(interpolate_midpoints(v, 1.0, 0.5 / 8) == doctest::Approx(v[0]));
  CHECK(interpolate_midpoints(v, 1.0, 1.0 / 8) == doctest::Approx(0.5 * (v[0] + v[1])));
  CHECK(interpolate_midpoints(v, 1.0, 0.0) == doctest::Approx(0.5 * (v[7] + v[0])));
}

TEST_CASE("assembly rejects tiny grids") {
  auto m = wavy();
  CHECK_THROWS_AS(DiscreteGenerator::assemble(Medium(m, 0.0), nullptr, 0.1, 16), ConfigError);
}
