#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "doctest.h"
#include "levyhom/config.hpp"
#include "levyhom/error.hpp"
#include "levyhom/jump_kernel.hpp"
#include "levyhom/medium.hpp"
#include "levyhom/rng.hpp"
#include "levyhom/stats.hpp"

using namespace levyhom;

namespace {

MediumSpec wavy() {
  MediumSpec s;
  s.period = 1.0;
  s.fourier_V = {{1, 0.3, 0.0}};
  s.fourier_a = {{1, 0.2, 0.1}, {2, 0.05, 0.0}};
  return s;
}

}  // namespace

TEST_CASE("normalization constant matches the Bessel oracle") {
  // M[exp(-0.6 cos)] = I_0(0.6).
  const MediumModel m(wavy());
  CHECK(m.kappa() == doctest::Approx(0.5 * std::log(boost::math::cyl_bessel_i(0, 0.6))).epsilon(1e-13));
  CHECK(average(m, [](const FieldSample& f) { return std::exp(-2.0 * f.V); }, Measure::mu) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("constant potential normalizes to zero") {
  MediumSpec s;
  s.fourier_V = {{0, 0.5, 0.0}};
  const MediumModel m(s);
  for (const double p : {0.0, 0.3, 0.9}) {
    CHECK(std::abs(m.V(p)) < 1e-14);
    CHECK(m.at(p).b == 0.0);
  }
}

TEST_CASE("fields and derivatives") {
  const MediumModel m(wavy());
  const double h = 1e-6;
  for (const double p : {0.05, 0.37, 0.81, 1.6, -0.2}) {
    const auto f = m.at(p);
    CHECK(f.DV == doctest::Approx((m.V(p + h) - m.V(p - h)) / (2 * h)).epsilon(1e-7));
    CHECK(f.Da == doctest::Approx((m.a(p + h) - m.a(p - h)) / (2 * h)).epsilon(1e-7));
    CHECK(f.b == doctest::Approx(0.5 * f.Da - f.a * f.DV).epsilon(1e-14));
    CHECK(f.a == doctest::Approx(std::exp(0.2 * std::cos(2 * std::numbers::pi * p) +
                                          0.1 * std::sin(2 * std::numbers::pi * p) +
                                          0.05 * std::cos(4 * std::numbers::pi * p))));
  }
  // Periodicity.
  CHECK(m.V(0.3) == doctest::Approx(m.V(3.3)).epsilon(1e-13));
}

TEST_CASE("direct and reciprocal conductivity forms") {
  MediumSpec s;
  s.fourier_a = {{0, 1.0, 0.0}, {1, 0.5, 0.0}};
  s.a_form = ConductivityForm::direct;
  CHECK(MediumModel(s).a(0.0) == doctest::Approx(1.5));
  s.a_form = ConductivityForm::reciprocal;
  CHECK(MediumModel(s).a(0.0) == doctest::Approx(1.0 / 1.5));
  s.fourier_a = {{0, 0.2, 0.0}, {1, 0.5, 0.0}};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("pi-distributed phase follows exp(-2V)") {
  auto model = std::make_shared<const MediumModel>(wavy());
  RandomStream r(5, 0, StreamPurpose::test);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = sample_phase(*model, r, PhaseLaw::pi);
  // CDF by cumulative trapezoid.
  const int n = 4096;
  std::vector<double> cdf(n + 1, 0.0);
  for (int i = 0; i < n; ++i)
    cdf[i + 1] = cdf[i] + 0.5 * (std::exp(-2 * model->V(double(i) / n)) + std::exp(-2 * model->V(double(i + 1) / n))) / n;
  const auto F = [&](double x) {
    const double s = x * n;
    const int i = std::min(n - 1, static_cast<int>(s));
    return (cdf[i] + (s - i) * (cdf[i + 1] - cdf[i])) / cdf[n];
  };
  CHECK(stats::ks_test(xs, F).p_value > 0.01);
  // The uniform law is rejected.
  CHECK(stats::ks_test(xs, [](double x) { return x; }).p_value < 1e-6);
}

TEST_CASE("averages under mu and pi") {
  const MediumModel m(wavy());
  CHECK(average(m, [](const FieldSample& f) { return std::exp(2 * f.V); }, Measure::pi) ==
        doctest::Approx(1.0).epsilon(1e-13));
  // int b e^{-2V} = 0 (divergence form) so M_pi[b] = 0.
  CHECK(std::abs(average(m, [](const FieldSample& f) { return f.b; }, Measure::pi)) < 1e-13);
}

TEST_CASE("realizations are shifts of one profile") {
  auto model = std::make_shared<const MediumModel>(wavy());
  const Medium w(model, 0.25);
  CHECK(w.eval(0.1).V == model->V(0.35));
  CHECK(w.shifted(0.1).eval(0.0).V == doctest::Approx(model->V(0.35)));
  const Medium a = make_medium(model, 11, 3), b = make_medium(model, 11, 3), c = make_medium(model, 11, 4);
  CHECK(a.phase() == b.phase());
  CHECK(a.phase() != c.phase());
  CHECK(a.phase() >= 0.0);
  CHECK(a.phase() < 1.0);
}

TEST_CASE("validation report") {
  auto flat = std::make_shared<const MediumModel>(MediumSpec{});
  const auto plain = validate_assumptions(Medium(flat, 0.0), nullptr);
  CHECK(plain.all_passed());
  CHECK(plain.find("ellipticity_a") != nullptr);

  auto model = std::make_shared<const MediumModel>(wavy());
  const auto lin = JumpKernel::linear(model, 1.0, 1.0);
  const auto ok = validate_assumptions(Medium(model, 0.1), &lin);
  CHECK(ok.all_passed());
  CHECK(ok.find("small_jump_bound")->passed);

  ChiProfile shifted{ChiType::one_plus_shifted_gauss, 0.5, 1.0, 0.7};
  const auto asym = JumpKernel::tail_inverted(model, 1.0, shifted, 1.0);
  const auto r1 = validate_assumptions(Medium(model, 0.1), &asym);
  CHECK_FALSE(r1.find("kernel_symmetry")->passed);
  CHECK_FALSE(r1.all_passed());

  ChiProfile wave{ChiType::one_plus_cos, 0.5, 1.0, 0.0};
  const auto osc = JumpKernel::tail_inverted(model, 1.0, wave, 1.0);
  const auto r2 = validate_assumptions(Medium(model, 0.1), &osc);
  CHECK(r2.find("kernel_symmetry")->passed);
  CHECK_FALSE(r2.find("limiting_kernel_l1")->passed);

  MediumSpec raw = wavy();
  raw.normalize_V = false;
  auto unnormalized = std::make_shared<const MediumModel>(raw);
  CHECK_FALSE(validate_assumptions(Medium(unnormalized, 0.0), nullptr).find("normalization")->passed);

  const auto json = ok.to_json();
  CHECK(json.find("\"all_passed\": true") != std::string::npos);
}

TEST_CASE("medium spec json round trip") {
  const MediumSpec s = wavy();
  const MediumSpec back = parse_medium_spec(to_json(s));
  CHECK(back.period == s.period);
  REQUIRE(back.fourier_a.size() == 2);
  CHECK(back.fourier_a[1].k == 2);
  CHECK(back.fourier_a[0].sin_coef == 0.1);
  CHECK(back.a_form == ConductivityForm::exponential);
  CHECK_THROWS_AS(parse_medium_spec(R"({"period": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_medium_spec(R"({"fourier_V": [[1, 0.2]]})"), ConfigError);
}
