#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "levyhom/error.hpp"
#include "levyhom/limit_law.hpp"
#include "levyhom/stats.hpp"

using namespace levyhom;

TEST_CASE("stable constant against the closed form") {
  for (const double alpha : {0.2, 0.5, 0.9, 1.0, 1.3, 1.7, 1.95}) {
    const double ref = std::numbers::pi / (boost::math::tgamma(1 + alpha) * std::sin(std::numbers::pi * alpha / 2));
    CHECK(stable_constant(alpha) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("stable integral") {
  CHECK(stable_integral(1.0, 1.0) == doctest::Approx(-std::numbers::pi).epsilon(1e-10));
  CHECK(stable_integral(1.0, 0.0) == 0.0);
  for (const double alpha : {0.5, 1.0, 1.5})
    for (const double u : {0.3, 1.0, 2.5}) {
      CHECK(std::abs(stable_integral(alpha, 2 * u) - std::pow(2.0, alpha) * stable_integral(alpha, u)) < 1e-8);
      CHECK(stable_integral(alpha, -u) == stable_integral(alpha, u));
    }
}

TEST_CASE("levy exponent") {
  const LevyTriplet brownian{2.0, 0.0, 1.0};
  CHECK(exponent(brownian, 1.0).real() == doctest::Approx(-1.0));
  CHECK(exponent(brownian, 1.0).imag() == 0.0);
  const LevyTriplet mixed{0.5, 1.5, 1.2};
  for (const double u : {-2.0, 0.7}) {
    const double ref = -0.25 * u * u - 1.5 * stable_constant(1.2) * std::pow(std::abs(u), 1.2);
    CHECK(exponent(mixed, u).real() == doctest::Approx(ref).epsilon(1e-12));
  }
  const auto many = exponent(mixed, std::vector<double>{0.0, 1.0});
  CHECK(many[0] == std::complex<double>(0.0, 0.0));
  CHECK_THROWS_AS(exponent(LevyTriplet{-1.0, 0.0, 1.0}, 1.0), ConfigError);
}

TEST_CASE("limit sampler matches the exact laws") {
  const std::size_t n = 20000;
  // Pure jumps, alpha = 1: Cauchy with scale t theta_bar pi.
  const auto cauchy = sample_limit(LevyTriplet{0.0, 1.0, 1.0}, 1.0, n, 3);
  CHECK(stats::ks_test(cauchy, [](double x) { return 0.5 + std::atan(x / std::numbers::pi) / std::numbers::pi; })
            .p_value > 0.01);
  // Pure Brownian: N(0, A t).
  const auto normal = sample_limit(LevyTriplet{4.0, 0.0, 1.0}, 0.25, n, 4);
  CHECK(stats::ks_test(normal, stats::normal_cdf).p_value > 0.01);
  // Mixed: empirical characteristic function against exp(t phi).
  const LevyTriplet mixed{0.7, 0.8, 1.5};
  const auto xs = sample_limit(mixed, 1.0, n, 5);
  for (const double u : {0.5, 1.0, 2.0}) {
    double c = 0.0, c2 = 0.0;
    for (const double x : xs) {
      c += std::cos(u * x);
      c2 += std::cos(u * x) * std::cos(u * x);
    }
    c /= n;
    const double se = std::sqrt((c2 / n - c * c) / n);
    CHECK(std::abs(c - std::exp(exponent(mixed, u).real())) < 4 * se);
  }
}

TEST_CASE("characteristics triplet") {
  const LevyTriplet t{1.3, 0.7, 1.4};
  const auto r = triplet_report(t, 2.0);
  CHECK(r.drift == 0.0);
  CHECK(r.gaussian == doctest::Approx(2.6));
  CHECK(r.h2_closed_form == doctest::Approx(2 / 0.6 + 2 / 1.4));
  CHECK(r.h2_quadrature == doctest::Approx(r.h2_closed_form).epsilon(1e-10));
  CHECK(r.compensator_slope == doctest::Approx(1.3 + 0.7 * r.h2_closed_form));
}
