#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "levyhom/rng.hpp"

namespace levyhom {

class JumpKernel;

/// One term c cos(2 pi k x / L) + s sin(2 pi k x / L). k = 0 is the constant term.
struct Harmonic {
  int k = 1;
  double cos_coef = 0.0;
  double sin_coef = 0.0;
};

/// How the harmonic list `fourier_a` defines the diffusion coefficient a.
enum class ConductivityForm {
  exponential,  // a = exp(P): ellipticity holds by construction
  direct,       // a = P, P > 0 required
  reciprocal,   // a = 1 / P, P > 0 required
};

/// Randomly shifted L-periodic medium: V and a are trigonometric profiles,
/// the randomness is a single uniform phase.
struct MediumSpec {
  double period = 1.0;
  std::vector<Harmonic> fourier_V;
  std::vector<Harmonic> fourier_a;
  ConductivityForm a_form = ConductivityForm::exponential;
  bool normalize_V = true;

  /// Throws ConfigError when the spec is unusable.
  void validate() const;
  /// Bound M with 1/M <= a <= M. For the exponential form this is
  /// exp(sum of |coefficients|); otherwise a fine min/max scan.
  double ellipticity_constant() const;
};

/// Field values of the environment at one point.
struct FieldSample {
  double position = 0.0;  // environment coordinate in [0, L)
  double V = 0.0;
  double DV = 0.0;
  double a = 1.0;
  double Da = 0.0;
  double b = 0.0;  // 0.5 Da - a DV
};

/// Phase-independent part of a medium: the spec plus its normalization.
/// Immutable; safe to share between threads.
class MediumModel {
 public:
  explicit MediumModel(MediumSpec spec, std::size_t quadrature_nodes = std::size_t{1} << 14);

  const MediumSpec& spec() const { return spec_; }
  double period() const { return spec_.period; }
  /// Constant added to V so that the period average of exp(-2V) is one.
  double kappa() const { return kappa_; }

  /// Fields at environment coordinate p (any real; reduced mod L).
  FieldSample at(double p) const;
  double V(double p) const;
  double a(double p) const;

 private:
  struct Series {
    std::vector<Harmonic> terms;
    int max_k = 0;
  };

  MediumSpec spec_;
  Series v_series_;
  Series a_series_;
  double kappa_ = 0.0;
};

/// One realization omega: a shared model and a phase U in [0, L).
/// Evaluating at x means evaluating the environment tau_x omega, i.e. the
/// model at U + x.
class Medium {
 public:
  Medium(std::shared_ptr<const MediumModel> model, double phase);

  FieldSample eval(double x) const { return model_->at(x + phase_); }
  /// The shifted realization tau_y omega.
  Medium shifted(double y) const;

  double phase() const { return phase_; }
  double kappa() const { return model_->kappa(); }
  double period() const { return model_->period(); }
  const MediumModel& model() const { return *model_; }
  const std::shared_ptr<const MediumModel>& model_ptr() const { return model_; }

 private:
  std::shared_ptr<const MediumModel> model_;
  double phase_ = 0.0;
};

/// Law of the initial environment: uniform phase (mu) or density
/// proportional to exp(-2V) (pi).
enum class PhaseLaw { mu, pi };

/// Draws a phase; the pi law uses exact rejection sampling.
double sample_phase(const MediumModel& model, RandomStream& rng, PhaseLaw law);

Medium make_medium(const MediumSpec& spec, std::uint64_t seed);
Medium make_medium(std::shared_ptr<const MediumModel> model, std::uint64_t seed, std::uint64_t index = 0,
                   PhaseLaw law = PhaseLaw::mu);

enum class Measure { mu, pi };

using FieldFunctional = std::function<double(const FieldSample&)>;

/// Exact period average of f (trapezoid on `nodes` points). Under pi the
/// integrand is weighted by exp(-2V). Independent of any realization phase.
double average(const MediumModel& model, const FieldFunctional& f, Measure measure,
               std::size_t nodes = std::size_t{1} << 14);

/// One hypothesis entry of a validation report.
struct HypothesisCheck {
  std::string name;
  bool passed = false;
  std::map<std::string, double> measured;
  std::string note;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;

  bool all_passed() const;
  const HypothesisCheck* find(const std::string& name) const;
  std::string to_json() const;
};

/// Checks the structural hypotheses on a realization and (optionally) a
/// kernel. Failures are report entries, never exceptions.
ValidationReport validate_assumptions(const Medium& medium, const JumpKernel* kernel);

}  // namespace levyhom
