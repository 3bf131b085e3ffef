#include "levyhom/medium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "levyhom/error.hpp"
#include "levyhom/quadrature.hpp"

namespace levyhom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_series(const std::vector<Harmonic>& terms, const char* name) {
  for (const auto& h : terms) {
    if (h.k < 0) throw ConfigError(std::string(name) + ": harmonic index must be >= 0, got " + std::to_string(h.k));
    if (!std::isfinite(h.cos_coef) || !std::isfinite(h.sin_coef))
      throw ConfigError(std::string(name) + ": non-finite coefficient at harmonic " + std::to_string(h.k));
    if (h.k == 0 && h.sin_coef != 0.0)
      throw ConfigError(std::string(name) + ": the k = 0 term has no sine part");
  }
}

struct TrigValue {
  double value = 0.0;
  double slope = 0.0;  // derivative with respect to x
};

// cos(k theta), sin(k theta) for k = 0..max_k by the angle-addition recurrence.
struct Harmonics {
  static constexpr int kMax = 64;
  double c[kMax + 1];
  double s[kMax + 1];

  Harmonics(double theta, int max_k) {
    c[0] = 1.0;
    s[0] = 0.0;
    if (max_k == 0) return;
    c[1] = std::cos(theta);
    s[1] = std::sin(theta);
    for (int k = 2; k <= max_k; ++k) {
      c[k] = c[k - 1] * c[1] - s[k - 1] * s[1];
      s[k] = s[k - 1] * c[1] + c[k - 1] * s[1];
    }
  }
};

TrigValue eval_series(const std::vector<Harmonic>& terms, const Harmonics& hs, double wavenumber) {
  TrigValue out;
  for (const auto& h : terms) {
    out.value += h.cos_coef * hs.c[h.k] + h.sin_coef * hs.s[h.k];
    out.slope += wavenumber * h.k * (h.sin_coef * hs.c[h.k] - h.cos_coef * hs.s[h.k]);
  }
  return out;
}

int max_index(const std::vector<Harmonic>& terms) {
  int m = 0;
  for (const auto& h : terms) m = std::max(m, h.k);
  return m;
}

double reduce(double p, double period) {
  double r = std::fmod(p, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

}  // namespace

void MediumSpec::validate() const {
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("medium: period must be positive and finite");
  check_series(fourier_V, "fourier_V");
  check_series(fourier_a, "fourier_a");
  if (max_index(fourier_V) > Harmonics::kMax || max_index(fourier_a) > Harmonics::kMax)
    throw ConfigError("medium: harmonic index above " + std::to_string(Harmonics::kMax));
  if (a_form != ConductivityForm::exponential) {
    // P must stay positive; a scan catches violations of the profile.
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const double theta = kTwoPi * i / n;
      double p = 0.0;
      for (const auto& h : fourier_a) p += h.cos_coef * std::cos(h.k * theta) + h.sin_coef * std::sin(h.k * theta);
      if (!(p > 0.0)) throw ConfigError("medium: the a profile must be positive everywhere");
    }
  }
}

double MediumSpec::ellipticity_constant() const {
  if (a_form == ConductivityForm::exponential) {
    double sum = 0.0;
    for (const auto& h : fourier_a) sum += std::abs(h.cos_coef) + std::abs(h.sin_coef);
    return std::exp(sum);
  }
  MediumModel model(*this, 16);
  double lo = INFINITY, hi = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double a = model.a(period * i / n);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return std::max(hi, 1.0 / lo);
}

MediumModel::MediumModel(MediumSpec spec, std::size_t quadrature_nodes) : spec_(std::move(spec)) {
  spec_.validate();
  v_series_ = {spec_.fourier_V, max_index(spec_.fourier_V)};
  a_series_ = {spec_.fourier_a, max_index(spec_.fourier_a)};
  if (spec_.normalize_V) {
    const double avg = quad::periodic_mean([this](double p) { return std::exp(-2.0 * V(p)); }, spec_.period,
                                           quadrature_nodes);
    kappa_ = 0.5 * std::log(avg);
  }
}

double MediumModel::V(double p) const {
  const double theta = kTwoPi * reduce(p, spec_.period) / spec_.period;
  const Harmonics hs(theta, v_series_.max_k);
  return kappa_ + eval_series(v_series_.terms, hs, 0.0).value;
}

double MediumModel::a(double p) const { return at(p).a; }

FieldSample MediumModel::at(double p) const {
  FieldSample f;
  f.position = reduce(p, spec_.period);
  const double theta = kTwoPi * f.position / spec_.period;
  const double wavenumber = kTwoPi / spec_.period;
  const Harmonics hs(theta, std::max(v_series_.max_k, a_series_.max_k));

  const TrigValue v = eval_series(v_series_.terms, hs, wavenumber);
  f.V = kappa_ + v.value;
  f.DV = v.slope;

  const TrigValue q = eval_series(a_series_.terms, hs, wavenumber);
  switch (spec_.a_form) {
    case ConductivityForm::exponential:
      f.a = std::exp(q.value);
      f.Da = f.a * q.slope;
      break;
    case ConductivityForm::direct:
      f.a = q.value;
      f.Da = q.slope;
      break;
    case ConductivityForm::reciprocal:
      f.a = 1.0 / q.value;
      f.Da = -q.slope / (q.value * q.value);
      break;
  }
  f.b = 0.5 * f.Da - f.a * f.DV;
  return f;
}

Medium::Medium(std::shared_ptr<const MediumModel> model, double phase) : model_(std::move(model)) {
  if (!model_) throw ConfigError("medium: null model");
  phase_ = reduce(phase, model_->period());
}

Medium Medium::shifted(double y) const { return Medium(model_, phase_ + y); }

double sample_phase(const MediumModel& model, RandomStream& rng, PhaseLaw law) {
  const double L = model.period();
  if (law == PhaseLaw::mu) return L * rng.uniform();
  // Envelope: exp(-2V) <= exp(-2 (kappa - sum |coef|)).
  double amplitude = 0.0;
  for (const auto& h : model.spec().fourier_V)
    if (h.k > 0) amplitude += std::abs(h.cos_coef) + std::abs(h.sin_coef);
  double v0 = model.kappa();
  for (const auto& h : model.spec().fourier_V)
    if (h.k == 0) v0 += h.cos_coef;
  const double log_envelope = -2.0 * (v0 - amplitude);
  for (;;) {
    const double p = L * rng.uniform();
    if (std::log(rng.uniform()) <= -2.0 * model.V(p) - log_envelope) return p;
  }
}

Medium make_medium(const MediumSpec& spec, std::uint64_t seed) {
  return make_medium(std::make_shared<const MediumModel>(spec), seed);
}

Medium make_medium(std::shared_ptr<const MediumModel> model, std::uint64_t seed, std::uint64_t index, PhaseLaw law) {
  RandomStream rng(seed, index, StreamPurpose::medium);
  const double phase = sample_phase(*model, rng, law);
  return Medium(std::move(model), phase);
}

double average(const MediumModel& model, const FieldFunctional& f, Measure measure, std::size_t nodes) {
  const double L = model.period();
  const double h = L / static_cast<double>(nodes);
  double sum = 0.0, weight = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = h * static_cast<double>(i);
    const FieldSample s = model.at(x);
    const double w = measure == Measure::pi ? std::exp(-2.0 * s.V) : 1.0;
    const double v = w * f(s);
    if (!std::isfinite(v)) throw NumericalError("average: non-finite integrand at x = " + std::to_string(x));
    sum += v;
    weight += w;
  }
  return sum / weight;
}

}  // namespace levyhom
