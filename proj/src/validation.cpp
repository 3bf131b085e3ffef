#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "levyhom/error.hpp"
#include "levyhom/jump_kernel.hpp"
#include "levyhom/medium.hpp"

namespace levyhom {

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed; });
}

const HypothesisCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["measured"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.measured) e["measured"][k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr;
    e["note"] = c.note;
    j["checks"].push_back(e);
  }
  j["all_passed"] = all_passed();
  return j.dump(2);
}

namespace {

constexpr int kScan = 10000;

// Log-spaced probe of |z| in [lo, hi], both signs.
std::vector<double> probe_grid(double lo, double hi, int per_decade) {
  std::vector<double> z;
  const int n = static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade));
  for (int k = 0; k <= n; ++k) {
    const double v = lo * std::pow(hi / lo, static_cast<double>(k) / n);
    z.push_back(v);
    z.push_back(-v);
  }
  return z;
}

HypothesisCheck check_normalization(const MediumModel& m) {
  HypothesisCheck c{"normalization", false, {}, ""};
  double s = 0.0;
  for (int i = 0; i < kScan; ++i) s += std::exp(-2.0 * m.V(m.period() * i / kScan));
  const double dev = std::abs(s / kScan - 1.0);
  c.measured["mean_exp_minus_2V"] = s / kScan;
  c.measured["deviation"] = dev;
  c.passed = dev < 1e-8;
  if (!c.passed) c.note = "M[exp(-2V)] differs from 1; enable normalize_V";
  return c;
}

HypothesisCheck check_ellipticity_a(const MediumModel& m) {
  HypothesisCheck c{"ellipticity_a", false, {}, ""};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i < kScan; ++i) {
    const double a = m.a(m.period() * i / kScan);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  const double measured = std::max(hi, 1.0 / lo);
  const double declared = m.spec().ellipticity_constant();
  c.measured["a_min"] = lo;
  c.measured["a_max"] = hi;
  c.measured["M_measured"] = measured;
  c.measured["M_declared"] = declared;
  c.passed = lo > 0.0 && std::isfinite(measured) && measured <= declared * (1.0 + 1e-9);
  if (!c.passed) c.note = "a leaves [1/M, M]";
  return c;
}

HypothesisCheck check_smoothness(const MediumModel& m) {
  HypothesisCheck c{"smooth_coefficients", false, {}, ""};
  const double L = m.period();
  const double h = 1e-5 * L;
  double worst = 0.0;
  bool finite = true;
  for (int i = 0; i < 1000; ++i) {
    const double p = L * i / 1000.0;
    const FieldSample f = m.at(p);
    finite = finite && std::isfinite(f.b) && std::isfinite(f.DV) && std::isfinite(f.Da);
    // b = (exp(2V) / 2) d/dp (a exp(-2V)), by central differences.
    const auto w = [&](double q) { return m.a(q) * std::exp(-2.0 * m.V(q)); };
    const double fd = 0.5 * std::exp(2.0 * f.V) * (w(p + h) - w(p - h)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - f.b) / std::max(1.0, std::abs(f.b)));
  }
  c.measured["drift_fd_deviation"] = worst;
  c.passed = finite && worst < 1e-6;
  if (!c.passed) c.note = "drift does not match the divergence form";
  return c;
}

HypothesisCheck check_ellipticity_c(const JumpKernel& k) {
  HypothesisCheck c{"ellipticity_c", false, {}, ""};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const double z : probe_grid(1e-6, 1e6, 50)) {
    const double v = k.c(z);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (int i = -2000; i <= 2000; ++i) {
    const double v = k.c(i * 5e-3);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  c.measured["c_min"] = lo;
  c.measured["c_max"] = hi;
  c.measured["M_c"] = lo > 0.0 ? std::max(hi, 1.0 / lo) : std::numeric_limits<double>::infinity();
  c.passed = lo > 0.0 && std::isfinite(hi);
  if (!c.passed) c.note = "c is not bounded away from 0 and infinity";
  return c;
}

HypothesisCheck check_symmetry(const JumpKernel& k) {
  HypothesisCheck c{"kernel_symmetry", false, {}, ""};
  // c does not depend on the environment here, so c(tau_z omega, -z) = c(omega, -z).
  double worst = 0.0;
  for (const double z : probe_grid(1e-6, 1e6, 50)) worst = std::max(worst, std::abs(k.c(-z) - k.c(z)));
  for (int i = 0; i <= 2000; ++i) worst = std::max(worst, std::abs(k.c(-i * 5e-3) - k.c(i * 5e-3)));
  c.measured["max_asymmetry"] = worst;
  c.passed = worst < 1e-12;
  if (!c.passed) c.note = "c(omega, z) != c(tau_z omega, -z)";
  return c;
}

HypothesisCheck check_limiting_kernel(const JumpKernel& k) {
  HypothesisCheck c{"limiting_kernel_l1", false, {}, ""};
  const double theta = k.theta_bar();
  const std::vector<double> levels{1.0, 10.0, 100.0, 1000.0};
  const auto grid = probe_grid(1.0, 1e6, 200);
  double last = 0.0;
  for (const double Z : levels) {
    double dev = 0.0;
    for (const double z : grid)
      if (std::abs(z) >= Z) dev = std::max(dev, std::abs(k.c(z) - theta));
    c.measured["deviation_Z" + std::to_string(static_cast<int>(Z))] = dev;
    last = dev;
  }
  c.measured["theta_bar"] = theta;
  c.passed = last < 1e-6;
  if (!c.passed) c.note = "c(omega, z) does not approach theta_bar as |z| grows";
  return c;
}

HypothesisCheck check_drift(const Medium& medium, const JumpKernel& k) {
  HypothesisCheck c{"principal_value_drift", false, {}, ""};
  const MediumModel& m = medium.model();
  const int n = 64;
  const double L = m.period();
  std::vector<double> e(n);
  try {
    for (int i = 0; i < n; ++i) e[i] = k.drift_e(m.at(L * i / n));
  } catch (const NumericalError& ex) {
    c.note = ex.what();
    return c;
  }
  double sup = 0.0, lip = 0.0;
  for (int i = 0; i < n; ++i) {
    sup = std::max(sup, std::abs(e[i]));
    lip = std::max(lip, std::abs(e[(i + 1) % n] - e[i]) / (L / n));
  }
  c.measured["e_sup"] = sup;
  c.measured["e_lipschitz"] = lip;
  c.passed = std::isfinite(sup) && std::isfinite(lip);
  return c;
}

HypothesisCheck check_small_jumps(const Medium& medium, const JumpKernel& k) {
  HypothesisCheck c{"small_jump_bound", false, {}, ""};
  const MediumModel& m = medium.model();
  double S = 0.0;
  for (int i = 0; i < 256; ++i) S = std::max(S, k.small_mark_bound(m.at(m.period() * i / 256)));
  c.measured["S"] = S;
  c.passed = std::isfinite(S);
  if (!c.passed) c.note = "marks with |y| <= 1 are not uniformly bounded";
  return c;
}

}  // namespace

ValidationReport validate_assumptions(const Medium& medium, const JumpKernel* kernel) {
  ValidationReport r;
  const MediumModel& m = medium.model();
  r.checks.push_back(check_normalization(m));
  r.checks.push_back(check_ellipticity_a(m));
  r.checks.push_back(check_smoothness(m));
  if (kernel) {
    r.checks.push_back(check_ellipticity_c(*kernel));
    r.checks.push_back(check_symmetry(*kernel));
    r.checks.push_back(check_limiting_kernel(*kernel));
    r.checks.push_back(check_drift(medium, *kernel));
    r.checks.push_back(check_small_jumps(medium, *kernel));
  }
  return r;
}

}  // namespace levyhom
