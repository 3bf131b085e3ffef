#include "levyhom/jump_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "levyhom/error.hpp"
#include "levyhom/quadrature.hpp"
#include "levyhom/rng.hpp"

namespace levyhom {

namespace {

constexpr double kTableLo = 1e-6;
constexpr double kTableHi = 1e6;
constexpr int kNodesPerDecade = 200;

double hermite(double y0, double y1, double d0, double d1, double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
}

// Integral of f over [a, b] split into pieces no longer than `feature`.
double resolved(const quad::Integrand& f, double a, double b, double feature) {
  if (b <= a) return 0.0;
  const int pieces = static_cast<int>(std::min(1e6, std::ceil((b - a) / feature)));
  return quad::composite(f, a, b, std::max(1, pieces), 10);
}

}  // namespace

// ---------------------------------------------------------------- ChiProfile

double ChiProfile::operator()(double z) const {
  switch (type) {
    case ChiType::one:
      return 1.0;
    case ChiType::one_plus_gauss: {
      const double r = z / width;
      return 1.0 + amp * std::exp(-r * r);
    }
    case ChiType::one_plus_shifted_gauss: {
      const double r = (z - shift) / width;
      return 1.0 + amp * std::exp(-r * r);
    }
    case ChiType::one_plus_cos:
      return 1.0 + amp * std::cos(2.0 * std::numbers::pi * z / width);
  }
  return 1.0;
}

bool ChiProfile::even() const { return type != ChiType::one_plus_shifted_gauss || shift == 0.0 || amp == 0.0; }

bool ChiProfile::converges_to_one() const { return type != ChiType::one_plus_cos || amp == 0.0; }

double ChiProfile::lower_bound() const {
  if (type == ChiType::one) return 1.0;
  if (type == ChiType::one_plus_cos) return 1.0 - std::abs(amp);
  return std::min(1.0, 1.0 + amp);
}

double ChiProfile::upper_bound() const {
  if (type == ChiType::one) return 1.0;
  if (type == ChiType::one_plus_cos) return 1.0 + std::abs(amp);
  return std::max(1.0, 1.0 + amp);
}

double ChiProfile::feature_scale() const {
  if (type == ChiType::one_plus_cos) return width / 8.0;
  return width / 2.0;
}

double ChiProfile::support_end() const {
  if (type == ChiType::one || amp == 0.0) return 0.0;
  if (type == ChiType::one_plus_cos) return 1e4;
  return std::abs(shift) + 9.0 * width;
}

void ChiProfile::validate() const {
  if (!std::isfinite(amp) || !std::isfinite(width) || !std::isfinite(shift))
    throw ConfigError("chi: non-finite parameter");
  if (!(width > 0.0)) throw ConfigError("chi: width must be positive");
  if (!(lower_bound() > 0.0)) throw ConfigError("chi: profile must stay bounded away from 0");
}

void KernelSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("kernel: alpha must lie in (0, 2)");
  if (family == KernelFamily::linear) {
    if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("kernel: C must be positive");
  } else {
    if (!(cbar > 0.0) || !std::isfinite(cbar)) throw ConfigError("kernel: cbar must be positive");
    chi.validate();
  }
}

// ----------------------------------------------------------------- TailTable

TailTable::TailTable(std::function<double(double)> chi, double chi_at_zero, double alpha, double feature,
                     double support_end)
    : chi_(std::move(chi)), chi0_(chi_at_zero), alpha_(alpha) {
  log_lo_ = std::log(kTableLo);
  log_hi_ = std::log(kTableHi);
  const int nodes = static_cast<int>(std::lround((log_hi_ - log_lo_) / std::log(10.0))) * kNodesPerDecade + 1;
  dlog_ = (log_hi_ - log_lo_) / (nodes - 1);
  if (support_end > kTableHi) throw ConfigError("tail table: profile support exceeds the table range");

  const auto excess = [this](double u) { return (chi_(u) - 1.0) * std::pow(u, -1.0 - alpha_); };
  r_.assign(nodes, 0.0);
  for (int i = nodes - 2; i >= 0; --i) {
    const double a = std::exp(log_lo_ + dlog_ * i);
    const double b = std::min(std::exp(log_lo_ + dlog_ * (i + 1)), support_end);
    r_[i] = r_[i + 1] + (b > a ? resolved(excess, a, b, feature) : 0.0);
  }

  log_g_.resize(nodes);
  slope_g_.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double w = std::exp(log_lo_ + dlog_ * i);
    const double g = inverse_exact(w);
    log_g_[i] = std::log(g);
    slope_g_[i] = std::pow(w, -alpha_) / (chi_(g) * std::pow(g, -alpha_));
  }
}

double TailTable::remainder(double y) const {
  const double s = std::log(y);
  if (s >= log_hi_) return 0.0;
  if (s < log_lo_)
    return r_[0] + (chi0_ - 1.0) * (std::pow(y, -alpha_) - std::pow(kTableLo, -alpha_)) / alpha_;
  const double pos = (s - log_lo_) / dlog_;
  const int i = std::min(static_cast<int>(pos), static_cast<int>(r_.size()) - 2);
  const double t = pos - i;
  const double y0 = std::exp(log_lo_ + dlog_ * i);
  const double y1 = std::exp(log_lo_ + dlog_ * (i + 1));
  // dR/ds = -(chi(y) - 1) y^{-alpha}
  const double d0 = -(chi_(y0) - 1.0) * std::pow(y0, -alpha_) * dlog_;
  const double d1 = -(chi_(y1) - 1.0) * std::pow(y1, -alpha_) * dlog_;
  return hermite(r_[i], r_[i + 1], d0, d1, t);
}

double TailTable::tail(double y) const { return std::pow(y, -alpha_) / alpha_ + remainder(y); }

double TailTable::inverse_exact(double w) const {
  if (!(w > 0.0)) return 0.0;
  const double target = std::pow(w, -alpha_) / alpha_;
  // Bracket in s = ln y; T is strictly decreasing.
  double lo = std::log(w) - 1.0, hi = std::log(w) + 1.0;
  while (tail(std::exp(lo)) < target) lo -= 2.0;
  while (tail(std::exp(hi)) > target) hi += 2.0;
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double y = std::exp(s);
    const double f = tail(y) - target;
    if (f > 0.0) lo = s; else hi = s;
    const double df = -chi_(y) * std::pow(y, -alpha_);
    double next = s - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - s);
    s = next;
    if (step < 1e-14 || hi - lo < 1e-14) break;
  }
  return std::exp(s);
}

double TailTable::inverse(double w) const {
  if (!(w > 0.0)) return 0.0;
  const double s = std::log(w);
  if (s < log_lo_ || s >= log_hi_) return inverse_exact(w);
  const double pos = (s - log_lo_) / dlog_;
  const int i = std::min(static_cast<int>(pos), static_cast<int>(log_g_.size()) - 2);
  const double t = pos - i;
  return std::exp(hermite(log_g_[i], log_g_[i + 1], slope_g_[i] * dlog_, slope_g_[i + 1] * dlog_, t));
}

// ---------------------------------------------------------------- JumpKernel

JumpKernel::JumpKernel(std::shared_ptr<const MediumModel> model, KernelSpec spec)
    : model_(std::move(model)), spec_(std::move(spec)) {
  if (!model_) throw ConfigError("kernel: null medium model");
  spec_.validate();
  if (spec_.family == KernelFamily::tail_inverted) {
    const ChiProfile chi = spec_.chi;
    const double feature = chi.feature_scale();
    const double end = chi.support_end();
    positive_ = std::make_shared<const TailTable>([chi](double u) { return chi(u); }, chi(0.0), spec_.alpha,
                                                  feature, end);
    if (chi.even()) {
      negative_ = positive_;
    } else {
      negative_ = std::make_shared<const TailTable>([chi](double u) { return chi(-u); }, chi(0.0), spec_.alpha,
                                                    feature, end);
    }
  }
}

JumpKernel JumpKernel::linear(std::shared_ptr<const MediumModel> model, double C, double alpha) {
  KernelSpec spec;
  spec.family = KernelFamily::linear;
  spec.C = C;
  spec.alpha = alpha;
  return JumpKernel(std::move(model), spec);
}

JumpKernel JumpKernel::tail_inverted(std::shared_ptr<const MediumModel> model, double cbar, ChiProfile chi,
                                     double alpha) {
  KernelSpec spec;
  spec.family = KernelFamily::tail_inverted;
  spec.cbar = cbar;
  spec.chi = chi;
  spec.alpha = alpha;
  return JumpKernel(std::move(model), spec);
}

JumpKernel JumpKernel::from_spec(std::shared_ptr<const MediumModel> model, const KernelSpec& spec) {
  return JumpKernel(std::move(model), spec);
}

double JumpKernel::scale(const FieldSample& f) const {
  if (spec_.family == KernelFamily::linear) return spec_.C * std::exp(2.0 * f.V / spec_.alpha);
  return std::exp((2.0 * f.V + std::log(spec_.cbar)) / spec_.alpha);
}

double JumpKernel::gamma(const FieldSample& f, double y) const {
  const double s = scale(f);
  if (spec_.family == KernelFamily::linear) return s * y;
  if (y > 0.0) return positive_->inverse(y * s);
  if (y < 0.0) return -negative_->inverse(-y * s);
  return 0.0;
}

double JumpKernel::gamma_exact(const FieldSample& f, double y) const {
  const double s = scale(f);
  if (spec_.family == KernelFamily::linear) return s * y;
  if (y > 0.0) return positive_->inverse_exact(y * s);
  if (y < 0.0) return -negative_->inverse_exact(-y * s);
  return 0.0;
}

double JumpKernel::c(double z) const {
  if (spec_.family == KernelFamily::linear) return std::pow(spec_.C, spec_.alpha);
  return spec_.cbar * spec_.chi(z);
}

double JumpKernel::theta_bar() const {
  if (spec_.family == KernelFamily::linear) return std::pow(spec_.C, spec_.alpha);
  return spec_.cbar;
}

bool JumpKernel::odd() const { return spec_.family == KernelFamily::linear || spec_.chi.even(); }

double JumpKernel::small_jump_variance(const FieldSample& f, double delta) const {
  const double alpha = spec_.alpha;
  const double s = scale(f);
  if (spec_.family == KernelFamily::linear) return s * s * 2.0 * std::pow(delta, 2.0 - alpha) / (2.0 - alpha);
  // int_{0}^{delta} Gamma(y s)^2 y^{-1-alpha} dy = s^alpha int_0^{delta s} Gamma(w)^2 w^{-1-alpha} dw
  const double top = delta * s;
  const double floor = top * 1e-8;
  const double chi0 = spec_.chi(0.0);
  double total = 0.0;
  for (const TailTable* table : {positive_.get(), negative_.get()}) {
    const auto integrand = [table, alpha](double w) {
      const double g = table->inverse(w);
      return g * g * std::pow(w, -1.0 - alpha);
    };
    // Below `floor`, Gamma(w) = chi(0)^{1/alpha} w to relative accuracy floor^alpha.
    const double head = std::pow(chi0, 2.0 / alpha) * std::pow(floor, 2.0 - alpha) / (2.0 - alpha);
    total += head + quad::log_spaced(integrand, floor, top, 16);
  }
  return std::pow(s, alpha) * total;
}

double JumpKernel::band_compensator(const FieldSample& f, double delta) const {
  if (!(delta < 1.0)) return 0.0;
  const double alpha = spec_.alpha;
  const double s = scale(f);
  if (spec_.family == KernelFamily::linear) {
    const auto side = [&](double sign) {
      return quad::log_spaced([&](double y) { return sign * s * y * std::pow(y, -1.0 - alpha); }, delta, 1.0, 16);
    };
    return side(1.0) + side(-1.0);
  }
  const auto side = [&](const TailTable* table) {
    return quad::log_spaced([&](double y) { return table->inverse(y * s) * std::pow(y, -1.0 - alpha); }, delta, 1.0,
                            16);
  };
  return side(positive_.get()) - side(negative_.get());
}

std::vector<double> JumpKernel::drift_e_levels(const FieldSample& f) const {
  const double alpha = spec_.alpha;
  const double s = scale(f);
  std::vector<double> out;
  for (const double beta : {1e-1, 1e-2, 1e-3}) {
    double level = 0.0;
    if (spec_.family == KernelFamily::linear) {
      const double z0 = beta / s;
      for (const double sign : {1.0, -1.0}) {
        if (z0 < 1.0)
          level += quad::log_spaced([&](double z) { return sign * s * z * std::pow(z, -1.0 - alpha); }, z0, 1.0, 16);
      }
    } else {
      for (const auto& [table, sign] : {std::pair{positive_.get(), 1.0}, std::pair{negative_.get(), -1.0}}) {
        // The mark z at which |gamma| reaches beta: Gamma^{-1}(beta) / s.
        const double z0 = std::pow(alpha * table->tail(beta), -1.0 / alpha) / s;
        if (z0 < 1.0)
          level += sign * quad::log_spaced(
                              [&](double z) { return table->inverse(z * s) * std::pow(z, -1.0 - alpha); }, z0, 1.0, 16);
      }
    }
    out.push_back(level);
  }
  return out;
}

double JumpKernel::drift_e(const FieldSample& f) const {
  const auto e = drift_e_levels(f);
  const double d1 = std::abs(e[1] - e[0]);
  const double d2 = std::abs(e[2] - e[1]);
  if (d2 > 1e-8 && d2 > d1)
    throw NumericalError("drift_e: truncation levels are not Cauchy (differences " + std::to_string(d1) + ", " +
                         std::to_string(d2) + ")");
  return e[2];
}

double JumpKernel::weighted_c_integral(const std::function<double(double)>& g, double eps) const {
  const double alpha = spec_.alpha;
  const double z_tail = std::max(1e3, 10.0 * eps * spec_.chi.support_end());
  const auto integrand = [&](double z) {
    return (g(z) * c(z / eps) + g(-z) * c(-z / eps)) * std::pow(z, -1.0 - alpha);
  };
  const int ppd = 32;
  const double z_lo = 1e-12;
  double total = quad::log_spaced(integrand, z_lo, 1.0, ppd) + quad::log_spaced(integrand, 1.0, z_tail, ppd);
  // Below z_lo, g is taken quadratic (|g| <= z^2 near 0) and c constant.
  total += (g(z_lo) * c(z_lo / eps) + g(-z_lo) * c(-z_lo / eps)) * std::pow(z_lo, -alpha) / (2.0 - alpha);
  // g and c are treated as constant beyond z_tail.
  total += (g(z_tail) * c(z_tail / eps) + g(-z_tail) * c(-z_tail / eps)) * std::pow(z_tail, -alpha) / alpha;
  return total;
}

double JumpKernel::truncated_drift_integral(double eps) const {
  const double alpha = spec_.alpha;
  const double z_tail = std::max(1e3, 10.0 * eps * spec_.chi.support_end());
  const auto integrand = [&](double z) {
    const double h = std::min(z, 1.0);
    return h * (c(z / eps) - c(-z / eps)) * std::pow(z, -1.0 - alpha);
  };
  return quad::log_spaced(integrand, 1e-12, 1.0, 32) + quad::log_spaced(integrand, 1.0, z_tail, 32);
}

double JumpKernel::small_mark_bound(const FieldSample& f) const {
  return std::max(std::abs(gamma(f, 1.0)), std::abs(gamma(f, -1.0)));
}

double truncated_second_moment(double alpha) { return 2.0 / (2.0 - alpha) + 2.0 / alpha; }

// ---------------------------------------------------------- push-forward check

namespace {

// Target measure exp(2V) c(u) |u|^{-1-alpha} du on one half-line, built from
// c alone (never from the kernel's tail tables).
struct TargetSide {
  const JumpKernel* kernel;
  double weight;  // exp(2V)
  double sign;
  double alpha;

  double excess(double u) const {
    const double theta = kernel->theta_bar();
    return (kernel->c(sign * u) - theta) * std::pow(u, -1.0 - alpha);
  }
  // int_x^inf exp(2V) c(sign u) u^{-1-alpha} du
  double tail(double x) const {
    const double theta = kernel->theta_bar();
    double r = 0.0;
    const double end = kernel->spec().family == KernelFamily::linear ? 0.0 : kernel->spec().chi.support_end();
    if (x < end) {
      // Split at unit-width breakpoints so the adaptive rule sees smooth pieces.
      double a = x;
      while (a < end) {
        const double b = std::min(end, a < 1.0 ? std::min(1.0, 2.0 * a) : a + 1.0);
        // Tolerance relative to the tail itself, which grows like x^{-alpha} near 0.
        r += quad::adaptive([this](double u) { return excess(u); }, a, b, 1e-14 * std::pow(x, -alpha) / alpha);
        a = b;
      }
    }
    return weight * (theta * std::pow(x, -alpha) / alpha + r);
  }
};

}  // namespace

PushforwardResult pushforward_check(const JumpKernel& kernel, const Medium& medium, std::size_t n_samples,
                                    double delta_floor, std::uint64_t seed, double corruption) {
  if (n_samples < 100) throw ConfigError("pushforward_check: need at least 100 samples");
  if (!(delta_floor > 0.0)) throw ConfigError("pushforward_check: delta_floor must be positive");
  const double alpha = kernel.alpha();
  const FieldSample f = medium.eval(0.0);
  const double weight = std::exp(2.0 * f.V);
  const TargetSide right{&kernel, weight, 1.0, alpha};
  const TargetSide left{&kernel, weight, -1.0, alpha};
  const double side_mass = std::pow(delta_floor, -alpha) / alpha;

  // Cutoff per side by bisection in ln x on the target tail.
  const auto cutoff = [&](const TargetSide& side) {
    double lo = std::log(delta_floor) - 1.0, hi = std::log(delta_floor) + 1.0;
    while (side.tail(std::exp(lo)) < side_mass) lo -= 1.0;
    while (side.tail(std::exp(hi)) > side_mass) hi += 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (side.tail(std::exp(mid)) > side_mass) lo = mid; else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
  };
  const double g_right = cutoff(right);
  const double g_left = kernel.spec().chi.even() || kernel.family() == KernelFamily::linear ? g_right : cutoff(left);

  RandomStream rng(seed, 0, StreamPurpose::pushforward);
  std::vector<double> images(n_samples);
  for (auto& x : images) {
    const double z = delta_floor * std::pow(rng.uniform(), -1.0 / alpha);
    const double signed_z = rng.uniform() < 0.5 ? -z : z;
    x = corruption * kernel.gamma(f, signed_z);
  }
  std::sort(images.begin(), images.end());

  // Target tails at the sample points, accumulated between neighbours.
  const double total = 2.0 * side_mass;
  std::vector<double> cdf(n_samples);
  const auto tails_for = [&](const TargetSide& side, double g0, const std::vector<double>& xs) {
    // xs ascending, all >= g0. Returns side tail at each.
    std::vector<double> out(xs.size());
    if (xs.empty()) return out;
    const double feature = kernel.family() == KernelFamily::linear ? 1.0 : kernel.spec().chi.feature_scale();
    const double end = kernel.family() == KernelFamily::linear ? 0.0 : kernel.spec().chi.support_end();
    double acc = side.tail(xs.back());
    const double theta = kernel.theta_bar();
    out.back() = acc;
    // Track only the excess part incrementally; the power part is exact.
    double excess = acc / weight - theta * std::pow(xs.back(), -alpha) / alpha;
    for (std::size_t i = xs.size() - 1; i-- > 0;) {
      const double a = xs[i];
      const double b = std::min(xs[i + 1], end);
      if (b > a) excess += resolved([&](double u) { return side.excess(u); }, a, b, feature);
      out[i] = weight * (theta * std::pow(a, -alpha) / alpha + excess);
    }
    (void)g0;
    return out;
  };
  std::vector<double> pos, neg;
  for (double x : images) {
    if (x >= 0.0) pos.push_back(x); else neg.push_back(-x);
  }
  std::reverse(neg.begin(), neg.end());  // ascending in |x|
  const auto clamp_to = [](std::vector<double> v, double g0) {
    for (auto& x : v) x = std::max(x, g0);
    return v;
  };
  const auto tail_pos = tails_for(right, g_right, clamp_to(pos, g_right));
  const auto tail_neg = tails_for(left, g_left, clamp_to(neg, g_left));
  // Negative images come first in sorted order, most negative first.
  const std::size_t m = neg.size();
  for (std::size_t i = 0; i < m; ++i) cdf[i] = tail_neg[m - 1 - i] / total;
  for (std::size_t i = 0; i < pos.size(); ++i) cdf[m + i] = 1.0 - tail_pos[i] / total;

  PushforwardResult out;
  out.ks = stats::ks_from_sorted_cdf(cdf);
  out.cutoff = g_right;
  out.n = n_samples;
  return out;
}

}  // namespace levyhom
