#include "levyhom/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "levyhom/error.hpp"
#include "levyhom/quadrature.hpp"
#include "levyhom/rng.hpp"

namespace levyhom {

namespace {

SimConfig with(const SimConfig& base, double eps, PhaseLaw start, double t_max) {
  SimConfig c = base;
  c.eps = eps;
  c.start = start;
  c.t_max = t_max;
  return c;
}

// Bootstrap stream keyed by the eps value, so a single-eps run reproduces
// the matching row of a sweep.
std::uint64_t eps_stream(double eps, std::uint64_t tag) { return mix64(std::bit_cast<std::uint64_t>(eps) ^ (tag << 56)); }

Medium reference_medium(const EnsembleSetup& setup) { return Medium(setup.model, 0.0); }

TrendRow mean_row(double eps, const std::vector<double>& xs, std::uint64_t seed, std::uint64_t stream) {
  TrendRow row;
  row.eps = eps;
  const auto est = stats::mean_estimate(xs);
  row.statistic = est.mean;
  row.std_error = est.std_error;
  row.ci = stats::bootstrap_mean_interval(xs, seed, stream);
  return row;
}

// int g d nu over both half-lines, g taken constant beyond 1e3.
double nu_integral(const std::function<double(double)>& g, double alpha) {
  const double zt = 1e3;
  const auto integrand = [&](double z) { return (g(z) + g(-z)) * std::pow(z, -1.0 - alpha); };
  return quad::log_spaced(integrand, 1e-12, 1.0, 32) + quad::log_spaced(integrand, 1.0, zt, 32) +
         (g(zt) + g(-zt)) * std::pow(zt, -alpha) / alpha;
}

double min_one_z2(double z) { return std::min(1.0, z * z); }

}  // namespace

TrendVerdict trend_verdict(std::vector<TrendRow> rows) {
  TrendVerdict v;
  if (rows.size() < 2) return v;
  std::sort(rows.begin(), rows.end(), [](const TrendRow& a, const TrendRow& b) { return a.eps > b.eps; });
  v.monotone = true;
  for (std::size_t k = 1; k < rows.size(); ++k) v.monotone = v.monotone && rows[k].statistic < rows[k - 1].statistic;
  v.separated = rows.front().ci.lo > rows.back().ci.hi;
  return v;
}

// ------------------------------------------------------------------- ECF

std::vector<double> default_u_grid() {
  std::vector<double> u;
  for (int k = -12; k <= 12; ++k) u.push_back(0.25 * k);
  return u;
}

EcfReport ecf_test(std::span<const double> increments, const LevyTriplet& triplet, double t,
                   const std::vector<double>& u, std::uint64_t seed, std::uint64_t stream, double eps) {
  const std::size_t n = increments.size();
  if (n < 100) throw ConfigError("ecf_test: need at least 100 samples");
  triplet.validate();
  const std::size_t m = u.size();
  EcfReport r;
  r.eps = eps;
  r.t = t;
  r.n = n;
  r.u = u;
  // cos/sin table, row per frequency.
  std::vector<double> cs(m * n), sn(m * n);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      cs[k * n + i] = std::cos(u[k] * increments[i]);
      sn[k * n + i] = std::sin(u[k] * increments[i]);
    }
  for (std::size_t k = 0; k < m; ++k) {
    const auto ce = stats::mean_estimate(std::span<const double>(cs.data() + k * n, n));
    const auto se = stats::mean_estimate(std::span<const double>(sn.data() + k * n, n));
    const double th = std::exp(t * exponent(triplet, u[k]).real());
    r.ecf_re.push_back(ce.mean);
    r.ecf_im.push_back(se.mean);
    r.se_re.push_back(ce.std_error);
    r.se_im.push_back(se.std_error);
    r.theory.push_back(th);
    const auto zscore = [](double diff, double s) {
      if (s > 0.0) return diff / s;
      return std::abs(diff) < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    const double z = std::max(std::abs(zscore(ce.mean - th, ce.std_error)), std::abs(zscore(se.mean, se.std_error)));
    r.z.push_back(z);
    if (z > 3.0) ++r.exceed;
    r.sup_distance = std::max(r.sup_distance, std::hypot(ce.mean - th, se.mean));
  }
  r.pass = static_cast<double>(r.exceed) <= 0.05 * static_cast<double>(m);
  r.sup_ci = stats::bootstrap_interval(
      n,
      [&](std::span<const std::size_t> idx) {
        double sup = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          const double* c = cs.data() + k * n;
          const double* s = sn.data() + k * n;
          double a = 0.0, b = 0.0;
          for (const std::size_t i : idx) {
            a += c[i];
            b += s[i];
          }
          a /= static_cast<double>(n);
          b /= static_cast<double>(n);
          sup = std::max(sup, std::hypot(a - r.theory[k], b));
        }
        return sup;
      },
      seed, stream);
  return r;
}

EcfSweep ecf_sweep(const EnsembleSetup& setup, const std::vector<double>& eps_list, double t,
                   const std::vector<double>& u) {
  EcfSweep out;
  out.triplet.A = effective_A(reference_medium(setup), setup.grid).value();
  out.triplet.theta_bar = setup.kernel ? setup.kernel->theta_bar() : 0.0;
  out.triplet.alpha = setup.kernel ? setup.kernel->alpha() : 1.0;
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    const SimConfig cfg = with(setup.sim, eps_list[k], setup.sim.start, t);
    const Simulator sim(setup.model, setup.kernel, cfg);
    const auto ens = simulate_ensemble(sim, setup.n_paths, setup.workers);
    std::vector<double> inc(ens.paths.size());
    for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = ens.paths[i].values.back() - cfg.x0;
    auto rep = ecf_test(inc, out.triplet, t, u, cfg.seed, eps_stream(eps_list[k], 1), eps_list[k]);
    TrendRow row;
    row.eps = eps_list[k];
    row.statistic = rep.sup_distance;
    row.ci = rep.sup_ci;
    out.rows.push_back(row);
    out.reports.push_back(std::move(rep));
  }
  out.trend = trend_verdict(out.rows);
  return out;
}

// --------------------------------------------------------------- ergodic

ErgodicReport ergodic_test(const EnsembleSetup& setup, const std::function<FieldFunctional(double)>& family,
                           const FieldFunctional& limit, double T, const std::vector<double>& eps_list) {
  ErgodicReport out;
  out.T = T;
  out.target = average(*setup.model, limit, Measure::pi);
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    const double eps = eps_list[k];
    const SimConfig cfg = with(setup.sim, eps, PhaseLaw::pi, T);
    const Simulator sim(setup.model, setup.kernel, cfg, {{"f", family(eps)}});
    const auto ens = simulate_ensemble(sim, setup.n_paths, setup.workers);
    std::vector<double> stat(ens.paths.size());
    for (std::size_t i = 0; i < stat.size(); ++i) {
      const auto& F = ens.paths[i].functionals[0];
      double s = 0.0;
      for (std::size_t j = 0; j < F.size(); ++j) s = std::max(s, std::abs(F[j] - ens.times[j] * out.target));
      stat[i] = s;
    }
    out.rows.push_back(mean_row(eps, stat, cfg.seed, eps_stream(eps, 2)));
  }
  out.trend = trend_verdict(out.rows);
  out.final_statistic = out.rows.empty() ? 0.0 : out.rows.back().statistic;
  return out;
}

// --------------------------------------------------------- jump functional

JumpFunctionalReport jump_functional_test(const EnsembleSetup& setup, const std::function<double(double)>& g,
                                          double t, const std::vector<double>& eps_list) {
  if (!setup.kernel) throw ConfigError("jump_functional_test: a kernel is required");
  for (int k = -600; k <= 600; ++k) {
    const double z = std::pow(10.0, k / 100.0);
    for (const double sz : {z, -z})
      if (std::abs(g(sz)) > min_one_z2(sz) * (1.0 + 1e-12))
        throw ConfigError("jump_functional_test: |g(z)| exceeds min(1, z^2) at z = " + std::to_string(sz));
  }
  const JumpKernel& kernel = *setup.kernel;
  JumpFunctionalReport out;
  out.t = t;
  out.limit = t * kernel.theta_bar() * nu_integral(g, kernel.alpha());
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    const double eps = eps_list[k];
    const double weight = kernel.weighted_c_integral(g, eps);
    const SimConfig cfg = with(setup.sim, eps, PhaseLaw::pi, t);
    const Simulator sim(setup.model, setup.kernel, cfg,
                        {{"jump", [weight](const FieldSample& f) { return std::exp(2.0 * f.V) * weight; }}});
    const auto ens = simulate_ensemble(sim, setup.n_paths, setup.workers);
    std::vector<double> dev(ens.paths.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < dev.size(); ++i) {
      const double v = ens.paths[i].functionals[0].back();
      mean += v;
      dev[i] = std::abs(v - out.limit);
    }
    out.means.push_back(mean / static_cast<double>(dev.size()));
    out.rows.push_back(mean_row(eps, dev, cfg.seed, eps_stream(eps, 3)));
  }
  out.trend = trend_verdict(out.rows);
  return out;
}

// ------------------------------------------------------------- compensator

CompensatorReport compensator_test(const EnsembleSetup& setup, double t, const std::vector<double>& eps_list) {
  CompensatorReport out;
  out.t = t;
  const Medium ref = reference_medium(setup);
  out.A = effective_A(ref, setup.grid).value();
  const double theta = setup.kernel ? setup.kernel->theta_bar() : 0.0;
  out.target = out.A + (setup.kernel ? theta * truncated_second_moment(setup.kernel->alpha()) : 0.0);
  const double L = setup.model->period();
  for (const double eps : eps_list) {
    const auto corr = corrector_solve(ref, setup.kernel ? &*setup.kernel : nullptr, eps, setup.grid);
    const double h2 = setup.kernel ? setup.kernel->weighted_c_integral(min_one_z2, eps) : 0.0;
    const auto du = std::make_shared<const std::vector<double>>(corr.du);
    const FieldFunctional bracket = [du, h2, L](const FieldSample& f) {
      const double g = 1.0 + interpolate_midpoints(*du, L, f.position);
      return g * g * f.a + (h2 != 0.0 ? std::exp(2.0 * f.V) * h2 : 0.0);
    };
    const SimConfig cfg = with(setup.sim, eps, PhaseLaw::pi, t);
    const Simulator sim(setup.model, setup.kernel, cfg, {{"bracket", bracket}});
    const auto ens = simulate_ensemble(sim, setup.n_paths, setup.workers);
    std::vector<double> slopes(ens.paths.size());
    for (std::size_t i = 0; i < slopes.size(); ++i) slopes[i] = ens.paths[i].functionals[0].back() / t;
    const auto est = stats::mean_estimate(slopes);
    CompensatorRow row;
    row.eps = eps;
    row.slope = est.mean;
    row.std_error = est.std_error;
    row.relative_deviation = std::abs(est.mean - out.target) / out.target;
    out.rows.push_back(row);
  }
  out.decreasing = true;
  for (std::size_t k = 1; k < out.rows.size(); ++k)
    out.decreasing = out.decreasing && out.rows[k].relative_deviation < out.rows[k - 1].relative_deviation;
  out.final_relative_deviation = out.rows.empty() ? 0.0 : out.rows.back().relative_deviation;
  return out;
}

// ------------------------------------------------------------ drift vanishing

DriftVanishingReport drift_vanishing_test(const EnsembleSetup& setup, const std::vector<double>& eps_list) {
  DriftVanishingReport out;
  const auto& kernel = setup.kernel;
  if (kernel && kernel->family() == KernelFamily::tail_inverted)
    out.applicable = kernel->odd() && kernel->spec().chi.converges_to_one();
  double max_w = 0.0;
  for (int i = 0; i < 1024; ++i)
    max_w = std::max(max_w, std::exp(2.0 * setup.model->V(setup.model->period() * i / 1024.0)));
  bool ok = true;
  for (const double eps : eps_list) {
    DriftVanishingRow row;
    row.eps = eps;
    const double integral = kernel ? kernel->truncated_drift_integral(eps) : 0.0;
    row.g_sup = max_w * std::abs(integral);
    SimConfig cfg = with(setup.sim, eps, PhaseLaw::pi, setup.sim.t_max);
    const Simulator sim(setup.model, setup.kernel, cfg,
                        {{"g", [integral](const FieldSample& f) { return std::exp(2.0 * f.V) * integral; }}});
    const auto ens = simulate_ensemble(sim, std::min<std::size_t>(setup.n_paths, 200), setup.workers);
    double acc = 0.0;
    for (const auto& p : ens.paths) {
      double s = 0.0;
      for (const double v : p.functionals[0]) s = std::max(s, std::abs(v));
      acc += s;
    }
    row.path_sup = acc / static_cast<double>(ens.paths.size());
    ok = ok && row.g_sup < 1e-8;
    out.rows.push_back(row);
  }
  out.pass = out.applicable && ok;
  return out;
}

// ------------------------------------------------------------------ modulus

ModulusReport modulus_diagnostic(const EnsembleResult& ensemble, std::size_t functional, std::vector<double> deltas) {
  ModulusReport out;
  const auto& times = ensemble.times;
  if (times.size() < 2) throw ConfigError("modulus: need at least two grid times");
  const double dt = times[1] - times[0];
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  for (const double delta : deltas) {
    const std::size_t k = std::min(times.size() - 1, static_cast<std::size_t>(std::llround(delta / dt)));
    std::vector<double> stat(ensemble.paths.size());
    for (std::size_t p = 0; p < stat.size(); ++p) {
      const auto& F = ensemble.paths[p].functionals.at(functional);
      // Sliding-window max - min over windows of k + 1 grid points.
      std::deque<std::size_t> hi, lo;
      double best = 0.0;
      for (std::size_t i = 0; i < F.size(); ++i) {
        while (!hi.empty() && F[hi.back()] <= F[i]) hi.pop_back();
        while (!lo.empty() && F[lo.back()] >= F[i]) lo.pop_back();
        hi.push_back(i);
        lo.push_back(i);
        while (hi.front() + k < i) hi.pop_front();
        while (lo.front() + k < i) lo.pop_front();
        best = std::max(best, F[hi.front()] - F[lo.front()]);
      }
      stat[p] = best;
    }
    const auto est = stats::mean_estimate(stat);
    ModulusRow row;
    row.delta = delta;
    row.statistic = est.mean;
    row.std_error = est.std_error;
    row.ratio = delta < 1.0 ? est.mean / (std::sqrt(delta) * std::log(1.0 / delta)) : 0.0;
    out.rows.push_back(row);
  }
  double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  for (const auto& r : out.rows) {
    if (r.delta >= 1.0) continue;
    rmax = std::max(rmax, r.ratio);
    rmin = std::min(rmin, r.ratio);
  }
  out.fitted_C = rmax;
  out.spread = rmax == 0.0 ? 1.0 : rmax / rmin;
  out.pass = out.spread <= 3.0;
  return out;
}

ModulusReport modulus_test(const EnsembleSetup& setup, double eps, const std::vector<double>& deltas) {
  const SimConfig cfg = with(setup.sim, eps, PhaseLaw::pi, setup.sim.t_max);
  const Simulator sim(setup.model, setup.kernel, cfg,
                      {{"drift", [eps](const FieldSample& f) { return f.b / eps; }}});
  const auto ens = simulate_ensemble(sim, setup.n_paths, setup.workers);
  auto out = modulus_diagnostic(ens, 0, deltas);
  out.eps = eps;
  return out;
}

// ---------------------------------------------------------------- invariance

InvarianceReport invariance_test(const EnsembleSetup& setup, double eps, const std::vector<PathFunctional>& fs,
                                 const std::vector<double>& times) {
  InvarianceReport out;
  const double t_max = *std::max_element(times.begin(), times.end());
  const SimConfig cfg = with(setup.sim, eps, PhaseLaw::pi, t_max);
  const Simulator sim(setup.model, setup.kernel, cfg);
  const auto ens = simulate_ensemble(sim, setup.n_paths, setup.workers);
  out.pass = true;
  for (const auto& pf : fs) {
    const double target = average(*setup.model, pf.f, Measure::pi);
    for (const double t : times) {
      const auto it = std::min_element(ens.times.begin(), ens.times.end(),
                                       [t](double a, double b) { return std::abs(a - t) < std::abs(b - t); });
      const auto k = static_cast<std::size_t>(it - ens.times.begin());
      if (std::abs(ens.times[k] - t) > 1e-9) throw ConfigError("invariance: time not on the macro grid");
      std::vector<double> v(ens.paths.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = pf.f(setup.model->at(ens.paths[i].env[k]));
      const auto est = stats::mean_estimate(v);
      InvarianceRow row;
      row.name = pf.name;
      row.eps = eps;
      row.t = t;
      row.mean = est.mean;
      row.std_error = est.std_error;
      row.target = target;
      const double diff = est.mean - target;
      row.z = est.std_error > 0.0 ? diff / est.std_error
                                  : (std::abs(diff) < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity());
      out.pass = out.pass && std::abs(row.z) < 3.0;
      out.rows.push_back(row);
    }
  }
  return out;
}

// -------------------------------------------------------- jump martingale

namespace {

// Integral over marks y in [lo, hi] of F(y) y^{-1-alpha}, in pieces short
// enough that the landing point gamma(y) moves by at most `span`.
double mark_integral(const std::function<double(double)>& F, const std::function<double(double)>& landing,
                     double alpha, double lo, double hi, double span) {
  const auto& gl = quad::GaussLegendre::get(6);
  double total = 0.0;
  double a = lo;
  while (a < hi) {
    const double g = std::abs(landing(a));
    double step = 0.25 * a;
    if (g > 0.0) step = std::min(step, span * a / g);
    const double b = std::min(hi, a + step);
    total += gl.integrate([&](double y) { return F(y) * std::pow(y, -1.0 - alpha); }, a, b);
    a = b;
  }
  return total;
}

}  // namespace

double nonlocal_energy(const MediumModel& model, const JumpKernel& kernel, const std::function<double(double)>& phi) {
  const double L = model.period();
  const double alpha = kernel.alpha();
  const int nodes = 256;
  const double y_far = 1e3;
  double mean_phi = 0.0, mean_phi2 = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double v = phi(L * i / nodes);
    mean_phi += v / nodes;
    mean_phi2 += v * v / nodes;
  }
  double total = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double p = L * i / nodes;
    const double f0 = phi(p);
    double acc = 0.0;
    for (const double sign : {1.0, -1.0}) {
      const auto F = [&](double y) {
        const double d = phi(p + sign * y) - f0;
        return d * d * kernel.c(sign * y);
      };
      acc += quad::log_spaced([&](double y) { return F(y) * std::pow(y, -1.0 - alpha); }, 1e-10, std::min(1e-2, L / 8), 16);
      acc += mark_integral(F, [](double y) { return y; }, alpha, std::min(1e-2, L / 8), y_far, L / 8);
      acc += kernel.theta_bar() * (mean_phi2 - 2.0 * f0 * mean_phi + f0 * f0) * std::pow(y_far, -alpha) / alpha;
    }
    total += acc / nodes;
  }
  return total;
}

MartingaleReport jump_martingale_test(const EnsembleSetup& setup, double eps,
                                      const std::function<double(double)>& phi) {
  if (!setup.kernel) throw ConfigError("jump_martingale_test: a kernel is required");
  const JumpKernel& kernel = *setup.kernel;
  const double alpha = kernel.alpha();
  const double L = setup.model->period();
  SimConfig cfg = with(setup.sim, eps, PhaseLaw::pi, setup.sim.t_max);
  cfg.record_jumps = true;
  // Compensator rate kappa(p) = int_{|y| >= delta} (phi(p + gamma(p, y)) - phi(p)) nu(dy), tabulated.
  const Simulator probe(setup.model, setup.kernel, cfg);
  const double delta = probe.jump_floor();
  const int nodes = 256;
  const double y_far = 1e3;
  double mean_phi = 0.0;
  for (int i = 0; i < nodes; ++i) mean_phi += phi(L * i / nodes) / nodes;
  auto kappa = std::make_shared<std::vector<double>>(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double p = L * i / nodes;
    const FieldSample f = setup.model->at(p);
    const double f0 = phi(p);
    double acc = 0.0;
    for (const double sign : {1.0, -1.0}) {
      const auto landing = [&](double y) { return kernel.gamma(f, sign * y); };
      acc += mark_integral([&](double y) { return phi(p + landing(y)) - f0; }, landing, alpha, delta, y_far, L / 8);
      acc += (mean_phi - f0) * std::pow(y_far, -alpha) / alpha;
    }
    (*kappa)[i] = acc;
  }
  const double scale = std::pow(eps, -alpha);
  const FieldFunctional comp = [kappa, L, scale](const FieldSample& f) {
    const double x = f.position / L * nodes;
    std::size_t i = static_cast<std::size_t>(x);
    const double t = x - static_cast<double>(i);
    i %= nodes;
    const std::size_t j = (i + 1) % nodes;
    return scale * ((*kappa)[i] + t * ((*kappa)[j] - (*kappa)[i]));
  };
  const Simulator sim(setup.model, setup.kernel, cfg, {{"compensator", comp}});
  const auto ens = simulate_ensemble(sim, setup.n_paths, setup.workers);

  const std::size_t grid = ens.times.size();
  std::vector<std::vector<double>> mart(grid, std::vector<double>(ens.paths.size()));
  for (std::size_t i = 0; i < ens.paths.size(); ++i) {
    const auto& path = ens.paths[i];
    double sum = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < grid; ++k) {
      while (next < path.jumps.size() && path.jumps[next].t <= ens.times[k]) {
        const auto& j = path.jumps[next++];
        sum += phi(j.env_before + j.amplitude / eps) - phi(j.env_before);
      }
      mart[k][i] = sum - path.functionals[0][k];
    }
  }
  MartingaleReport out;
  out.eps = eps;
  out.T = cfg.t_max;
  for (std::size_t k = 1; k < grid; ++k) {
    const auto est = stats::mean_estimate(mart[k]);
    if (est.std_error > 0.0) out.max_abs_z = std::max(out.max_abs_z, std::abs(est.mean) / est.std_error);
  }
  std::vector<double> sq(ens.paths.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = mart[grid - 1][i] * mart[grid - 1][i];
  const auto m2 = stats::mean_estimate(sq);
  out.second_moment = m2.mean;
  out.second_moment_se = m2.std_error;
  out.bound = 4.0 * out.T * scale * nonlocal_energy(*setup.model, kernel, phi);
  out.bound_holds = out.second_moment - 3.0 * out.second_moment_se <= out.bound;
  out.mean_zero = out.max_abs_z < 3.0;
  return out;
}

}  // namespace levyhom
