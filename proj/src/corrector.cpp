#include "levyhom/corrector.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <string>

#include "levyhom/error.hpp"
#include "levyhom/quadrature.hpp"

namespace levyhom {

namespace {

// Solves the cyclic tridiagonal system with sub[i] = A(i, i-1),
// sup[i] = A(i, i+1) (indices mod n) by Sherman-Morrison on top of the
// Thomas algorithm.
std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                                             const std::vector<double>& sup, const std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  const double alpha = sup[n - 1];  // A(n-1, 0)
  const double beta = sub[0];       // A(0, n-1)
  const double gamma = -diag[0];
  std::vector<double> bb(diag);
  bb[0] -= gamma;
  bb[n - 1] -= alpha * beta / gamma;

  const auto thomas = [&](const std::vector<double>& r) {
    std::vector<double> c(n), x(n);
    double denom = bb[0];
    x[0] = r[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
      c[i] = sup[i - 1] / denom;
      denom = bb[i] - sub[i] * c[i];
      if (denom == 0.0) throw NumericalError("cyclic solve: zero pivot");
      x[i] = (r[i] - sub[i] * x[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i + 1] * x[i + 1];
    return x;
  };

  std::vector<double> x = thomas(rhs);
  std::vector<double> uvec(n, 0.0);
  uvec[0] = gamma;
  uvec[n - 1] = alpha;
  const std::vector<double> z = thomas(uvec);
  const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

DiscreteGenerator DiscreteGenerator::assemble(const Medium& medium, const JumpKernel* kernel, double eps,
                                              std::size_t n, GeneratorOptions options) {
  if (n < 64) throw ConfigError("assemble: grid size must be >= 64");
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("assemble: eps must lie in (0, 1]");
  DiscreteGenerator g;
  g.n_ = n;
  g.period_ = medium.period();
  g.h_ = g.period_ / static_cast<double>(n);
  g.eps_ = eps;

  g.fields_.resize(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g.fields_[i] = medium.eval(g.node(i));
    z += std::exp(-2.0 * g.fields_[i].V);
  }
  // mu-weight per node chosen so that the pi-weights sum to one exactly.
  g.mbar_ = 1.0 / z;
  g.p_.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.p_[i] = g.mbar_ * std::exp(-2.0 * g.fields_[i].V);
  g.w_.resize(n);
  g.q_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FieldSample mid = medium.eval(g.node(i) + 0.5 * g.h_);
    g.w_[i] = mid.a * std::exp(-2.0 * mid.V);
    g.q_[i] = g.mbar_ * std::exp(-2.0 * mid.V);
  }

  g.s_.assign(n, 0.0);
  if (kernel != nullptr) {
    g.has_jumps_ = true;
    const double alpha = kernel->alpha();
    g.jump_factor_ = std::pow(eps, 2.0 - alpha);
    const double h = g.h_;
    const double band = std::max(options.z_min, h);
    const double zmax = options.z_max_periods * g.period_;
    std::vector<double> fold(n, 0.0);
    const auto add = [&](long long m, double w) {
      const long long r = ((m % static_cast<long long>(n)) + static_cast<long long>(n)) % static_cast<long long>(n);
      fold[static_cast<std::size_t>(r)] += w;
    };
    // Taylor band: 1/2 I D^2 with I = int_{|z|<band} z^2 c nu(dz).
    const double head = band * 1e-12;
    const auto band_integrand = [&](double zz) { return (kernel->c(zz) + kernel->c(-zz)) * std::pow(zz, 1.0 - alpha); };
    const double i_band = (kernel->c(0.0) * 2.0) * std::pow(head, 2.0 - alpha) / (2.0 - alpha) +
                          quad::log_spaced(band_integrand, head, band, 16);
    add(1, i_band / (2.0 * h * h));
    add(-1, i_band / (2.0 * h * h));
    // Hat-function cells on [band, zmax] for each sign.
    const auto m_end = static_cast<long long>(std::ceil(zmax / h));
    const auto& gl_fine = quad::GaussLegendre::get(10);
    const auto& gl_coarse = quad::GaussLegendre::get(4);
    for (const double sign : {1.0, -1.0}) {
      for (long long m = static_cast<long long>(std::floor(band / h)); m < m_end; ++m) {
        const double lo = std::max(band, h * static_cast<double>(m));
        const double hi = h * static_cast<double>(m + 1);
        if (hi <= lo) continue;
        const auto& rule = m < 64 ? gl_fine : gl_coarse;
        double left = 0.0, right = 0.0;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double zz = mid + half * rule.nodes[q];
          const double dens = kernel->c(sign * zz) * std::pow(zz, -1.0 - alpha) * rule.weights[q] * half;
          const double t = zz / h - static_cast<double>(m);
          left += (1.0 - t) * dens;
          right += t * dens;
        }
        const long long sm = sign > 0 ? m : -m;
        const long long sm1 = sign > 0 ? m + 1 : -(m + 1);
        if (m != 0) add(sm, left);
        add(sm1, right);
      }
    }
    // Far tail, equidistributed over the residues.
    const double tail = (kernel->c(zmax) + kernel->c(-zmax)) * std::pow(zmax, -alpha) / alpha;
    for (auto& v : fold) v += tail / static_cast<double>(n);
    fold[0] = 0.0;
    for (std::size_t r = 1; r < n; ++r) g.s_[r] = 0.5 * (fold[r] + fold[n - r]);
  }

  // Assembly check: pi-self-adjointness on two fixed test vectors.
  std::vector<double> phi(n), psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.node(i) / g.period_;
    phi[i] = std::sin(2.0 * std::numbers::pi * x) + 0.3 * std::cos(6.0 * std::numbers::pi * x);
    psi[i] = std::cos(2.0 * std::numbers::pi * x) + 0.2 * std::sin(10.0 * std::numbers::pi * x);
  }
  const double lhs = g.inner_pi(g.apply(phi), psi);
  const double rhs = g.inner_pi(phi, g.apply(psi));
  if (std::abs(lhs - rhs) > 1e-8 * std::max(1.0, std::abs(lhs)))
    throw NumericalError("assemble: symmetry residual " + std::to_string(std::abs(lhs - rhs)));
  return g;
}

std::vector<double> DiscreteGenerator::apply_jump(const std::vector<double>& phi) const {
  std::vector<double> out(n_, 0.0);
  if (!has_jumps_) return out;
  double total = 0.0;
  for (std::size_t r = 1; r < n_; ++r) total += s_[r];
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = total * phi[i];
    for (std::size_t r = 1; r < n_; ++r) {
      std::size_t j = i + r;
      if (j >= n_) j -= n_;
      acc -= s_[r] * phi[j];
    }
    out[i] = mbar_ * acc;
  }
  return out;
}

std::vector<double> DiscreteGenerator::apply_stiffness(const std::vector<double>& phi) const {
  std::vector<double> out(n_);
  const double c = mbar_ / (2.0 * h_ * h_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t ip = i + 1 == n_ ? 0 : i + 1;
    const std::size_t im = i == 0 ? n_ - 1 : i - 1;
    out[i] = c * (w_[i] * (phi[i] - phi[ip]) + w_[im] * (phi[i] - phi[im]));
  }
  if (has_jumps_) {
    const auto j = apply_jump(phi);
    for (std::size_t i = 0; i < n_; ++i) out[i] += jump_factor_ * j[i];
  }
  return out;
}

std::vector<double> DiscreteGenerator::apply(const std::vector<double>& phi) const {
  auto out = apply_stiffness(phi);
  for (std::size_t i = 0; i < n_; ++i) out[i] = -out[i] / p_[i];
  return out;
}

double DiscreteGenerator::form_d(const std::vector<double>& phi, const std::vector<double>& psi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t ip = i + 1 == n_ ? 0 : i + 1;
    s += w_[i] * (phi[ip] - phi[i]) * (psi[ip] - psi[i]);
  }
  return 0.5 * mbar_ * s / (h_ * h_);
}

double DiscreteGenerator::form_j(const std::vector<double>& phi, const std::vector<double>& psi) const {
  if (!has_jumps_) return 0.0;
  double s = 0.0;
  for (std::size_t r = 1; r < n_; ++r) {
    if (s_[r] == 0.0) continue;
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t j = i + r;
      if (j >= n_) j -= n_;
      acc += (phi[j] - phi[i]) * (psi[j] - psi[i]);
    }
    s += s_[r] * acc;
  }
  return 0.5 * mbar_ * s;
}

double DiscreteGenerator::inner_pi(const std::vector<double>& phi, const std::vector<double>& psi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += p_[i] * phi[i] * psi[i];
  return s;
}

double DiscreteGenerator::mean_pi(const std::vector<double>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += p_[i] * f[i];
  return s;
}

double DiscreteGenerator::gradient_norm2(const std::vector<double>& phi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t ip = i + 1 == n_ ? 0 : i + 1;
    const double d = (phi[ip] - phi[i]) / h_;
    s += q_[i] * d * d;
  }
  return s;
}

std::vector<double> DiscreteGenerator::apply_stiffness_diagonal() const {
  const double c = mbar_ / (2.0 * h_ * h_);
  double total = 0.0;
  if (has_jumps_)
    for (std::size_t r = 1; r < n_; ++r) total += s_[r];
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = c * (w_[i] + w_[i == 0 ? n_ - 1 : i - 1]) + jump_factor_ * mbar_ * total;
  return d;
}

std::vector<double> DiscreteGenerator::row_sums() const { return apply(std::vector<double>(n_, 1.0)); }

std::vector<double> DiscreteGenerator::sample(const FieldFunctional& f) const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = f(fields_[i]);
  return out;
}

ResolventSolution solve_resolvent(const DiscreteGenerator& gen, double lambda, const std::vector<double>& f) {
  if (!(lambda > 0.0)) throw ConfigError("resolvent: lambda must be positive");
  const std::size_t n = gen.size();
  if (f.size() != n) throw ConfigError("resolvent: right-hand side has the wrong size");
  const auto& p = gen.pi_weights();
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = p[i] * f[i];

  std::vector<double> u;
  if (!gen.has_jumps()) {
    const auto& w = gen.conductance();
    const double c = gen.mu_weight() / (2.0 * gen.step() * gen.step());
    std::vector<double> sub(n), diag(n), sup(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = i == 0 ? n - 1 : i - 1;
      diag[i] = lambda * p[i] + c * (w[i] + w[im]);
      sub[i] = -c * w[im];
      sup[i] = -c * w[i];
    }
    u = solve_cyclic_tridiagonal(sub, diag, sup, rhs);
  } else {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const auto& w = gen.conductance();
    const auto& s = gen.circulant();
    const double c = gen.mu_weight() / (2.0 * gen.step() * gen.step());
    const double jc = gen.jump_factor() * gen.mu_weight();
    double total = 0.0;
    for (std::size_t r = 1; r < n; ++r) total += s[r];
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (std::size_t r = 1; r < n; ++r) m(ii, static_cast<Eigen::Index>((i + r) % n)) = -jc * s[r];
      const std::size_t ip = i + 1 == n ? 0 : i + 1;
      const std::size_t im = i == 0 ? n - 1 : i - 1;
      m(ii, ii) = lambda * p[i] + c * (w[i] + w[im]) + jc * total;
      m(ii, static_cast<Eigen::Index>(ip)) -= c * w[i];
      m(ii, static_cast<Eigen::Index>(im)) -= c * w[im];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw NumericalError("resolvent: matrix is not positive definite");
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd x = llt.solve(b);
    // One step of iterative refinement.
    Eigen::VectorXd r = b - m * x;
    x += llt.solve(r);
    u.assign(x.data(), x.data() + n);
  }

  // Residual of (lambda P + K) u = P f.
  const auto ku = gen.apply_stiffness(u);
  double rn = 0.0, bn = 0.0, r_inf = 0.0, b_inf = 0.0, u_inf = 0.0, a_inf = 0.0;
  // Stiffness rows have zero sum, so the absolute row sum is twice the diagonal.
  const auto diag = gen.apply_stiffness_diagonal();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = lambda * p[i] * u[i] + ku[i] - rhs[i];
    rn += r * r;
    bn += rhs[i] * rhs[i];
    r_inf = std::max(r_inf, std::abs(r));
    b_inf = std::max(b_inf, std::abs(rhs[i]));
    u_inf = std::max(u_inf, std::abs(u[i]));
    a_inf = std::max(a_inf, lambda * p[i] + 2.0 * diag[i]);
  }
  ResolventSolution out;
  out.relative_residual = bn > 0.0 ? std::sqrt(rn / bn) : std::sqrt(rn);
  out.backward_error = r_inf / (a_inf * u_inf + b_inf + std::numeric_limits<double>::min());
  if (out.backward_error > 1e-12)
    throw NumericalError("resolvent: backward error " + std::to_string(out.backward_error));
  double fmax = 0.0, umax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    fmax = std::max(fmax, std::abs(f[i]));
    umax = std::max(umax, std::abs(lambda * u[i]));
  }
  out.contraction = umax <= fmax * (1.0 + 1e-9) + 1e-14;
  out.u = std::move(u);
  std::vector<double> lu(out.u);
  for (auto& v : lu) v *= lambda;
  out.mean_lambda_u = gen.mean_pi(lu);
  out.mean_f = gen.mean_pi(f);
  return out;
}

double Energies::relative_gap() const {
  const double lhs = l2 + bd + bj;
  return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

Energies energy_identity(const DiscreteGenerator& gen, double lambda, const std::vector<double>& u,
                         const std::vector<double>& f) {
  Energies e;
  e.l2 = lambda * gen.inner_pi(u, u);
  e.bd = gen.form_d(u, u);
  e.bj = gen.has_jumps() ? gen.jump_factor() * gen.form_j(u, u) : 0.0;
  e.rhs = gen.inner_pi(f, u);
  return e;
}

EffectiveA effective_A(const Medium& medium, std::size_t n) {
  if (n < 64) throw ConfigError("effective_A: grid size must be >= 64");
  const double L = medium.period();
  const double h = L / static_cast<double>(n);
  std::vector<double> w(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z += std::exp(-2.0 * medium.eval(h * static_cast<double>(i)).V);
    const FieldSample mid = medium.eval(h * (static_cast<double>(i) + 0.5));
    w[i] = mid.a * std::exp(-2.0 * mid.V);
    if (!(w[i] > 0.0)) throw NumericalError("effective_A: indefinite form");
  }
  const double mbar = 1.0 / z;
  const auto energy = [&](const std::vector<double>& phi) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ip = i + 1 == n ? 0 : i + 1;
      const double g = 1.0 + (phi[ip] - phi[i]) / h;
      s += w[i] * g * g;
    }
    return mbar * s;
  };

  EffectiveA out;
  // Euler-Lagrange: -D(w (1 + D phi)) = 0 with phi_0 = 0; tridiagonal in phi_1..phi_{n-1}.
  {
    const std::size_t m = n - 1;
    std::vector<double> sub(m), diag(m), sup(m), rhs(m);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;  // node index
      diag[k] = (w[i] + w[i - 1]) / (h * h);
      sub[k] = -w[i - 1] / (h * h);
      sup[k] = -w[i] / (h * h);
      rhs[k] = (w[i] - w[i - 1]) / h;
    }
    std::vector<double> c(m), x(m);
    double denom = diag[0];
    x[0] = rhs[0] / denom;
    for (std::size_t k = 1; k < m; ++k) {
      c[k] = sup[k - 1] / denom;
      denom = diag[k] - sub[k] * c[k];
      x[k] = (rhs[k] - sub[k] * x[k - 1]) / denom;
    }
    for (std::size_t k = m - 1; k-- > 0;) x[k] -= c[k + 1] * x[k + 1];
    std::vector<double> phi(n, 0.0);
    for (std::size_t k = 0; k < m; ++k) phi[k + 1] = x[k];
    out.euler_lagrange = energy(phi);
    out.dchi.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.dchi[i] = (phi[i + 1 == n ? 0 : i + 1] - phi[i]) / h;
  }
  // Variational: conjugate gradients on the quadratic form over mean-zero phi.
  {
    // grad/2 of Q(phi) = S phi + g with S the weighted Laplacian and g_i = (w_{i-1} - w_i)/h.
    const auto apply_s = [&](const std::vector<double>& v) {
      std::vector<double> r(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = i + 1 == n ? 0 : i + 1;
        const std::size_t im = i == 0 ? n - 1 : i - 1;
        r[i] = (w[i] * (v[i] - v[ip]) + w[im] * (v[i] - v[im])) / (h * h);
      }
      return r;
    };
    std::vector<double> phi(n, 0.0), r(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = i == 0 ? n - 1 : i - 1;
      r[i] = (w[i] - w[im]) / h;  // -(S phi + g) at phi = 0
    }
    d = r;
    double rr = dot(r, r);
    const double r0 = std::sqrt(rr);
    std::size_t it = 0;
    for (; it < 4 * n && std::sqrt(rr) > 1e-13 * r0; ++it) {
      const auto sd = apply_s(d);
      const double step = rr / dot(d, sd);
      for (std::size_t i = 0; i < n; ++i) {
        phi[i] += step * d[i];
        r[i] -= step * sd[i];
      }
      // Keep the iterate in the mean-zero subspace.
      double mean = 0.0;
      for (double v : r) mean += v;
      mean /= static_cast<double>(n);
      for (auto& v : r) v -= mean;
      const double rr_new = dot(r, r);
      for (std::size_t i = 0; i < n; ++i) d[i] = r[i] + (rr_new / rr) * d[i];
      rr = rr_new;
    }
    out.cg_iterations = it;
    out.variational = energy(phi);
  }
  // Closed form: the minimizing flux is constant, A = 1 / M[exp(2V) / a].
  const MediumModel& model = medium.model();
  out.harmonic_mean = 1.0 / average(model, [](const FieldSample& f) { return std::exp(2.0 * f.V) / f.a; },
                                    Measure::mu);
  // Cauchy-Schwarz against the constraint M_mu[1 + D phi] = 1.
  out.lower_bound =
      1.0 / average(model, [](const FieldSample& f) { return std::exp(4.0 * f.V) / f.a; }, Measure::pi);
  out.upper_bound = average(model, [](const FieldSample& f) { return f.a; }, Measure::pi);
  return out;
}

double interpolate_midpoints(const std::vector<double>& values, double period, double p) {
  const std::size_t n = values.size();
  double x = p / period * static_cast<double>(n) - 0.5;
  x -= std::floor(x / static_cast<double>(n)) * static_cast<double>(n);
  std::size_t i = static_cast<std::size_t>(x);
  const double t = x - static_cast<double>(i);
  i %= n;
  const std::size_t j = (i + 1) % n;
  return values[i] + t * (values[j] - values[i]);
}

CorrectorSolution corrector_solve(const Medium& medium, const JumpKernel* kernel, double eps, std::size_t n) {
  const auto gen = DiscreteGenerator::assemble(medium, kernel, eps, n);
  const auto b = gen.sample([](const FieldSample& f) { return f.b; });
  CorrectorSolution out;
  out.eps = eps;
  out.lambda = eps * eps;
  auto sol = solve_resolvent(gen, out.lambda, b);
  out.u = std::move(sol.u);
  const double h = gen.step();
  out.du.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.du[i] = (out.u[i + 1 == n ? 0 : i + 1] - out.u[i]) / h;
  const auto eff = effective_A(medium, n);
  out.xi = eff.dchi;
  out.A = eff.value();
  out.e2u2 = out.lambda * gen.inner_pi(out.u, out.u);
  double dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = out.du[i] - out.xi[i];
    dev += gen.midpoint_pi_weights()[i] * d * d;
  }
  out.grad_dev = std::sqrt(dev);
  out.bd = gen.form_d(out.u, out.u);
  out.bj = gen.has_jumps() ? gen.jump_factor() * gen.form_j(out.u, out.u) : 0.0;
  out.jump_energy = 2.0 * out.bj;
  return out;
}

ErgodicLimitReport resolvent_ergodic_limit(const Medium& medium, const JumpKernel* kernel, const FieldFunctional& f,
                                           const std::vector<double>& eps_list, std::size_t n) {
  ErgodicLimitReport out;
  const double target = average(medium.model(), f, Measure::pi);
  out.estimate_holds = true;
  out.weighted_estimate_holds = true;
  for (const double eps : eps_list) {
    const auto gen = DiscreteGenerator::assemble(medium, kernel, eps, n);
    const auto fv = gen.sample(f);
    const double lambda = eps;
    const auto sol = solve_resolvent(gen, lambda, fv);
    ErgodicLimitRow row;
    row.eps = eps;
    row.lambda = lambda;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = lambda * sol.u[i] - target;
    row.deviation = std::sqrt(gen.inner_pi(d, d));
    const double jump = gen.has_jumps() ? 2.0 * gen.jump_factor() * gen.form_j(sol.u, sol.u) : 0.0;
    row.estimate_lhs = lambda * gen.gradient_norm2(sol.u) + 0.5 * lambda * jump;
    row.estimate_lhs_weighted = lambda * 2.0 * gen.form_d(sol.u, sol.u) + lambda * jump;
    row.estimate_rhs = gen.inner_pi(fv, fv);
    out.estimate_holds = out.estimate_holds && row.estimate_lhs <= row.estimate_rhs;
    out.weighted_estimate_holds = out.weighted_estimate_holds && row.estimate_lhs_weighted <= row.estimate_rhs;
    out.rows.push_back(row);
  }
  out.decreasing = true;
  for (std::size_t k = 1; k < out.rows.size(); ++k)
    out.decreasing = out.decreasing && out.rows[k].deviation < out.rows[k - 1].deviation;
  out.final_deviation = out.rows.empty() ? 0.0 : out.rows.back().deviation;
  return out;
}

}  // namespace levyhom
