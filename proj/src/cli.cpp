#include "levyhom/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <cmath>

#include "CLI11.hpp"
#include "json.hpp"
#include "levyhom/config.hpp"
#include "levyhom/corrector.hpp"
#include "levyhom/error.hpp"
#include "levyhom/verify.hpp"

namespace levyhom {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON number with the same formatting as the CSVs; non-finite values become strings.
ordered_json num(double v) {
  if (!std::isfinite(v)) return fmt(v);
  return ordered_json::parse(fmt(v));
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << header << '\n';
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (const double v : values) {
      if (!first) out_ << ',';
      out_ << fmt(v);
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

struct Context {
  ExperimentConfig cfg;
  std::shared_ptr<const MediumModel> model;
  std::optional<JumpKernel> kernel;
  int workers = 1;
  fs::path out;
  std::vector<std::string> outputs;

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }
  void write_json(const std::string& name, const ordered_json& j) {
    std::ofstream f(file(name));
    f << j.dump(2) << '\n';
  }
  EnsembleSetup setup() const {
    EnsembleSetup s;
    s.model = model;
    s.kernel = kernel;
    s.sim = cfg.sim;
    s.n_paths = cfg.n_paths;
    s.workers = workers;
    s.grid = cfg.grid;
    return s;
  }
  Medium reference() const { return Medium(model, 0.0); }
  const JumpKernel* kernel_ptr() const { return kernel ? &*kernel : nullptr; }
  std::vector<double> u_grid() const { return cfg.u_grid.empty() ? default_u_grid() : cfg.u_grid; }
};

ordered_json interval_json(const stats::Interval& ci) { return {{"lo", num(ci.lo)}, {"hi", num(ci.hi)}}; }

ordered_json trend_json(const std::vector<TrendRow>& rows, const TrendVerdict& v) {
  ordered_json j;
  j["rows"] = ordered_json::array();
  for (const auto& r : rows)
    j["rows"].push_back({{"epsilon", num(r.eps)},
                         {"statistic", num(r.statistic)},
                         {"std_error", num(r.std_error)},
                         {"ci", interval_json(r.ci)}});
  j["monotone"] = v.monotone;
  j["separated"] = v.separated;
  j["pass"] = v.pass();
  return j;
}

void trend_csv(Context& ctx, const std::string& name, const std::vector<TrendRow>& rows) {
  Csv csv(ctx.file(name), "epsilon,statistic,ci_lo,ci_hi");
  for (const auto& r : rows) csv.row({r.eps, r.statistic, r.ci.lo, r.ci.hi});
}

// ------------------------------------------------------------- subcommands

bool cmd_validate(Context& ctx) {
  const auto report = validate_assumptions(ctx.reference(), ctx.kernel_ptr());
  std::ofstream(ctx.file("validation.json")) << report.to_json() << '\n';
  for (const auto& c : report.checks) std::cout << (c.passed ? "pass " : "FAIL ") << c.name << '\n';
  return report.all_passed();
}

bool cmd_simulate(Context& ctx) {
  const Simulator sim(ctx.model, ctx.kernel, ctx.cfg.sim);
  const auto ens = simulate_ensemble(sim, ctx.cfg.n_paths, ctx.workers);
  Csv paths(ctx.file("ensemble.csv"), "path,t,x,njumps");
  for (const auto& p : ens.paths)
    for (std::size_t k = 0; k < ens.times.size(); ++k)
      paths.row({static_cast<double>(p.index), ens.times[k], p.values[k], static_cast<double>(p.njumps[k])});
  if (ctx.cfg.sim.record_jumps) {
    Csv jumps(ctx.file("jumps.csv"), "path,t,mark,amplitude");
    for (const auto& p : ens.paths)
      for (const auto& j : p.jumps) jumps.row({static_cast<double>(p.index), j.t, j.mark, j.amplitude});
  }
  ordered_json j;
  j["n_paths"] = ctx.cfg.n_paths;
  j["micro_step"] = num(sim.micro_step());
  j["jump_floor"] = num(sim.jump_floor());
  j["jump_rate"] = num(sim.jump_rate());
  ctx.write_json("simulate.json", j);
  return true;
}

bool cmd_corrector(Context& ctx) {
  const Medium ref = ctx.reference();
  const auto A = effective_A(ref, ctx.cfg.grid);
  std::cout << "A = " << fmt(A.value()) << '\n';
  Csv csv(ctx.file("corrector.csv"), "epsilon,lambda,A,e2u2,Bd,Bj,deviation");
  ordered_json rows = ordered_json::array();
  for (const double eps : ctx.cfg.eps_list) {
    const auto s = corrector_solve(ref, ctx.kernel_ptr(), eps, ctx.cfg.grid);
    csv.row({s.eps, s.lambda, s.A, s.e2u2, s.bd, s.bj, s.grad_dev});
    rows.push_back({{"epsilon", num(s.eps)}, {"e2u2", num(s.e2u2)}, {"grad_dev", num(s.grad_dev)}});
  }
  const double rel = std::max(std::abs(A.variational - A.euler_lagrange), std::abs(A.harmonic_mean - A.euler_lagrange)) /
                     A.euler_lagrange;
  const bool bounds = A.lower_bound <= A.value() * (1 + 1e-8) && A.value() <= A.upper_bound * (1 + 1e-8);
  ordered_json j;
  j["A"] = {{"euler_lagrange", num(A.euler_lagrange)},
            {"variational", num(A.variational)},
            {"harmonic_mean", num(A.harmonic_mean)},
            {"lower_bound", num(A.lower_bound)},
            {"upper_bound", num(A.upper_bound)},
            {"cg_iterations", A.cg_iterations},
            {"max_relative_disagreement", num(rel)}};
  j["rows"] = rows;
  const bool pass = rel < 1e-8 && bounds;
  j["pass"] = pass;
  ctx.write_json("corrector.json", j);
  return pass;
}

LevyTriplet limit_triplet(const Context& ctx) {
  if (ctx.cfg.triplet) return *ctx.cfg.triplet;
  LevyTriplet t;
  t.A = effective_A(ctx.reference(), ctx.cfg.grid).value();
  t.theta_bar = ctx.kernel ? ctx.kernel->theta_bar() : 0.0;
  t.alpha = ctx.kernel ? ctx.kernel->alpha() : 1.0;
  return t;
}

bool cmd_exponent(Context& ctx) {
  const auto tr = limit_triplet(ctx);
  const auto u = ctx.u_grid();
  const auto phi = exponent(tr, u);
  Csv csv(ctx.file("exponent.csv"), "u,re_phi,im_phi");
  for (std::size_t k = 0; k < u.size(); ++k) csv.row({u[k], phi[k].real(), phi[k].imag()});
  const auto rep = triplet_report(tr, ctx.cfg.horizon);
  ordered_json j;
  j["triplet"] = {{"A", num(tr.A)}, {"theta_bar", num(tr.theta_bar)}, {"alpha", num(tr.alpha)}};
  j["stable_constant"] = num(stable_constant(tr.alpha));
  j["characteristics"] = {{"t", num(ctx.cfg.horizon)},
                          {"drift", num(rep.drift)},
                          {"gaussian", num(rep.gaussian)},
                          {"jump_intensity", num(rep.jump_intensity)},
                          {"h2_closed_form", num(rep.h2_closed_form)},
                          {"h2_quadrature", num(rep.h2_quadrature)},
                          {"compensator_slope", num(rep.compensator_slope)}};
  ctx.write_json("exponent.json", j);
  return true;
}

std::string eps_tag(double eps) { return fmt(eps); }

bool cmd_ecf(Context& ctx) {
  const auto sweep = ecf_sweep(ctx.setup(), ctx.cfg.eps_list, ctx.cfg.horizon, ctx.u_grid());
  ordered_json reports = ordered_json::array();
  for (const auto& r : sweep.reports) {
    Csv csv(ctx.file("ecf_eps" + eps_tag(r.eps) + ".csv"), "u,ecf_re,ecf_im,theory_re,theory_im,se");
    for (std::size_t k = 0; k < r.u.size(); ++k)
      csv.row({r.u[k], r.ecf_re[k], r.ecf_im[k], r.theory[k], 0.0, std::max(r.se_re[k], r.se_im[k])});
    reports.push_back({{"epsilon", num(r.eps)},
                       {"n", r.n},
                       {"sup_distance", num(r.sup_distance)},
                       {"sup_ci", interval_json(r.sup_ci)},
                       {"exceed", r.exceed},
                       {"points", r.u.size()},
                       {"pass", r.pass}});
  }
  trend_csv(ctx, "ecf_trend.csv", sweep.rows);
  const bool pass = !sweep.reports.empty() && sweep.reports.back().pass;
  ordered_json j;
  j["triplet"] = {{"A", num(sweep.triplet.A)}, {"theta_bar", num(sweep.triplet.theta_bar)},
                  {"alpha", num(sweep.triplet.alpha)}};
  j["t"] = num(ctx.cfg.horizon);
  j["reports"] = reports;
  j["trend"] = trend_json(sweep.rows, sweep.trend);
  j["pass"] = pass;
  ctx.write_json("ecf.json", j);
  return pass;
}

bool cmd_ergodic(Context& ctx) {
  const auto f = named_functional(ctx.cfg.ergodic_functional);
  const auto rep = ergodic_test(ctx.setup(), [f](double) { return f; }, f, ctx.cfg.horizon, ctx.cfg.eps_list);
  trend_csv(ctx, "ergodic.csv", rep.rows);
  ordered_json j;
  j["functional"] = ctx.cfg.ergodic_functional;
  j["T"] = num(rep.T);
  j["target"] = num(rep.target);
  j["trend"] = trend_json(rep.rows, rep.trend);
  j["pass"] = rep.trend.pass();
  ctx.write_json("ergodic.json", j);
  return rep.trend.pass();
}

bool cmd_jumps(Context& ctx) {
  const auto g = named_jump_functional(ctx.cfg.jump_functional);
  const auto rep = jump_functional_test(ctx.setup(), g, ctx.cfg.horizon, ctx.cfg.eps_list);
  trend_csv(ctx, "jumps.csv", rep.rows);
  const auto drift = drift_vanishing_test(ctx.setup(), ctx.cfg.eps_list);
  Csv dcsv(ctx.file("drift.csv"), "epsilon,g_sup,path_sup");
  for (const auto& r : drift.rows) dcsv.row({r.eps, r.g_sup, r.path_sup});
  ordered_json means = ordered_json::array();
  for (const double m : rep.means) means.push_back(num(m));
  ordered_json j;
  j["functional"] = ctx.cfg.jump_functional;
  j["t"] = num(rep.t);
  j["limit"] = num(rep.limit);
  j["means"] = means;
  j["trend"] = trend_json(rep.rows, rep.trend);
  j["drift_vanishing"] = {{"applicable", drift.applicable}, {"pass", drift.pass}};
  const bool pass = rep.trend.pass();
  j["pass"] = pass;
  ctx.write_json("jumps.json", j);
  return pass;
}

bool cmd_compensator(Context& ctx) {
  const auto rep = compensator_test(ctx.setup(), ctx.cfg.horizon, ctx.cfg.eps_list);
  Csv csv(ctx.file("compensator.csv"), "epsilon,slope,se,target,relative_deviation");
  for (const auto& r : rep.rows) csv.row({r.eps, r.slope, r.std_error, rep.target, r.relative_deviation});
  const bool pass = rep.final_relative_deviation < 0.02;
  ordered_json j;
  j["A"] = num(rep.A);
  j["target"] = num(rep.target);
  j["decreasing"] = rep.decreasing;
  j["final_relative_deviation"] = num(rep.final_relative_deviation);
  j["pass"] = pass;
  ctx.write_json("compensator.json", j);
  return pass;
}

bool cmd_modulus(Context& ctx) {
  const auto rep = modulus_test(ctx.setup(), ctx.cfg.eps_list.back(), ctx.cfg.deltas);
  Csv csv(ctx.file("modulus.csv"), "delta,statistic,se,ratio");
  for (const auto& r : rep.rows) csv.row({r.delta, r.statistic, r.std_error, r.ratio});
  ordered_json j;
  j["epsilon"] = num(rep.eps);
  j["fitted_C"] = num(rep.fitted_C);
  j["spread"] = num(rep.spread);
  j["pass"] = rep.pass;
  ctx.write_json("modulus.json", j);
  return rep.pass;
}

bool cmd_invariance(Context& ctx) {
  const std::vector<PathFunctional> fs{{"a", named_functional("a")},
                                       {"exp_minus_2V", named_functional("exp_minus_2V")}};
  Csv csv(ctx.file("invariance.csv"), "epsilon,t,function,mean,se,target,z");
  bool pass = true;
  ordered_json rows = ordered_json::array();
  for (const double eps : ctx.cfg.eps_list) {
    const auto rep = invariance_test(ctx.setup(), eps, fs, ctx.cfg.times);
    pass = pass && rep.pass;
    for (const auto& r : rep.rows) {
      csv.row({r.eps, r.t, r.name == "a" ? 0.0 : 1.0, r.mean, r.std_error, r.target, r.z});
      rows.push_back({{"epsilon", num(r.eps)}, {"t", num(r.t)}, {"function", r.name}, {"z", num(r.z)}});
    }
  }
  ctx.write_json("invariance.json", {{"rows", rows}, {"pass", pass}});
  return pass;
}

// Runs a trend test for one eps at a time and merges the rows.
bool cmd_sweep(Context& ctx) {
  const std::vector<std::string> tests = ctx.cfg.tests.empty() ? std::vector<std::string>{"ergodic"} : ctx.cfg.tests;
  ordered_json merged;
  bool pass = true;
  for (const auto& name : tests) {
    std::vector<TrendRow> rows;
    for (const double eps : ctx.cfg.eps_list) {
      const std::vector<double> one{eps};
      if (name == "ergodic") {
        const auto f = named_functional(ctx.cfg.ergodic_functional);
        rows.push_back(ergodic_test(ctx.setup(), [f](double) { return f; }, f, ctx.cfg.horizon, one).rows.at(0));
      } else if (name == "ecf") {
        rows.push_back(ecf_sweep(ctx.setup(), one, ctx.cfg.horizon, ctx.u_grid()).rows.at(0));
      } else if (name == "jumps") {
        const auto g = named_jump_functional(ctx.cfg.jump_functional);
        rows.push_back(jump_functional_test(ctx.setup(), g, ctx.cfg.horizon, one).rows.at(0));
      } else if (name == "compensator") {
        const auto rep = compensator_test(ctx.setup(), ctx.cfg.horizon, one);
        const auto& r = rep.rows.at(0);
        TrendRow row;
        row.eps = eps;
        row.statistic = r.relative_deviation;
        row.std_error = r.std_error / rep.target;
        row.ci = {r.relative_deviation - 1.96 * row.std_error, r.relative_deviation + 1.96 * row.std_error};
        rows.push_back(row);
      } else {
        throw ConfigError("config field 'tests': '" + name + "' is not a sweepable test (ergodic, ecf, jumps, compensator)");
      }
    }
    const auto verdict = trend_verdict(rows);
    pass = pass && verdict.pass();
    trend_csv(ctx, "sweep_" + name + ".csv", rows);
    merged[name] = trend_json(rows, verdict);
  }
  merged["pass"] = pass;
  ctx.write_json("sweep.json", merged);
  return pass;
}

bool cmd_martingale(Context& ctx) {
  if (!ctx.kernel) throw ConfigError("config field 'kernel': the martingale test needs a kernel");
  const double L = ctx.model->period();
  const auto phi = [L](double p) { return std::sin(2.0 * std::numbers::pi * p / L); };
  const auto rep = jump_martingale_test(ctx.setup(), ctx.cfg.eps_list.back(), phi);
  const bool pass = rep.bound_holds && rep.mean_zero;
  ctx.write_json("martingale.json", {{"epsilon", num(rep.eps)},
                                     {"T", num(rep.T)},
                                     {"second_moment", num(rep.second_moment)},
                                     {"second_moment_se", num(rep.second_moment_se)},
                                     {"bound", num(rep.bound)},
                                     {"max_abs_z", num(rep.max_abs_z)},
                                     {"pass", pass}});
  return pass;
}

using Command = std::function<bool(Context&)>;

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"validate", cmd_validate},   {"simulate", cmd_simulate},       {"corrector", cmd_corrector},
      {"exponent", cmd_exponent},   {"ecf", cmd_ecf},                 {"ergodic", cmd_ergodic},
      {"jumps", cmd_jumps},         {"compensator", cmd_compensator}, {"modulus", cmd_modulus},
      {"sweep", cmd_sweep},         {"invariance", cmd_invariance},   {"martingale", cmd_martingale}};
  return table;
}

std::uint64_t parse_seed(const std::string& s) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("--seed: expected a non-negative integer, got '" + s + "'");
  }
}

int parse_workers(const std::string& s) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size() || v < 1) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("--workers: expected a positive integer, got '" + s + "'");
  }
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : commands()) n.push_back(k);
    return n;
  }();
  return names;
}

int run_subcommand(const std::string& subcommand, const std::string& config_path, const std::string& out_dir,
                   const std::string& seed, const std::string& workers) {
  Context ctx;
  try {
    const auto it = commands().find(subcommand);
    if (it == commands().end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
    ctx.cfg = load_config(config_path);
    if (!seed.empty()) ctx.cfg.seed = ctx.cfg.sim.seed = parse_seed(seed);
    ctx.workers = resolve_workers(!workers.empty() ? parse_workers(workers) : ctx.cfg.workers);
    ctx.out = out_dir.empty() ? fs::path(ctx.cfg.output_dir) : fs::path(out_dir);
    fs::create_directories(ctx.out);
    ctx.model = std::make_shared<const MediumModel>(ctx.cfg.medium);
    if (ctx.cfg.kernel) ctx.kernel = JumpKernel::from_spec(ctx.model, *ctx.cfg.kernel);
    std::ofstream(ctx.file("config.json")) << ordered_json::parse(ctx.cfg.echo).dump(2) << '\n';

    const auto start = std::chrono::steady_clock::now();
    const bool pass = it->second(ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ordered_json manifest;
    manifest["tool"] = "levy-homogenize";
    manifest["version"] = kVersion;
    manifest["subcommand"] = subcommand;
    manifest["config"] = ordered_json::parse(ctx.cfg.echo);
    manifest["seed"] = ctx.cfg.seed;
    manifest["workers"] = ctx.workers;
    manifest["outputs"] = ctx.outputs;
    manifest["wall_time_s"] = wall;
    manifest["verdict"] = pass ? "pass" : "fail";
    std::ofstream(ctx.out / "manifest.json") << manifest.dump(2) << '\n';
    std::cout << subcommand << ": " << (pass ? "pass" : "fail") << '\n';
    return pass ? exit_pass : exit_runtime;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "runtime error in " << subcommand << ": " << e.what() << '\n';
    return exit_runtime;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Homogenization experiments for Levy-driven SDEs in a periodic random medium"};
  app.set_version_flag("--version", kVersion);
  std::string subcommand, config_path, out_dir, seed, workers;
  app.add_option("subcommand", subcommand, "One of: validate simulate corrector exponent ecf ergodic jumps "
                                           "compensator modulus sweep invariance martingale")
      ->required();
  app.add_option("config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "Output directory (default: config output_dir)");
  app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--workers", workers, "Worker threads (fallback: LEVY_HOMOGENIZE_WORKERS)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_config;
  }
  return run_subcommand(subcommand, config_path, out_dir, seed, workers);
}

}  // namespace levyhom
