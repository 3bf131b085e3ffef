#include "levyhom/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "levyhom/error.hpp"

namespace levyhom {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ConfigError("config field '" + path + "': " + what);
}

void reject_unknown(const ordered_json& j, const std::string& path, const std::set<std::string>& known) {
  if (!j.is_object()) field_error(path, "expected an object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) field_error(path.empty() ? k : path + "." + k, "unknown key");
}

double number(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(path, "not finite");
  return v;
}

double number_or(const ordered_json& j, const std::string& key, const std::string& path, double fallback) {
  return j.contains(key) ? number(j.at(key), path + "." + key) : fallback;
}

bool boolean_or(const ordered_json& j, const std::string& key, const std::string& path, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) field_error(path + "." + key, "expected true or false");
  return j.at(key).get<bool>();
}

std::string string_or(const ordered_json& j, const std::string& key, const std::string& path,
                      const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) field_error(path + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

std::vector<double> numbers(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::size_t count(const ordered_json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) field_error(path, "expected a non-negative integer");
  const auto v = j.get<std::int64_t>();
  if (v < 0) field_error(path, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::vector<Harmonic> harmonics(const ordered_json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected an array of [k, cos, sin] triples");
  std::vector<Harmonic> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const auto& e = j[i];
    if (!e.is_array() || e.size() != 3) field_error(p, "expected [k, cos, sin]");
    if (!e[0].is_number_integer()) field_error(p + "[0]", "harmonic index must be an integer");
    Harmonic h;
    h.k = e[0].get<int>();
    h.cos_coef = number(e[1], p + "[1]");
    h.sin_coef = number(e[2], p + "[2]");
    out.push_back(h);
  }
  return out;
}

ordered_json harmonics_json(const std::vector<Harmonic>& hs) {
  ordered_json a = ordered_json::array();
  for (const auto& h : hs) a.push_back({h.k, h.cos_coef, h.sin_coef});
  return a;
}

MediumSpec medium_from(const ordered_json& j, const std::string& path) {
  reject_unknown(j, path, {"period", "fourier_V", "fourier_loga", "fourier_a", "fourier_inva", "normalize_V"});
  MediumSpec s;
  s.period = number_or(j, "period", path, 1.0);
  if (j.contains("fourier_V")) s.fourier_V = harmonics(j.at("fourier_V"), path + ".fourier_V");
  int forms = 0;
  if (j.contains("fourier_loga")) {
    s.fourier_a = harmonics(j.at("fourier_loga"), path + ".fourier_loga");
    s.a_form = ConductivityForm::exponential;
    ++forms;
  }
  if (j.contains("fourier_a")) {
    s.fourier_a = harmonics(j.at("fourier_a"), path + ".fourier_a");
    s.a_form = ConductivityForm::direct;
    ++forms;
  }
  if (j.contains("fourier_inva")) {
    s.fourier_a = harmonics(j.at("fourier_inva"), path + ".fourier_inva");
    s.a_form = ConductivityForm::reciprocal;
    ++forms;
  }
  if (forms > 1) field_error(path, "give at most one of fourier_loga, fourier_a, fourier_inva");
  s.normalize_V = boolean_or(j, "normalize_V", path, true);
  try {
    s.validate();
  } catch (const ConfigError& e) {
    field_error(path, e.what());
  }
  return s;
}

ChiProfile chi_from(const ordered_json& j, const std::string& path) {
  reject_unknown(j, path, {"type", "amp", "width", "shift"});
  ChiProfile c;
  const std::string type = string_or(j, "type", path, "one");
  if (type == "one") c.type = ChiType::one;
  else if (type == "one_plus_gauss") c.type = ChiType::one_plus_gauss;
  else if (type == "one_plus_shifted_gauss") c.type = ChiType::one_plus_shifted_gauss;
  else if (type == "one_plus_cos") c.type = ChiType::one_plus_cos;
  else field_error(path + ".type", "unknown profile '" + type + "'");
  c.amp = number_or(j, "amp", path, 0.0);
  c.width = number_or(j, "width", path, 1.0);
  c.shift = number_or(j, "shift", path, 0.0);
  return c;
}

KernelSpec kernel_from(const ordered_json& j, const std::string& path) {
  reject_unknown(j, path, {"family", "alpha", "C", "cbar", "chi"});
  KernelSpec k;
  const std::string family = string_or(j, "family", path, "linear");
  if (family == "linear") k.family = KernelFamily::linear;
  else if (family == "tail_inverted") k.family = KernelFamily::tail_inverted;
  else field_error(path + ".family", "expected 'linear' or 'tail_inverted'");
  k.alpha = number_or(j, "alpha", path, 1.0);
  k.C = number_or(j, "C", path, 1.0);
  k.cbar = number_or(j, "cbar", path, 1.0);
  if (j.contains("chi")) k.chi = chi_from(j.at("chi"), path + ".chi");
  try {
    k.validate();
  } catch (const ConfigError& e) {
    field_error(path, e.what());
  }
  return k;
}

SimConfig sim_from(const ordered_json& j, const std::string& path) {
  reject_unknown(j, path, {"eps", "t_max", "dt_macro", "micro_step", "jump_floor", "small_jump_policy", "x0",
                           "start", "record_jumps"});
  SimConfig c;
  c.eps = number_or(j, "eps", path, c.eps);
  c.t_max = number_or(j, "t_max", path, c.t_max);
  c.dt_macro = number_or(j, "dt_macro", path, c.dt_macro);
  c.micro_step = number_or(j, "micro_step", path, c.micro_step);
  c.jump_floor = number_or(j, "jump_floor", path, c.jump_floor);
  const std::string policy = string_or(j, "small_jump_policy", path, "gaussian_correction");
  if (policy == "gaussian_correction") c.small_jump_policy = SmallJumpPolicy::gaussian_correction;
  else if (policy == "compensate_only") c.small_jump_policy = SmallJumpPolicy::compensate_only;
  else field_error(path + ".small_jump_policy", "expected 'gaussian_correction' or 'compensate_only'");
  c.x0 = number_or(j, "x0", path, 0.0);
  const std::string start = string_or(j, "start", path, "mu");
  if (start == "mu") c.start = PhaseLaw::mu;
  else if (start == "pi") c.start = PhaseLaw::pi;
  else field_error(path + ".start", "expected 'mu' or 'pi'");
  c.record_jumps = boolean_or(j, "record_jumps", path, false);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    field_error(path, e.what());
  }
  return c;
}

ordered_json parse_document(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t byte = std::min(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
    throw ConfigError("config syntax error at line " + std::to_string(line) + ": " + e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  medium.validate();
  if (kernel) kernel->validate();
  sim.validate();
  if (eps_list.empty()) field_error("eps_list", "must not be empty");
  for (const double e : eps_list)
    if (!(e > 0.0 && e <= 1.0)) field_error("eps_list", "entries must lie in (0, 1]");
  if (n_paths == 0) field_error("n_paths", "must be positive");
  if (grid < 64) field_error("grid", "at least 64 nodes");
  if (!(horizon > 0.0)) field_error("horizon", "must be positive");
  for (const double t : times)
    if (!(t > 0.0)) field_error("times", "entries must be positive");
  for (const double d : deltas)
    if (!(d > 0.0)) field_error("deltas", "entries must be positive");
  named_functional(ergodic_functional);
  named_jump_functional(jump_functional);
  if (triplet) triplet->validate();
}

ExperimentConfig parse_config(const std::string& text) {
  const ordered_json j = parse_document(text);
  reject_unknown(j, "", {"medium", "kernel", "sim", "tests", "eps_list", "u_grid", "n_paths", "grid", "horizon",
                         "times", "deltas", "ergodic_functional", "jump_functional", "triplet", "output_dir", "seed",
                         "workers"});
  ExperimentConfig c;
  if (!j.contains("medium")) field_error("medium", "required");
  c.medium = medium_from(j.at("medium"), "medium");
  if (j.contains("kernel") && !j.at("kernel").is_null()) c.kernel = kernel_from(j.at("kernel"), "kernel");
  if (j.contains("sim")) c.sim = sim_from(j.at("sim"), "sim");
  if (j.contains("tests")) {
    const auto& t = j.at("tests");
    if (!t.is_array()) field_error("tests", "expected an array of subcommand names");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!t[i].is_string()) field_error("tests[" + std::to_string(i) + "]", "expected a string");
      c.tests.push_back(t[i].get<std::string>());
    }
  }
  if (j.contains("eps_list")) c.eps_list = numbers(j.at("eps_list"), "eps_list");
  if (j.contains("u_grid")) {
    const auto& u = j.at("u_grid");
    if (u.is_object()) {
      reject_unknown(u, "u_grid", {"min", "max", "step"});
      const double lo = number_or(u, "min", "u_grid", -3.0), hi = number_or(u, "max", "u_grid", 3.0);
      const double step = number_or(u, "step", "u_grid", 0.25);
      if (!(step > 0.0) || hi < lo) field_error("u_grid", "need step > 0 and max >= min");
      const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
      for (long k = 0; k <= n; ++k) c.u_grid.push_back(lo + step * static_cast<double>(k));
    } else {
      c.u_grid = numbers(u, "u_grid");
    }
  }
  if (j.contains("n_paths")) c.n_paths = count(j.at("n_paths"), "n_paths");
  if (j.contains("grid")) c.grid = count(j.at("grid"), "grid");
  c.horizon = number_or(j, "horizon", "", c.horizon);
  if (j.contains("times")) c.times = numbers(j.at("times"), "times");
  if (j.contains("deltas")) c.deltas = numbers(j.at("deltas"), "deltas");
  c.ergodic_functional = string_or(j, "ergodic_functional", "", c.ergodic_functional);
  c.jump_functional = string_or(j, "jump_functional", "", c.jump_functional);
  if (j.contains("triplet")) {
    const auto& t = j.at("triplet");
    reject_unknown(t, "triplet", {"A", "theta_bar", "alpha"});
    LevyTriplet tr;
    tr.A = number_or(t, "A", "triplet", tr.A);
    tr.theta_bar = number_or(t, "theta_bar", "triplet", tr.theta_bar);
    tr.alpha = number_or(t, "alpha", "triplet", tr.alpha);
    c.triplet = tr;
  }
  c.output_dir = string_or(j, "output_dir", "", c.output_dir);
  if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(count(j.at("seed"), "seed"));
  if (j.contains("workers")) c.workers = static_cast<int>(count(j.at("workers"), "workers"));
  c.sim.seed = c.seed;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind("config field", 0) == 0) throw;
    throw ConfigError("config: " + what);
  }
  c.echo = j.dump();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

MediumSpec parse_medium_spec(const std::string& json_text) { return medium_from(parse_document(json_text), "medium"); }
KernelSpec parse_kernel_spec(const std::string& json_text) { return kernel_from(parse_document(json_text), "kernel"); }

std::string to_json(const MediumSpec& spec) {
  ordered_json j;
  j["period"] = spec.period;
  j["fourier_V"] = harmonics_json(spec.fourier_V);
  const char* key = spec.a_form == ConductivityForm::exponential ? "fourier_loga"
                    : spec.a_form == ConductivityForm::direct    ? "fourier_a"
                                                                 : "fourier_inva";
  j[key] = harmonics_json(spec.fourier_a);
  j["normalize_V"] = spec.normalize_V;
  return j.dump();
}

std::string to_json(const KernelSpec& spec) {
  static const char* chi_names[] = {"one", "one_plus_gauss", "one_plus_shifted_gauss", "one_plus_cos"};
  ordered_json j;
  j["family"] = spec.family == KernelFamily::linear ? "linear" : "tail_inverted";
  j["alpha"] = spec.alpha;
  j["C"] = spec.C;
  j["cbar"] = spec.cbar;
  j["chi"] = {{"type", chi_names[static_cast<int>(spec.chi.type)]},
              {"amp", spec.chi.amp},
              {"width", spec.chi.width},
              {"shift", spec.chi.shift}};
  return j.dump();
}

FieldFunctional named_functional(const std::string& name) {
  if (name == "a") return [](const FieldSample& f) { return f.a; };
  if (name == "exp_minus_2V") return [](const FieldSample& f) { return std::exp(-2.0 * f.V); };
  if (name == "b") return [](const FieldSample& f) { return f.b; };
  field_error("ergodic_functional", "unknown functional '" + name + "' (a, exp_minus_2V, b)");
}

std::function<double(double)> named_jump_functional(const std::string& name) {
  if (name == "h2") return [](double z) { return std::min(1.0, z * z); };
  if (name == "rational") return [](double z) { return z * z / (1.0 + z * z); };
  field_error("jump_functional", "unknown jump functional '" + name + "' (h2, rational)");
}

}  // namespace levyhom
