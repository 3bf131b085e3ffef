#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levyhom/jump_kernel.hpp"
#include "levyhom/limit_law.hpp"
#include "levyhom/medium.hpp"
#include "levyhom/sde_sim.hpp"

namespace levyhom {

/// Everything one CLI invocation needs. Parsed from JSON; unknown keys are
/// rejected so that typos surface as config errors.
struct ExperimentConfig {
  MediumSpec medium;
  std::optional<KernelSpec> kernel;  // absent: no jumps
  SimConfig sim;
  std::vector<std::string> tests;  // used by `sweep`
  std::vector<double> eps_list{0.4, 0.2, 0.1};
  std::vector<double> u_grid;  // empty: default grid
  std::size_t n_paths = 1000;
  std::size_t grid = 1024;  // corrector nodes
  double horizon = 1.0;     // T for ergodic/ecf/compensator
  std::vector<double> times{0.25, 1.0};
  std::vector<double> deltas{0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  std::string ergodic_functional = "a";
  std::string jump_functional = "h2";
  std::optional<LevyTriplet> triplet;  // `exponent` override
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  int workers = 0;
  std::string echo;  // normalized JSON of the parsed input

  void validate() const;
};

/// Parses a config document. Syntax errors report the line; field errors
/// report the JSON path of the offending field. Both throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

MediumSpec parse_medium_spec(const std::string& json_text);
KernelSpec parse_kernel_spec(const std::string& json_text);
std::string to_json(const MediumSpec& spec);
std::string to_json(const KernelSpec& spec);

/// Named field functionals accepted by the config ("a", "exp_minus_2V", "b").
FieldFunctional named_functional(const std::string& name);
/// Named jump-functional integrands g with |g| <= min(1, z^2).
std::function<double(double)> named_jump_functional(const std::string& name);

}  // namespace levyhom
