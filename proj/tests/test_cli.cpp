#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "levyhom/cli.hpp"
#include "levyhom/config.hpp"
#include "levyhom/error.hpp"

using namespace levyhom;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "levyhom_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& sub, const fs::path& cfg, const fs::path& out, const std::string& seed = "",
        const std::string& workers = "") {
  return run_subcommand(sub, cfg.string(), out.string(), seed, workers);
}

const char* kFlat = R"({"medium": {"period": 1.0}, "n_paths": 64, "sim": {"t_max": 1, "dt_macro": 0.25}})";

const char* kWavy = R"({
  "medium": {"fourier_V": [[1, 0.3, 0.0]], "fourier_loga": [[1, 0.25, 0.0]]},
  "kernel": {"family": "linear", "C": 1.0, "alpha": 1.0},
  "sim": {"t_max": 1, "dt_macro": 0.0625, "micro_step": 0.01, "jump_floor": 0.05, "record_jumps": true},
  "n_paths": 40, "eps_list": [0.4, 0.2, 0.1], "grid": 256, "seed": 5
})";

}  // namespace

TEST_CASE("config diagnostics") {
  CHECK_THROWS_WITH_AS(parse_config("{\n  \"medium\": {\n  \"period\": 1,,\n}"), doctest::Contains("line 3"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"medium": {}, "n_path": 3})"), doctest::Contains("'n_path'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"medium": {"fourier_V": [[1, "x", 0]]}})"),
                       doctest::Contains("medium.fourier_V[0][1]"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"medium": {}, "sim": {"eps": 3}})"), doctest::Contains("sim"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"kernel": {}})"), ConfigError);
  const auto c = parse_config(R"({"medium": {}, "u_grid": {"min": -1, "max": 1, "step": 0.5}, "seed": 12})");
  CHECK(c.u_grid.size() == 5);
  CHECK(c.sim.seed == 12);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  CHECK(run("validate", write_config(dir, kFlat), dir / "out") == exit_pass);
  const auto report = nlohmann::json::parse(slurp(dir / "out" / "validation.json"));
  CHECK(report["all_passed"] == true);
  CHECK(fs::exists(dir / "out" / "manifest.json"));
  CHECK(run("validate", write_config(dir, "{ nope"), dir / "out") == exit_config);
  CHECK(run("frobnicate", write_config(dir, kFlat), dir / "out") == exit_config);
  CHECK(run("validate", dir / "missing.json", dir / "out") == exit_config);
  CHECK(run("validate", write_config(dir, kFlat), dir / "out", "abc") == exit_config);
  // A non-conforming kernel fails validation with exit 1.
  CHECK(run("validate",
            write_config(dir, R"({"medium": {}, "kernel": {"family": "tail_inverted",
              "chi": {"type": "one_plus_shifted_gauss", "amp": 0.5, "width": 1, "shift": 0.7}}})"),
            dir / "out") == exit_runtime);
  const char* argv[] = {"levy-homogenize"};
  CHECK(run_cli(1, const_cast<char**>(argv)) == exit_config);
}

TEST_CASE("corrector subcommand reproduces the harmonic-mean oracle") {
  const auto dir = scratch("corrector");
  const auto cfg = write_config(dir, R"({"medium": {"fourier_a": [[0, 1.0, 0.0], [1, 0.5, 0.0]]},
                                         "grid": 4096, "eps_list": [0.2]})");
  CHECK(run("corrector", cfg, dir / "out") == exit_pass);
  const auto j = nlohmann::json::parse(slurp(dir / "out" / "corrector.json"));
  CHECK(std::abs(j["A"]["euler_lagrange"].get<double>() - std::sqrt(0.75)) < 1e-4);
  CHECK(slurp(dir / "out" / "corrector.csv").rfind("epsilon,lambda,A,e2u2,Bd,Bj,deviation\n", 0) == 0);
}

TEST_CASE("exponent subcommand") {
  const auto dir = scratch("exponent");
  const auto cfg = write_config(dir, R"({"medium": {}, "triplet": {"A": 2, "theta_bar": 0, "alpha": 1},
                                         "u_grid": [0, 1, 2]})");
  CHECK(run("exponent", cfg, dir / "out") == exit_pass);
  CHECK(slurp(dir / "out" / "exponent.csv") == "u,re_phi,im_phi\n0,0,0\n1,-1,0\n2,-4,0\n");
}

TEST_CASE("outputs do not depend on the worker count") {
  const auto dir = scratch("determinism");
  const auto cfg = write_config(dir, kWavy);
  CHECK(run("simulate", cfg, dir / "w1", "", "1") == exit_pass);
  CHECK(run("simulate", cfg, dir / "w3", "", "3") == exit_pass);
  for (const char* f : {"ensemble.csv", "jumps.csv", "simulate.json", "config.json"})
    CHECK(slurp(dir / "w1" / f) == slurp(dir / "w3" / f));
  CHECK(slurp(dir / "w1" / "ensemble.csv").rfind("path,t,x,njumps\n", 0) == 0);
  CHECK(slurp(dir / "w1" / "jumps.csv").rfind("path,t,mark,amplitude\n", 0) == 0);
  // A different seed changes the output.
  CHECK(run("simulate", cfg, dir / "s9", "9", "1") == exit_pass);
  CHECK(slurp(dir / "w1" / "ensemble.csv") != slurp(dir / "s9" / "ensemble.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "s9" / "manifest.json"));
  CHECK(manifest["seed"] == 9);
}

TEST_CASE("sweep concatenates single-eps runs") {
  const auto dir = scratch("sweep");
  const auto cfg = write_config(dir, kWavy);
  run("sweep", cfg, dir / "sweep");
  run("ergodic", cfg, dir / "full");
  const auto merged = nlohmann::json::parse(slurp(dir / "sweep" / "sweep.json"));
  const auto full = nlohmann::json::parse(slurp(dir / "full" / "ergodic.json"));
  REQUIRE(merged["ergodic"]["rows"].size() == 3);
  CHECK(merged["ergodic"]["rows"] == full["trend"]["rows"]);
}

TEST_CASE("ecf on the pure Brownian configuration passes") {
  const auto dir = scratch("ecf");
  const auto cfg = write_config(dir, R"({"medium": {}, "n_paths": 10000, "eps_list": [0.5],
                                         "sim": {"t_max": 1, "dt_macro": 0.5, "micro_step": 0.01}})");
  CHECK(run("ecf", cfg, dir / "out") == exit_pass);
  const auto text = slurp(dir / "out" / "ecf_eps0.5.csv");
  CHECK(text.rfind("u,ecf_re,ecf_im,theory_re,theory_im,se\n", 0) == 0);
  CHECK(fs::exists(dir / "out" / "ecf_trend.csv"));
}
