// Serial reference vs OpenMP ensemble on a heterogeneous medium with jumps.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <memory>

#include "levyhom/sde_sim.hpp"

using namespace levyhom;

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool identical(const EnsembleResult& a, const EnsembleResult& b) {
  if (a.paths.size() != b.paths.size()) return false;
  for (std::size_t i = 0; i < a.paths.size(); ++i)
    if (a.paths[i].values != b.paths[i].values || a.paths[i].njumps != b.paths[i].njumps) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n_paths = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 200;
  const int workers = resolve_workers(argc > 2 ? std::atoi(argv[2]) : 0);

  MediumSpec spec;
  spec.fourier_V = {{1, 0.3, 0.0}};
  spec.fourier_a = {{1, 0.2, 0.1}};
  auto model = std::make_shared<const MediumModel>(spec);
  SimConfig cfg;
  cfg.eps = 0.2;
  cfg.t_max = 1.0;
  cfg.micro_step = 1e-2;
  cfg.jump_floor = 0.05;
  const Simulator sim(model, JumpKernel::linear(model, 1.0, 1.0), cfg);

  EnsembleResult serial, parallel;
  const double ts = seconds([&] { serial = simulate_ensemble_serial(sim, n_paths); });
  const double tp = seconds([&] { parallel = simulate_ensemble(sim, n_paths, workers); });
  std::printf("paths=%zu workers=%d serial=%.3fs parallel=%.3fs speedup=%.2f identical=%s\n", n_paths, workers, ts, tp,
              ts / tp, identical(serial, parallel) ? "yes" : "no");
  return identical(serial, parallel) ? 0 : 1;
}
