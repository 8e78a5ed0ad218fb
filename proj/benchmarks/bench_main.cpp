#include "hyso3/closed_loop.hpp"
#include "hyso3/potential.hpp"
#include "hyso3/random.hpp"
#include "hyso3/scenario.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

namespace {

using namespace hyso3;

PotentialParams fig_params() {
  return construct_params(Vec3(2, 4, 6).asDiagonal().toDenseMatrix(),
                          {0.9 * std::numbers::pi}, 0.875, 0.8);
}

RunConfig fig_run(const std::string& scenario, const std::string& name) {
  for (const RunConfig& rc : resolve_scenario(scenario).runs) {
    if (rc.name == name) return rc;
  }
  throw std::runtime_error("missing run " + name);
}

void BM_Potential(benchmark::State& state) {
  const PotentialParams p = fig_params();
  std::mt19937_64 rng(1);
  const Rotation r = random_rotation(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(potential(r, 0.3, p));
  }
}
BENCHMARK(BM_Potential);

void BM_GradientPair(benchmark::State& state) {
  const PotentialParams p = fig_params();
  std::mt19937_64 rng(2);
  const Rotation r = random_rotation(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grad_R_psi(r, 0.3, p));
    benchmark::DoNotOptimize(grad_theta(r, 0.3, p));
  }
}
BENCHMARK(BM_GradientPair);

void BM_MuU(benchmark::State& state) {
  const PotentialParams p = fig_params();
  std::mt19937_64 rng(3);
  const Rotation r = random_rotation(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mu_U(r, 0.3, p));
  }
}
BENCHMARK(BM_MuU);

void BM_ClosedLoopRk4Step(benchmark::State& state) {
  const auto kind = static_cast<ControllerKind>(state.range(0));
  const char* names[] = {"basic", "smooth", "velocity_free"};
  RunConfig rc = fig_run("fig4", names[state.range(0)]);
  rc.noise = false;
  const ClosedLoop loop(make_setup(rc));
  const VecX x = StateLayout::pack(kind, initial_loop_state(make_initial_conditions(rc)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(loop.normalize(rk4_step(loop, 0.0, x, 1e-3)));
  }
  state.SetLabel(names[state.range(0)]);
}
BENCHMARK(BM_ClosedLoopRk4Step)->DenseRange(0, 2);

void BM_Fig3Run(benchmark::State& state) {
  const RunConfig rc = fig_run("fig3", "gamma_7");
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(rc).report.jump_count);
  }
}
BENCHMARK(BM_Fig3Run)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
