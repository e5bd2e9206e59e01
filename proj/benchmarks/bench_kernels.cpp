#include <benchmark/benchmark.h>

#include "sfs/camera.hpp"
#include "sfs/shading.hpp"
#include "sfs/solver.hpp"
#include "sfs/synth.hpp"

namespace {

using namespace sfs;

// Orthographic peaks scene of side n, set up one iteration into a solve.
struct Fixture {
  SyntheticScene scene;
  ModelInputs inputs;
  SolverConfig config;
  SolverState state;

  explicit Fixture(int n)
      : scene(make_scene(peaks_depth(n, CameraModel::orthographic()), CameraModel::orthographic(),
                         standard_lighting("l2"))),
        inputs(make_inputs(scene.grid, scene.camera, scene.image, scene.albedo, scene.lighting)) {
    config.weights = {1.0, 0.0, 0.0};
    state = initial_state(smooth_initialization(scene.z, 4.0), inputs, config);
  }
};

void BM_ThetaUpdate(benchmark::State& st) {
  Fixture fx(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(theta_update(fx.state, fx.inputs, fx.config));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(fx.scene.grid->size()));
}
BENCHMARK(BM_ThetaUpdate)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ZUpdate(benchmark::State& st) {
  Fixture fx(static_cast<int>(st.range(0)));
  fx.state.theta = theta_update(fx.state, fx.inputs, fx.config);
  for (auto _ : st) benchmark::DoNotOptimize(z_update(fx.state, fx.inputs, fx.config));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(fx.scene.grid->size()));
}
BENCHMARK(BM_ZUpdate)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Render(benchmark::State& st) {
  Fixture fx(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(render(fx.scene.normals, fx.scene.albedo, fx.scene.lighting));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(fx.scene.grid->size()));
}
BENCHMARK(BM_Render)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_Solve64(benchmark::State& st) {
  Fixture fx(64);
  fx.config.max_iterations = 50;
  const ScalarField z0 = fx.state.z;
  for (auto _ : st) benchmark::DoNotOptimize(solve(fx.inputs, z0, fx.config));
}
BENCHMARK(BM_Solve64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
