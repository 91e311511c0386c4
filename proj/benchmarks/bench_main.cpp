#include <benchmark/benchmark.h>

#include <cmath>

#include "fewg/background.hpp"
#include "fewg/constants.hpp"
#include "fewg/coupling.hpp"
#include "fewg/modesolver.hpp"
#include "fewg/quantum.hpp"
#include "fewg/resonator.hpp"
#include "fewg/waveform.hpp"
#include "fewg/window.hpp"

using namespace fewg;

namespace {

// Single-core 2D guide at a coarse grid.
void BM_SolveModes(benchmark::State& state) {
  const MaterialLibrary lib;
  WaveguideGeometry g;
  g.core_width = 800e-9;
  g.core_thickness = 650e-9;
  GridSpec grid;
  grid.dx = grid.dy = state.range(0) * 1e-9;
  grid.margin = 1.5e-6;
  SolveOptions opt;
  opt.n_modes = 2;
  const double w = omega_from_wavelength(1.55e-6);
  for (auto _ : state) benchmark::DoNotOptimize(solve_modes(g, lib, w, grid, opt));
}
BENCHMARK(BM_SolveModes)->Arg(50)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_WindowTransform(benchmark::State& state) {
  double d = 0.0;
  for (auto _ : state) {
    d += 1e3;
    benchmark::DoNotOptimize(window_transform(WindowKind::Blackman, d, 50e-6));
  }
}
BENCHMARK(BM_WindowTransform);

void BM_PlanarInterface(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(planar_interface_density(1.444, 1.2e15, 0.75, 100e-9, 50e-6));
  }
}
BENCHMARK(BM_PlanarInterface)->Unit(benchmark::kMicrosecond);

void BM_SidebandProbabilities(benchmark::State& state) {
  const double G = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sideband_probabilities({{"TM00", 0.8 * G}, {"TE00", 0.2 * G}}));
  }
}
BENCHMARK(BM_SidebandProbabilities)->Arg(1)->Arg(100);

void BM_CombSusceptibility(benchmark::State& state) {
  ResonatorParams p;
  p.finesse = static_cast<double>(state.range(0));
  p.anchor_omega = 1.2e15;
  double w = 1.2e15;
  for (auto _ : state) {
    w += 1e7;
    benchmark::DoNotOptimize(comb_susceptibility(w, p));
  }
}
BENCHMARK(BM_CombSusceptibility)->Arg(10)->Arg(1000);

void BM_Waveform(benchmark::State& state) {
  const auto env = window_envelope(WindowKind::Blackman, 100e-6, 1024);
  WaveformOptions o;
  o.method = state.range(0) ? WaveformMethod::Kernel : WaveformMethod::Delta;
  const double c = constants::speed_of_light;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize_waveform(env, Routing(), 0.65 * c, 0.47 * c, 1e-18, 1.2e15, o));
  }
}
BENCHMARK(BM_Waveform)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
