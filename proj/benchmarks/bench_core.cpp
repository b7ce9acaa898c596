#include <benchmark/benchmark.h>

#include "mplc/propagation.hpp"
#include "mplc/two_photon.hpp"
#include "mplc/unitary.hpp"
#include "mplc/wavefront_matching.hpp"

namespace {

constexpr double kWavelength = 810e-9;

void BM_Propagate256(benchmark::State& state) {
  const mplc::Grid grid(256, 256, 12.5e-6);
  const mplc::ComplexField spot = mplc::gaussian_spot(grid, 0.0, 0.0, 150e-6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mplc::propagate(spot, 76e-3, kWavelength));
  }
}
BENCHMARK(BM_Propagate256);

void BM_MplcForward(benchmark::State& state) {
  const mplc::Grid grid(256, 256, 12.5e-6);
  const mplc::MplcGeometry geo(grid, kWavelength, static_cast<int>(state.range(0)), 76e-3);
  const mplc::MaskStack stack(geo);
  const mplc::ComplexField spot = mplc::gaussian_spot(grid, 0.0, 300e-6, 150e-6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mplc::mplc_forward(spot, stack));
  }
}
BENCHMARK(BM_MplcForward)->Arg(5)->Arg(10);

void BM_DesignIteration(benchmark::State& state) {
  const mplc::Grid grid(128, 128, 12.5e-6);
  const mplc::MplcGeometry geo(grid, kWavelength, 5, 76e-3);
  const mplc::ModeSet spots = mplc::spot_column(grid, 4, 75e-6, 300e-6);
  mplc::DesignOptions options;
  options.iterations = 1;
  options.convergence_tolerance = 0.0;
  const mplc::UnitaryMatrix target = mplc::haar_random(4, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mplc::design(spots, spots, target, geo, options));
  }
}
BENCHMARK(BM_DesignIteration)->Unit(benchmark::kMillisecond);

void BM_HaarSample(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mplc::haar_random(static_cast<int>(state.range(0)), seed++));
  }
}
BENCHMARK(BM_HaarSample)->Arg(4)->Arg(16);

void BM_TwoPhotonEvolve(benchmark::State& state) {
  const mplc::TwoPhotonState input = mplc::pixel_entangled_state(2);
  const Eigen::MatrixXcd transfer = mplc::haar_random(4, 3).matrix();
  for (auto _ : state) {
    const mplc::TwoPhotonState out = mplc::evolve(input, transfer);
    benchmark::DoNotOptimize(mplc::coincidences_all_pairs(out));
  }
}
BENCHMARK(BM_TwoPhotonEvolve);

}  // namespace

BENCHMARK_MAIN();
