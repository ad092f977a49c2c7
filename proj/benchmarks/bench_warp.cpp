#include <benchmark/benchmark.h>

#include "panobev/geometry.hpp"
#include "panobev/rng.hpp"
#include "panobev/warp.hpp"

using namespace panobev;

static void BM_build_warp_map(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const BevPlaneSpec plane{l, 0.14};
  const CameraRig rig{1.5, 0.0};
  const PanoramaSpec pano{l, 2 * l};
  for (auto _ : state) {
    WarpMap map = build_warp_map(plane, rig, pano);
    benchmark::DoNotOptimize(map.entries.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(l) * l);
}
BENCHMARK(BM_build_warp_map)->Arg(128)->Arg(256)->Arg(512);

static void BM_apply_warp_bilinear(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const WarpMap map = build_warp_map({l, 0.14}, {1.5, 0.0}, {l, 2 * l});
  Rng rng(1);
  ImageBuffer pano(2 * l, l, 3);
  for (auto& s : pano.samples) s = static_cast<float>(rng.next_double());
  for (auto _ : state) {
    ImageBuffer bev = apply_warp(pano, map);
    benchmark::DoNotOptimize(bev.samples.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(l) * l);
}
BENCHMARK(BM_apply_warp_bilinear)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
