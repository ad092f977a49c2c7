#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "panobev/geometry.hpp"
#include "panobev/image.hpp"
#include "panobev/manifest.hpp"

namespace panobev {

struct BenchmarkSpec {
  int scenes = 50;
  std::uint64_t seed = 0;
  PanoramaSpec pano{256, 512};
  double camera_height_m = 1.5;
  int texture_side = 256;
  double texture_res_m = 0.14;
};

/// Procedurally textured overhead scene: low-frequency background, a few
/// road stripes, and soft-edged blobs. Deterministic per seed.
ImageBuffer make_scene_texture(int side, std::uint64_t scene_seed);

/// Emits a desk-scale retrieval benchmark: per scene, a ground texture
/// ("satellite" reference) plus the panorama a camera at its center would
/// see, yaw-shifted by a random whole number of columns. The shift is
/// recorded in the manifest heading (degrees), so each query's sole
/// ground-truth reference is its own texture. Writes images/ and
/// manifest.jsonl under out_dir and returns the records. Identical specs
/// produce byte-identical trees.
std::vector<PairRecord> generate_synthetic_benchmark(const BenchmarkSpec& spec,
                                                     const std::filesystem::path& out_dir);

}  // namespace panobev
