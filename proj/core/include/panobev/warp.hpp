#pragma once

#include <filesystem>

#include "panobev/geometry.hpp"
#include "panobev/image.hpp"

namespace panobev {

/// Resamples a panorama into the BEV plane described by the map. The
/// source must match the panorama dimensions the map was built for.
/// Output pixels are sampled at (src_v, src_u); invalid map entries
/// produce black. Inputs are never mutated.
ImageBuffer apply_warp(const ImageBuffer& src, const WarpMap& map,
                       const SamplingMode& mode = {});

/// Binary warp-map cache: magic "EPBW", version u32, then l, h, w as u32,
/// then l*l records of (src_v f32, src_u f32, valid u8), little-endian.
void save_warp_map(const std::filesystem::path& path, const WarpMap& map);
WarpMap load_warp_map(const std::filesystem::path& path);

}  // namespace panobev
