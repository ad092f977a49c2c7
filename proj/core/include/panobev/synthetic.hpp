#pragma once

#include <vector>

#include "panobev/geometry.hpp"
#include "panobev/image.hpp"

namespace panobev {

/// A flat textured world: a square overhead texture centered on the
/// camera footpoint plus a constant sky. The exact inverse model of the
/// ground-plane reprojection, used as the warp oracle.
struct SyntheticScene {
  ImageBuffer overhead;            // square texture, camera at its center
  double ground_res_m = 0.14;      // meters per texture pixel
  std::vector<float> sky_color;    // one entry per channel
  CameraRig rig;
};

void validate(const SyntheticScene& scene);

/// Renders the equirectangular panorama a camera at height H would see of
/// the textured ground plane. Every pixel casts a ray; rays at or above
/// the horizon and rays landing outside the texture extent get the sky
/// color, others sample the texture bilinearly (clamped).
ImageBuffer render_synthetic_panorama(const SyntheticScene& scene, const PanoramaSpec& pano);

}  // namespace panobev
