#include "panobev/synthetic.hpp"

#include <stdexcept>

namespace panobev {

void validate(const SyntheticScene& scene) {
  validate(scene.overhead);
  if (scene.overhead.width != scene.overhead.height) {
    throw std::invalid_argument("SyntheticScene: overhead texture must be square");
  }
  if (!(scene.ground_res_m > 0.0)) {
    throw std::invalid_argument("SyntheticScene: ground_res_m must be positive");
  }
  if (static_cast<int>(scene.sky_color.size()) != scene.overhead.channels) {
    throw std::invalid_argument("SyntheticScene: sky_color must have one entry per channel");
  }
  validate(scene.rig);
}

ImageBuffer render_synthetic_panorama(const SyntheticScene& scene, const PanoramaSpec& pano) {
  validate(scene);
  validate(pano);

  const BevPlaneSpec tex_plane{scene.overhead.width, scene.ground_res_m};
  const SamplingMode mode{SampleFilter::bilinear, HorizontalEdge::clamp};

  ImageBuffer out(pano.width_px, pano.height_px, scene.overhead.channels);
  for (int v = 0; v < pano.height_px; ++v) {
    for (int u = 0; u < pano.width_px; ++u) {
      const auto ground = pano_pixel_to_ground(v, u, pano, scene.rig);
      bool sky = !ground.has_value();
      BevPixel tex{};
      if (!sky) {
        tex = ground_to_bev_pixel(*ground, tex_plane);
        sky = !tex.in_bounds;
      }
      for (int ch = 0; ch < out.channels; ++ch) {
        out.at(v, u, ch) = sky ? scene.sky_color[ch]
                               : sample_image(scene.overhead, tex.i, tex.j, ch, mode);
      }
    }
  }
  return out;
}

}  // namespace panobev
