#include "panobev/pano_ops.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <string>

namespace panobev {

PaddedPanorama pad_panorama(const ImageBuffer& src, PadFill fill, double horizon_row_in_src) {
  validate(src);
  if (src.width % 2 != 0) {
    throw std::invalid_argument("pad_panorama: width must be even to form a 2:1 target");
  }
  const int target_h = src.width / 2;
  if (src.height > target_h) {
    throw std::invalid_argument("pad_panorama: source height " + std::to_string(src.height) +
                                " exceeds 2:1 target height " + std::to_string(target_h));
  }
  if (src.height == target_h) {
    return {src, 0};
  }

  const double horizon = horizon_row_in_src < 0.0 ? src.height / 2.0 : horizon_row_in_src;
  long top = std::llround(target_h / 2.0 - horizon);
  if (top < 0) top = 0;
  if (top > target_h - src.height) top = target_h - src.height;

  ImageBuffer out(src.width, target_h, src.channels, 0.0f);
  const std::size_t stride = static_cast<std::size_t>(src.width) * src.channels;

  if (fill == PadFill::replicate_black) {
    for (long r = 0; r < top; ++r) {
      std::memcpy(&out.samples[r * stride], &src.samples[0], stride * sizeof(float));
    }
  }
  for (int r = 0; r < src.height; ++r) {
    std::memcpy(&out.samples[(top + r) * stride], &src.samples[static_cast<std::size_t>(r) * stride],
                stride * sizeof(float));
  }
  return {std::move(out), static_cast<int>(top)};
}

ImageBuffer yaw_shift(const ImageBuffer& src, int delta_u) {
  validate(src);
  const int w = src.width;
  int delta = delta_u % w;
  if (delta < 0) delta += w;
  if (delta == 0) return src;

  ImageBuffer out(src.width, src.height, src.channels);
  for (int r = 0; r < src.height; ++r) {
    for (int c = 0; c < w; ++c) {
      const int sc = (c + delta) % w;
      for (int ch = 0; ch < src.channels; ++ch) {
        out.at(r, c, ch) = src.at(r, sc, ch);
      }
    }
  }
  return out;
}

ImageBuffer polar_transform(const ImageBuffer& sat, int out_h, int out_w) {
  validate(sat);
  if (sat.width != sat.height) {
    throw std::invalid_argument("polar_transform: input must be square, got " +
                                std::to_string(sat.width) + "x" + std::to_string(sat.height));
  }
  if (out_h < 1 || out_w < 1) {
    throw std::invalid_argument("polar_transform: output dimensions must be positive");
  }

  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double center = sat.width / 2.0;
  const SamplingMode mode{SampleFilter::bilinear, HorizontalEdge::clamp};

  ImageBuffer out(out_w, out_h, sat.channels);
  for (int ri = 0; ri < out_h; ++ri) {
    const double radius = center * (out_h - ri) / out_h;
    for (int ci = 0; ci < out_w; ++ci) {
      const double az = kTwoPi * ci / out_w;
      const double sx = center + radius * std::sin(az);
      const double sy = center - radius * std::cos(az);
      for (int ch = 0; ch < sat.channels; ++ch) {
        out.at(ri, ci, ch) = sample_image(sat, sy, sx, ch, mode);
      }
    }
  }
  return out;
}

}  // namespace panobev
