#pragma once

#include <cstdint>
#include <vector>

namespace panobev {

/// Row-major raster with interleaved channels and intensities in [0, 1].
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> samples;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, int ch, float fill = 0.0f);

  float at(int r, int c, int ch) const {
    return samples[(static_cast<std::size_t>(r) * width + c) * channels + ch];
  }
  float& at(int r, int c, int ch) {
    return samples[(static_cast<std::size_t>(r) * width + c) * channels + ch];
  }
  std::size_t sample_count() const { return samples.size(); }
  bool same_shape(const ImageBuffer& other) const {
    return width == other.width && height == other.height && channels == other.channels;
  }
};

/// Throws std::invalid_argument unless the buffer satisfies its invariants
/// (1 or 3 channels, sample count matching the shape, all values finite
/// and inside [0, 1]).
void validate(const ImageBuffer& img);

enum class SampleFilter { nearest, bilinear };

/// Horizontal boundary handling; vertical access always clamps.
enum class HorizontalEdge { wrap, clamp };

struct SamplingMode {
  SampleFilter filter = SampleFilter::bilinear;
  HorizontalEdge horizontal = HorizontalEdge::wrap;
};

/// Samples channel `ch` at fractional (row v, column u) in index space
/// (integer coordinates land exactly on pixels).
float sample_image(const ImageBuffer& img, double v, double u, int ch, const SamplingMode& mode);

/// Round-half-up conversion used for all 8-bit on-disk output.
std::uint8_t to_u8(float value);
float from_u8(std::uint8_t value);

}  // namespace panobev
