#include "panobev/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace panobev {

ImageBuffer::ImageBuffer(int w, int h, int ch, float fill)
    : width(w), height(h), channels(ch),
      samples(static_cast<std::size_t>(w) * h * ch, fill) {}

void validate(const ImageBuffer& img) {
  if (img.width < 1 || img.height < 1) {
    throw std::invalid_argument("ImageBuffer: empty image");
  }
  if (img.channels != 1 && img.channels != 3) {
    throw std::invalid_argument("ImageBuffer: channels must be 1 or 3, got " +
                                std::to_string(img.channels));
  }
  const std::size_t expected =
      static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (img.samples.size() != expected) {
    throw std::invalid_argument("ImageBuffer: sample count does not match shape");
  }
  for (float s : img.samples) {
    if (!std::isfinite(s) || s < 0.0f || s > 1.0f) {
      throw std::invalid_argument("ImageBuffer: sample outside [0, 1]");
    }
  }
}

namespace {

inline int clamp_index(int idx, int size) { return std::clamp(idx, 0, size - 1); }

inline int wrap_index(int idx, int size) {
  int m = idx % size;
  if (m < 0) m += size;
  return m;
}

inline int resolve_col(int c, int width, HorizontalEdge edge) {
  return edge == HorizontalEdge::wrap ? wrap_index(c, width) : clamp_index(c, width);
}

}  // namespace

float sample_image(const ImageBuffer& img, double v, double u, int ch,
                   const SamplingMode& mode) {
  if (mode.filter == SampleFilter::nearest) {
    const int r = clamp_index(static_cast<int>(std::lround(v)), img.height);
    const int c = resolve_col(static_cast<int>(std::lround(u)), img.width, mode.horizontal);
    return img.at(r, c, ch);
  }

  const double vf = std::floor(v);
  const double uf = std::floor(u);
  const double fr = v - vf;
  const double fc = u - uf;
  const int r0 = clamp_index(static_cast<int>(vf), img.height);
  const int r1 = clamp_index(static_cast<int>(vf) + 1, img.height);
  const int c0 = resolve_col(static_cast<int>(uf), img.width, mode.horizontal);
  const int c1 = resolve_col(static_cast<int>(uf) + 1, img.width, mode.horizontal);

  const double top = (1.0 - fc) * img.at(r0, c0, ch) + fc * img.at(r0, c1, ch);
  const double bot = (1.0 - fc) * img.at(r1, c0, ch) + fc * img.at(r1, c1, ch);
  return static_cast<float>((1.0 - fr) * top + fr * bot);
}

std::uint8_t to_u8(float value) {
  const float scaled = std::floor(value * 255.0f + 0.5f);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0f, 255.0f));
}

float from_u8(std::uint8_t value) { return static_cast<float>(value) / 255.0f; }

}  // namespace panobev
