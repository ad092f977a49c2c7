#include "panobev/descriptor.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace panobev {

namespace {
constexpr int kOrientationBins = 8;

inline int orientation_bin(double gy, double gx) {
  constexpr double kPi = std::numbers::pi;
  const double angle = std::atan2(gy, gx);  // [-pi, pi]
  int bin = static_cast<int>((angle + kPi) * kOrientationBins / (2.0 * kPi));
  if (bin >= kOrientationBins) bin = kOrientationBins - 1;  // angle == +pi
  if (bin < 0) bin = 0;
  return bin;
}
}  // namespace

int descriptor_length(int grid, int channels) {
  return grid * grid * (channels + kOrientationBins);
}

Eigen::VectorXd extract_descriptor(const ImageBuffer& img, int grid) {
  validate(img);
  if (grid < 1 || grid > img.width || grid > img.height) {
    throw std::invalid_argument("extract_descriptor: grid must be in [1, min(width, height)]");
  }

  const int cell_len = img.channels + kOrientationBins;
  Eigen::VectorXd desc = Eigen::VectorXd::Zero(descriptor_length(grid, img.channels));
  std::vector<double> cell_count(static_cast<std::size_t>(grid) * grid, 0.0);

  auto cell_of = [&](int r, int c) {
    const int gr = static_cast<int>(static_cast<long long>(r) * grid / img.height);
    const int gc = static_cast<int>(static_cast<long long>(c) * grid / img.width);
    return gr * grid + gc;
  };

  // Channel means.
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const int cell = cell_of(r, c);
      cell_count[cell] += 1.0;
      for (int ch = 0; ch < img.channels; ++ch) {
        desc[cell * cell_len + ch] += img.at(r, c, ch);
      }
    }
  }

  // Gradient orientation histograms on the luminance, interior pixels only.
  auto lum = [&](int r, int c) {
    double s = 0.0;
    for (int ch = 0; ch < img.channels; ++ch) s += img.at(r, c, ch);
    return s / img.channels;
  };
  for (int r = 1; r + 1 < img.height; ++r) {
    for (int c = 1; c + 1 < img.width; ++c) {
      const double gx = lum(r, c + 1) - lum(r, c - 1);
      const double gy = lum(r + 1, c) - lum(r - 1, c);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      const int cell = cell_of(r, c);
      desc[cell * cell_len + img.channels + orientation_bin(gy, gx)] += mag;
    }
  }

  for (int cell = 0; cell < grid * grid; ++cell) {
    const double n = cell_count[cell];
    if (n == 0.0) continue;
    for (int k = 0; k < cell_len; ++k) desc[cell * cell_len + k] /= n;
  }
  return desc;
}

}  // namespace panobev
