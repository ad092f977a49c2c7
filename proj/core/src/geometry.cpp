#include "panobev/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace panobev {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

void validate(const BevPlaneSpec& plane) {
  if (plane.side_px < 2) {
    throw std::invalid_argument("BevPlaneSpec: side_px must be >= 2, got " +
                                std::to_string(plane.side_px));
  }
  if (!(plane.res_m > 0.0) || !std::isfinite(plane.res_m)) {
    throw std::invalid_argument("BevPlaneSpec: res_m must be positive and finite");
  }
}

void validate(const CameraRig& rig) {
  if (!(rig.height_m > 0.0) || !std::isfinite(rig.height_m)) {
    throw std::invalid_argument("CameraRig: height_m must be positive and finite");
  }
  if (!std::isfinite(rig.yaw_offset)) {
    throw std::invalid_argument("CameraRig: yaw_offset must be finite");
  }
}

void validate(const PanoramaSpec& pano) {
  if (pano.height_px < 2 || pano.width_px < 2) {
    throw std::invalid_argument("PanoramaSpec: height_px and width_px must be >= 2");
  }
}

double normalize_azimuth(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a <= -kPi) {
    a += kTwoPi;
  } else if (a > kPi) {
    a -= kTwoPi;
  }
  return a;
}

GroundPoint bev_pixel_to_ground(int i, int j, const BevPlaneSpec& plane) {
  validate(plane);
  if (i < 0 || i >= plane.side_px || j < 0 || j >= plane.side_px) {
    throw std::invalid_argument("bev_pixel_to_ground: index (" + std::to_string(i) + ", " +
                                std::to_string(j) + ") outside plane of side " +
                                std::to_string(plane.side_px));
  }
  const double half = plane.side_px / 2.0;
  return {(j - half) * plane.res_m, (half - i) * plane.res_m};
}

RayAngles ground_to_angles(const GroundPoint& p, const CameraRig& rig) {
  validate(rig);
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw std::invalid_argument("ground_to_angles: point must be finite");
  }
  if (p.x == 0.0 && p.y == 0.0) {
    return {-kPi / 2.0, 0.0};  // nadir policy
  }
  const double dist = std::hypot(p.x, p.y);
  const double pitch = -std::atan(rig.height_m / dist);
  const double azimuth = normalize_azimuth(std::atan2(p.y, p.x) + rig.yaw_offset);
  return {pitch, azimuth};
}

PanoPixel angles_to_pano_pixel(const RayAngles& a, const PanoramaSpec& pano) {
  validate(pano);
  if (!(a.pitch >= -kPi / 2.0 && a.pitch <= kPi / 2.0)) {
    throw std::invalid_argument("angles_to_pano_pixel: pitch outside [-pi/2, pi/2]");
  }
  const double h = pano.height_px;
  const double w = pano.width_px;

  double v = (kPi / 2.0 - a.pitch) * h / kPi;
  double u = ((a.azimuth + kPi) / kTwoPi) * w;

  u = std::fmod(u, w);
  if (u < 0.0) u += w;
  if (u >= w) u = 0.0;  // fmod can land on w after the negative fixup

  const double v_max = std::nextafter(h, 0.0);
  v = std::clamp(v, 0.0, v_max);
  return {v, u};
}

BevPixel ground_to_bev_pixel(const GroundPoint& p, const BevPlaneSpec& plane) {
  validate(plane);
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw std::invalid_argument("ground_to_bev_pixel: point must be finite");
  }
  const double half = plane.side_px / 2.0;
  const double extent = half * plane.res_m;
  BevPixel out;
  out.j = p.x / plane.res_m + half;
  out.i = half - p.y / plane.res_m;
  out.in_bounds = std::abs(p.x) <= extent && std::abs(p.y) <= extent;
  return out;
}

std::optional<GroundPoint> pano_pixel_to_ground(double v, double u, const PanoramaSpec& pano,
                                                const CameraRig& rig) {
  validate(pano);
  validate(rig);
  const double h = pano.height_px;
  const double w = pano.width_px;
  if (!(v >= 0.0 && v <= h) || !(u >= 0.0 && u < w)) {
    throw std::invalid_argument("pano_pixel_to_ground: coordinates out of range");
  }
  const double pitch = kPi / 2.0 - v * kPi / h;
  if (pitch >= 0.0) {
    return std::nullopt;  // at or above the horizon: the ray never lands
  }
  const double azimuth = u * kTwoPi / w - kPi - rig.yaw_offset;
  const double dist = rig.height_m / std::tan(-pitch);
  return GroundPoint{dist * std::cos(azimuth), dist * std::sin(azimuth)};
}

WarpMap build_warp_map(const BevPlaneSpec& plane, const CameraRig& rig, const PanoramaSpec& pano) {
  validate(plane);
  validate(rig);
  validate(pano);

  WarpMap map;
  map.size = plane.side_px;
  map.pano_height = pano.height_px;
  map.pano_width = pano.width_px;
  map.entries.resize(static_cast<std::size_t>(plane.side_px) * plane.side_px);

  const float v_max = std::nextafter(static_cast<float>(pano.height_px), 0.0f);
  const float w_f = static_cast<float>(pano.width_px);

  std::size_t idx = 0;
  for (int i = 0; i < plane.side_px; ++i) {
    for (int j = 0; j < plane.side_px; ++j, ++idx) {
      const GroundPoint p = bev_pixel_to_ground(i, j, plane);
      const RayAngles a = ground_to_angles(p, rig);
      const PanoPixel px = angles_to_pano_pixel(a, pano);

      // Narrowing to f32 can round up onto the exclusive bounds; re-apply them.
      float sv = std::min(static_cast<float>(px.v), v_max);
      float su = static_cast<float>(px.u);
      if (su >= w_f) su = 0.0f;

      map.entries[idx] = {sv, su, 1};
    }
  }
  return map;
}

}  // namespace panobev
