#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace panobev {

/// Square bird's-eye-view target plane: `side_px` pixels on each edge,
/// `res_m` meters of ground per pixel. The camera footpoint sits at
/// index (side_px/2, side_px/2); the physical half extent is
/// (side_px/2)*res_m meters.
struct BevPlaneSpec {
  int side_px = 512;
  double res_m = 0.14;
};

/// Camera pose on the ground plane: height above ground in meters and a
/// yaw offset (radians, added to every azimuth before panorama lookup)
/// for datasets whose panorama orientation is not north-aligned.
struct CameraRig {
  double height_m = 1.5;
  double yaw_offset = 0.0;
};

/// Equirectangular panorama raster: rows span pitch over [pi/2, -pi/2],
/// columns span azimuth over 2*pi.
struct PanoramaSpec {
  int height_px = 512;
  int width_px = 1024;
};

/// Point on the ground plane (z = 0), meters. x is east-positive,
/// y is up-positive on the displayed BEV (decreasing row index).
struct GroundPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Camera ray direction. pitch is 0 at the horizon and -pi/2 at nadir;
/// azimuth lies in (-pi, pi], measured from the +x axis toward +y.
struct RayAngles {
  double pitch = 0.0;
  double azimuth = 0.0;
};

/// Fractional panorama coordinates (row v, column u) in index space.
struct PanoPixel {
  double v = 0.0;
  double u = 0.0;
};

/// Fractional BEV coordinates plus an in-extent flag.
struct BevPixel {
  double i = 0.0;
  double j = 0.0;
  bool in_bounds = false;
};

/// Per-BEV-pixel source coordinates into a panorama, precomputed once and
/// reused across warps. Entries are stored row-major for an l x l plane.
/// For every valid entry src_v lies in [0, pano_height) and src_u in
/// [0, pano_width), already rounded to f32 with the bounds re-applied.
struct WarpMap {
  struct Entry {
    float src_v = 0.0f;
    float src_u = 0.0f;
    std::uint8_t valid = 0;
  };

  int size = 0;         // BEV side length l
  int pano_height = 0;  // h of the panorama the map was built for
  int pano_width = 0;   // w of the panorama the map was built for
  std::vector<Entry> entries;

  const Entry& at(int i, int j) const { return entries[static_cast<std::size_t>(i) * size + j]; }
};

void validate(const BevPlaneSpec& plane);
void validate(const CameraRig& rig);
void validate(const PanoramaSpec& pano);

/// Wraps an angle into (-pi, pi].
double normalize_azimuth(double angle);

/// BEV grid index -> ground point: x = (j - l/2)*r, y = (l/2 - i)*r.
/// Throws std::invalid_argument when (i, j) is outside the plane.
GroundPoint bev_pixel_to_ground(int i, int j, const BevPlaneSpec& plane);

/// Ground point -> camera ray: pitch = -atan(H / sqrt(x^2 + y^2)),
/// azimuth = atan2(y, x) + yaw_offset wrapped to (-pi, pi].
/// The singular footpoint (0, 0) returns (-pi/2, 0) by policy; the limit
/// of the pitch is -pi/2 from every direction and any azimuth samples the
/// same nadir row.
RayAngles ground_to_angles(const GroundPoint& p, const CameraRig& rig);

/// Camera ray -> fractional panorama coordinates:
/// v = (pi/2 - pitch)*h/pi, u = ((azimuth + pi)/(2*pi))*w.
/// u is reduced modulo w (the panorama is cyclic; u = w and u = 0 are the
/// same physical column) and v is clamped to [0, h) so that sampling the
/// nadir row stays in bounds.
PanoPixel angles_to_pano_pixel(const RayAngles& a, const PanoramaSpec& pano);

/// Exact inverse of bev_pixel_to_ground on the continuous plane:
/// j = x/r + l/2, i = l/2 - y/r. Points beyond the plane's physical
/// extent come back with in_bounds = false rather than an error.
BevPixel ground_to_bev_pixel(const GroundPoint& p, const BevPlaneSpec& plane);

/// Inverse ray cast for a panorama pixel. Rays at or above the horizon
/// (pitch >= 0) never meet the ground and yield std::nullopt ("sky");
/// otherwise the hit point is H/tan(-pitch) meters out along the azimuth.
std::optional<GroundPoint> pano_pixel_to_ground(double v, double u, const PanoramaSpec& pano,
                                                const CameraRig& rig);

/// Composes bev_pixel_to_ground -> ground_to_angles -> angles_to_pano_pixel
/// for every pixel of the plane. Deterministic; the singular center pixel
/// is marked valid and carries the nadir policy value.
WarpMap build_warp_map(const BevPlaneSpec& plane, const CameraRig& rig, const PanoramaSpec& pano);

}  // namespace panobev
