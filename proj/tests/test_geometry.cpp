#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "panobev/geometry.hpp"
#include "panobev/rng.hpp"

using namespace panobev;

namespace {
constexpr double kPi = std::numbers::pi;

BevPlaneSpec random_plane(Rng& rng) {
  return {4 + 2 * static_cast<int>(rng.next_below(254)), rng.uniform(0.05, 0.5)};
}

PanoramaSpec random_pano(Rng& rng) {
  const int h = 8 + static_cast<int>(rng.next_below(1017));
  return {h, 2 * h};
}
}  // namespace

TEST_CASE("bev_pixel_to_ground matches the plane formula") {
  const BevPlaneSpec plane{512, 0.14};

  const GroundPoint corner = bev_pixel_to_ground(0, 0, plane);
  CHECK(corner.x == doctest::Approx(-35.84).epsilon(1e-12));
  CHECK(corner.y == doctest::Approx(35.84).epsilon(1e-12));

  const GroundPoint center = bev_pixel_to_ground(256, 256, plane);
  CHECK(center.x == 0.0);
  CHECK(center.y == 0.0);

  const GroundPoint east = bev_pixel_to_ground(256, 266, plane);
  CHECK(east.x == doctest::Approx(1.40).epsilon(1e-12));
  CHECK(east.y == 0.0);

  CHECK_THROWS_AS(bev_pixel_to_ground(-1, 0, plane), std::invalid_argument);
  CHECK_THROWS_AS(bev_pixel_to_ground(0, 512, plane), std::invalid_argument);
  CHECK_THROWS_AS(bev_pixel_to_ground(0, 0, BevPlaneSpec{1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(bev_pixel_to_ground(0, 0, BevPlaneSpec{4, -0.1}), std::invalid_argument);
}

TEST_CASE("ground_to_angles pitch and azimuth") {
  const CameraRig rig{1.5, 0.0};

  const RayAngles north = ground_to_angles({0.0, 1.5}, rig);
  CHECK(north.pitch == doctest::Approx(-kPi / 4).epsilon(1e-15));
  CHECK(north.azimuth == doctest::Approx(kPi / 2).epsilon(1e-15));

  const RayAngles nadir = ground_to_angles({0.0, 0.0}, rig);
  CHECK(nadir.pitch == -kPi / 2);
  CHECK(nadir.azimuth == 0.0);

  const RayAngles west = ground_to_angles({-1.5, 0.0}, rig);
  CHECK(west.pitch == doctest::Approx(-kPi / 4).epsilon(1e-15));
  CHECK(west.azimuth == doctest::Approx(kPi).epsilon(1e-15));

  CHECK_THROWS_AS(ground_to_angles({1.0, NAN}, rig), std::invalid_argument);
  CHECK_THROWS_AS(ground_to_angles({1.0, 1.0}, CameraRig{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("ground_to_angles applies and normalizes yaw offset") {
  const RayAngles a = ground_to_angles({0.0, 1.5}, CameraRig{1.5, kPi});
  // pi/2 + pi wraps to -pi/2
  CHECK(a.azimuth == doctest::Approx(-kPi / 2).epsilon(1e-12));
  CHECK(a.pitch == doctest::Approx(-kPi / 4).epsilon(1e-15));
}

TEST_CASE("angles_to_pano_pixel equirectangular mapping") {
  const PanoramaSpec pano{512, 1024};

  const PanoPixel mid = angles_to_pano_pixel({-kPi / 4, kPi / 2}, pano);
  CHECK(mid.v == doctest::Approx(384.0).epsilon(1e-12));
  CHECK(mid.u == doctest::Approx(768.0).epsilon(1e-12));

  const PanoPixel horizon = angles_to_pano_pixel({0.0, 0.0}, pano);
  CHECK(horizon.v == doctest::Approx(256.0).epsilon(1e-12));
  CHECK(horizon.u == doctest::Approx(512.0).epsilon(1e-12));

  const PanoPixel nadir_seam = angles_to_pano_pixel({-kPi / 2, kPi}, pano);
  CHECK(nadir_seam.v == doctest::Approx(512.0).epsilon(1e-12));
  CHECK(nadir_seam.v < 512.0);  // clamped just inside the last row
  CHECK(nadir_seam.u == 0.0);   // u = w wraps to the seam column

  CHECK_THROWS_AS(angles_to_pano_pixel({1.8, 0.0}, pano), std::invalid_argument);
}

TEST_CASE("ground_to_bev_pixel inverse and extent flag") {
  const BevPlaneSpec plane{512, 0.14};

  const BevPixel corner = ground_to_bev_pixel({-35.84, 35.84}, plane);
  CHECK(corner.i == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(corner.j == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(corner.in_bounds);

  const BevPixel center = ground_to_bev_pixel({0.0, 0.0}, plane);
  CHECK(center.i == 256.0);
  CHECK(center.j == 256.0);

  const BevPixel east = ground_to_bev_pixel({1.40, 0.0}, plane);
  CHECK(east.i == 256.0);
  CHECK(east.j == doctest::Approx(266.0).epsilon(1e-12));

  CHECK_FALSE(ground_to_bev_pixel({-40.0, 0.0}, plane).in_bounds);
  CHECK_FALSE(ground_to_bev_pixel({0.0, 36.0}, plane).in_bounds);
}

TEST_CASE("pixel round trip is exact for dyadic resolutions, tight otherwise") {
  Rng rng(41);
  for (double res : {0.25, 0.5, 1.0}) {
    const BevPlaneSpec plane{64, res};
    for (int i = 0; i < plane.side_px; ++i) {
      for (int j = 0; j < plane.side_px; ++j) {
        if (i == 32 && j == 32) continue;
        const BevPixel back = ground_to_bev_pixel(bev_pixel_to_ground(i, j, plane), plane);
        CHECK(back.i == static_cast<double>(i));
        CHECK(back.j == static_cast<double>(j));
        CHECK(back.in_bounds);
      }
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    const BevPlaneSpec plane = random_plane(rng);
    const int i = static_cast<int>(rng.next_below(plane.side_px));
    const int j = static_cast<int>(rng.next_below(plane.side_px));
    const BevPixel back = ground_to_bev_pixel(bev_pixel_to_ground(i, j, plane), plane);
    CHECK(std::abs(back.i - i) <= 1e-12 * plane.side_px);
    CHECK(std::abs(back.j - j) <= 1e-12 * plane.side_px);
  }
}

TEST_CASE("pano_pixel_to_ground ray casting") {
  const PanoramaSpec pano{512, 1024};
  const CameraRig rig{1.5, 0.0};

  const auto north = pano_pixel_to_ground(384.0, 768.0, pano, rig);
  REQUIRE(north.has_value());
  CHECK(north->x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(north->y == doctest::Approx(1.5).epsilon(1e-12));

  CHECK_FALSE(pano_pixel_to_ground(128.0, 5.0, pano, rig).has_value());   // pitch +pi/4
  CHECK_FALSE(pano_pixel_to_ground(256.0, 77.0, pano, rig).has_value());  // horizon exactly

  const auto nadir = pano_pixel_to_ground(512.0, 512.0, pano, rig);
  REQUIRE(nadir.has_value());
  CHECK(nadir->x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(nadir->y == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(pano_pixel_to_ground(-1.0, 0.0, pano, rig), std::invalid_argument);
  CHECK_THROWS_AS(pano_pixel_to_ground(0.0, 1024.0, pano, rig), std::invalid_argument);
}

TEST_CASE("inverse consistency: pano -> ground -> pano") {
  Rng rng(7);
  for (int trial = 0; trial < 3000; ++trial) {
    const PanoramaSpec pano = random_pano(rng);
    const CameraRig rig{rng.uniform(0.5, 3.0), 0.0};
    const double h = pano.height_px;
    const double w = pano.width_px;
    // strictly below the horizon so the ray lands
    const double v = rng.uniform(std::nextafter(h / 2.0, h), h);
    const double u = rng.uniform(0.0, w);
    if (u >= w) continue;

    const auto ground = pano_pixel_to_ground(v, u, pano, rig);
    if (!ground) continue;  // v within one ulp of the horizon can round to pitch 0
    const PanoPixel back = angles_to_pano_pixel(ground_to_angles(*ground, rig), pano);

    CHECK(std::abs(back.v - v) <= 1e-9 * h);
    double du = std::abs(back.u - u);
    du = std::min(du, w - du);  // seam wraps modulo w
    CHECK(du <= 1e-9 * w);
  }
}

TEST_CASE("radial monotonicity: farther ground points rise toward the horizon") {
  const CameraRig rig{1.5, 0.0};
  const PanoramaSpec pano{512, 1024};
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double d1 = rng.uniform(0.01, 50.0);
    const double d2 = d1 + rng.uniform(1e-5, 10.0);
    const double phi = rng.uniform(-kPi, kPi);
    const RayAngles a1 = ground_to_angles({d1 * std::cos(phi), d1 * std::sin(phi)}, rig);
    const RayAngles a2 = ground_to_angles({d2 * std::cos(phi), d2 * std::sin(phi)}, rig);
    CHECK(a2.pitch > a1.pitch);
    CHECK(angles_to_pano_pixel(a2, pano).v < angles_to_pano_pixel(a1, pano).v);
  }
}

TEST_CASE("azimuth equivariance under rotation about the origin") {
  const CameraRig rig{1.5, 0.0};
  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const double x = rng.uniform(-30.0, 30.0);
    const double y = rng.uniform(-30.0, 30.0);
    if (std::hypot(x, y) < 1e-6) continue;
    const double alpha = rng.uniform(-kPi, kPi);
    const GroundPoint rotated{x * std::cos(alpha) - y * std::sin(alpha),
                              x * std::sin(alpha) + y * std::cos(alpha)};
    const RayAngles a = ground_to_angles({x, y}, rig);
    const RayAngles b = ground_to_angles(rotated, rig);
    CHECK(std::abs(b.pitch - a.pitch) <= 1e-12);
    const double expected = normalize_azimuth(a.azimuth + alpha);
    double diff = std::abs(normalize_azimuth(b.azimuth - expected));
    diff = std::min(diff, 2 * kPi - diff);
    CHECK(diff <= 1e-9);
  }
}

TEST_CASE("warp map equals the per-pixel composition and stays in the lower half") {
  const BevPlaneSpec plane{4, 1.0};
  const CameraRig rig{1.0, 0.0};
  const PanoramaSpec pano{8, 16};
  const WarpMap map = build_warp_map(plane, rig, pano);

  REQUIRE(map.size == 4);
  REQUIRE(map.entries.size() == 16);
  const float v_max = std::nextafter(static_cast<float>(pano.height_px), 0.0f);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const PanoPixel px = angles_to_pano_pixel(
          ground_to_angles(bev_pixel_to_ground(i, j, plane), rig), pano);
      float ev = std::min(static_cast<float>(px.v), v_max);
      float eu = static_cast<float>(px.u);
      if (eu >= 16.0f) eu = 0.0f;
      const WarpMap::Entry& e = map.at(i, j);
      CHECK(e.valid == 1);
      CHECK(e.src_v == ev);
      CHECK(e.src_u == eu);
      CHECK(e.src_v >= pano.height_px / 2.0f);  // every ground ray is below the horizon
      CHECK(e.src_v < pano.height_px);
      CHECK(e.src_u >= 0.0f);
      CHECK(e.src_u < pano.width_px);
    }
  }
}

TEST_CASE("warp map center pixel carries the nadir policy value") {
  const BevPlaneSpec plane{8, 0.5};
  const PanoramaSpec pano{64, 128};
  const WarpMap map = build_warp_map(plane, CameraRig{1.5, 0.0}, pano);
  const WarpMap::Entry& center = map.at(4, 4);
  CHECK(center.valid == 1);
  CHECK(center.src_v == std::nextafter(64.0f, 0.0f));
  CHECK(center.src_u == 64.0f);  // azimuth 0 lands mid-width
}

TEST_CASE("warp map chain example at production scale") {
  const BevPlaneSpec plane{512, 0.14};
  const CameraRig rig{1.5, 0.0};
  const PanoramaSpec pano{512, 1024};
  const WarpMap map = build_warp_map(plane, rig, pano);

  // pixel (0,0): theta = -atan(1.5 / (35.84*sqrt(2))), phi = 3*pi/4
  const double theta = -std::atan(1.5 / std::hypot(35.84, 35.84));
  CHECK(theta == doctest::Approx(-0.029586).epsilon(1e-4));
  const double v = (kPi / 2 - theta) * 512 / kPi;
  const WarpMap::Entry& e = map.at(0, 0);
  CHECK(e.src_v == doctest::Approx(v).epsilon(1e-6));
  CHECK(e.src_u == doctest::Approx(896.0).epsilon(1e-6));  // (3pi/4 + pi)/(2pi) * 1024
}

TEST_CASE("normalize_azimuth wraps into (-pi, pi]") {
  CHECK(normalize_azimuth(kPi) == kPi);
  CHECK(normalize_azimuth(-kPi) == kPi);
  CHECK(normalize_azimuth(3 * kPi / 2) == doctest::Approx(-kPi / 2).epsilon(1e-12));
  CHECK(normalize_azimuth(-3 * kPi / 2) == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(normalize_azimuth(0.0) == 0.0);
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    const double a = rng.uniform(-50.0, 50.0);
    const double n = normalize_azimuth(a);
    CHECK(n > -kPi);
    CHECK(n <= kPi);
    CHECK(std::abs(std::remainder(n - a, 2 * kPi)) <= 1e-9);
  }
}
