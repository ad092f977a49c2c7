#include "panobev/benchmark_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "panobev/pano_ops.hpp"
#include "panobev/png_io.hpp"
#include "panobev/rng.hpp"
#include "panobev/synthetic.hpp"

namespace panobev {

namespace {

inline double smoothstep(double edge0, double edge1, double x) {
  const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

struct Road {
  double px, py;      // point on the center line
  double nx, ny;      // unit normal
  double half_width;
  float color[3];
};

struct Blob {
  double cx, cy;
  double rx, ry;
  double cos_a, sin_a;
  float color[3];
};

}  // namespace

ImageBuffer make_scene_texture(int side, std::uint64_t scene_seed) {
  if (side < 8) throw std::invalid_argument("make_scene_texture: side must be >= 8");
  Rng rng(scene_seed);

  // Background: smooth two-color wash.
  float base_a[3], base_b[3];
  for (int ch = 0; ch < 3; ++ch) {
    base_a[ch] = static_cast<float>(rng.uniform(0.15, 0.75));
    base_b[ch] = static_cast<float>(rng.uniform(0.15, 0.75));
  }
  const double wave_x = rng.uniform(0.5, 1.5);
  const double wave_y = rng.uniform(0.5, 1.5);
  const double wave_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  const int n_roads = 1 + static_cast<int>(rng.next_below(3));
  std::vector<Road> roads(n_roads);
  for (Road& road : roads) {
    road.px = rng.uniform(0.2, 0.8) * side;
    road.py = rng.uniform(0.2, 0.8) * side;
    const double angle = rng.uniform(0.0, std::numbers::pi);
    road.nx = -std::sin(angle);
    road.ny = std::cos(angle);
    road.half_width = rng.uniform(0.015, 0.04) * side;
    const float gray = static_cast<float>(rng.uniform(0.25, 0.45));
    road.color[0] = road.color[1] = road.color[2] = gray;
  }

  const int n_blobs = 4 + static_cast<int>(rng.next_below(5));
  std::vector<Blob> blobs(n_blobs);
  for (Blob& blob : blobs) {
    blob.cx = rng.uniform(0.1, 0.9) * side;
    blob.cy = rng.uniform(0.1, 0.9) * side;
    blob.rx = rng.uniform(0.03, 0.11) * side;
    blob.ry = rng.uniform(0.03, 0.11) * side;
    const double rot = rng.uniform(0.0, std::numbers::pi);
    blob.cos_a = std::cos(rot);
    blob.sin_a = std::sin(rot);
    for (int ch = 0; ch < 3; ++ch) {
      blob.color[ch] = static_cast<float>(rng.uniform(0.1, 0.9));
    }
  }

  ImageBuffer img(side, side, 3);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const double fx = static_cast<double>(c) / side;
      const double fy = static_cast<double>(r) / side;
      const double s =
          0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * (wave_x * fx + wave_y * fy) + wave_phase);
      double px[3];
      for (int ch = 0; ch < 3; ++ch) px[ch] = base_a[ch] + s * (base_b[ch] - base_a[ch]);

      for (const Road& road : roads) {
        const double dist = std::abs((c - road.px) * road.nx + (r - road.py) * road.ny);
        const double alpha = 1.0 - smoothstep(road.half_width - 1.5, road.half_width + 1.5, dist);
        for (int ch = 0; ch < 3; ++ch) px[ch] += alpha * (road.color[ch] - px[ch]);
      }
      for (const Blob& blob : blobs) {
        const double dx = c - blob.cx;
        const double dy = r - blob.cy;
        const double lx = (dx * blob.cos_a + dy * blob.sin_a) / blob.rx;
        const double ly = (-dx * blob.sin_a + dy * blob.cos_a) / blob.ry;
        const double q = std::sqrt(lx * lx + ly * ly);
        const double feather = 2.0 / std::min(blob.rx, blob.ry);
        const double alpha = 1.0 - smoothstep(1.0 - feather, 1.0 + feather, q);
        for (int ch = 0; ch < 3; ++ch) px[ch] += alpha * (blob.color[ch] - px[ch]);
      }
      for (int ch = 0; ch < 3; ++ch) {
        img.at(r, c, ch) = static_cast<float>(std::clamp(px[ch], 0.0, 1.0));
      }
    }
  }
  return img;
}

std::vector<PairRecord> generate_synthetic_benchmark(const BenchmarkSpec& spec,
                                                     const std::filesystem::path& out_dir) {
  if (spec.scenes < 2) {
    throw std::invalid_argument("generate_synthetic_benchmark: need at least 2 scenes");
  }
  if (spec.scenes > 9999) {
    throw std::invalid_argument("generate_synthetic_benchmark: at most 9999 scenes");
  }
  validate(spec.pano);
  if (spec.texture_side < 8 || !(spec.texture_res_m > 0.0) || !(spec.camera_height_m > 0.0)) {
    throw std::invalid_argument("generate_synthetic_benchmark: bad texture or camera spec");
  }

  std::filesystem::create_directories(out_dir / "images");
  const std::vector<float> sky{0.66f, 0.78f, 0.92f};

  std::vector<PairRecord> records;
  records.reserve(spec.scenes);
  for (int s = 0; s < spec.scenes; ++s) {
    const ImageBuffer texture =
        make_scene_texture(spec.texture_side, Rng::mix(spec.seed, 2ULL * s));
    Rng yaw_rng(Rng::mix(spec.seed, 2ULL * s + 1));
    const int delta = static_cast<int>(yaw_rng.next_below(spec.pano.width_px));

    const SyntheticScene scene{texture, spec.texture_res_m, sky,
                               CameraRig{spec.camera_height_m, 0.0}};
    const ImageBuffer pano = yaw_shift(render_synthetic_panorama(scene, spec.pano), delta);

    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04d", s);
    char pano_rel[48], sat_rel[48];
    std::snprintf(pano_rel, sizeof(pano_rel), "images/pano_%04d.png", s);
    std::snprintf(sat_rel, sizeof(sat_rel), "images/sat_%04d.png", s);

    write_png(out_dir / pano_rel, pano);
    write_png(out_dir / sat_rel, texture);

    PairRecord rec;
    rec.id = name;
    rec.city = "synthville";
    rec.lat = (s / 100) * 0.01;
    rec.lon = (s % 100) * 0.01;
    rec.capture_date = "2023-06-15";
    rec.panorama_path = pano_rel;
    rec.satellite_path = sat_rel;
    rec.heading_deg = delta * 360.0 / spec.pano.width_px;
    records.push_back(std::move(rec));
  }

  save_manifest(out_dir / "manifest.jsonl", records);
  return records;
}

}  // namespace panobev
