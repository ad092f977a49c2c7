#include "panobev/warp.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

#include "serial.hpp"

namespace panobev {

namespace {
constexpr char kWarpMagic[5] = "EPBW";
constexpr std::uint32_t kWarpVersion = 1;
}  // namespace

ImageBuffer apply_warp(const ImageBuffer& src, const WarpMap& map, const SamplingMode& mode) {
  validate(src);
  if (src.height != map.pano_height || src.width != map.pano_width) {
    throw std::invalid_argument(
        "apply_warp: source is " + std::to_string(src.width) + "x" + std::to_string(src.height) +
        " but the map was built for " + std::to_string(map.pano_width) + "x" +
        std::to_string(map.pano_height));
  }

  ImageBuffer out(map.size, map.size, src.channels);
  std::size_t idx = 0;
  for (int i = 0; i < map.size; ++i) {
    for (int j = 0; j < map.size; ++j, ++idx) {
      const WarpMap::Entry& e = map.entries[idx];
      if (!e.valid) continue;
      for (int ch = 0; ch < src.channels; ++ch) {
        out.at(i, j, ch) = sample_image(src, e.src_v, e.src_u, ch, mode);
      }
    }
  }
  return out;
}

void save_warp_map(const std::filesystem::path& path, const WarpMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_warp_map: cannot open " + path.string());

  detail::write_magic(out, kWarpMagic);
  detail::write_le<std::uint32_t>(out, kWarpVersion);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(map.size));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(map.pano_height));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(map.pano_width));
  for (const WarpMap::Entry& e : map.entries) {
    detail::write_le<float>(out, e.src_v);
    detail::write_le<float>(out, e.src_u);
    detail::write_le<std::uint8_t>(out, e.valid);
  }
  if (!out) throw std::runtime_error("save_warp_map: write failed for " + path.string());
}

WarpMap load_warp_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_warp_map: cannot open " + path.string());

  detail::expect_magic(in, kWarpMagic, "load_warp_map");
  const auto version = detail::read_le<std::uint32_t>(in);
  if (version != kWarpVersion) {
    throw std::runtime_error("load_warp_map: unsupported version " + std::to_string(version));
  }

  WarpMap map;
  map.size = static_cast<int>(detail::read_le<std::uint32_t>(in));
  map.pano_height = static_cast<int>(detail::read_le<std::uint32_t>(in));
  map.pano_width = static_cast<int>(detail::read_le<std::uint32_t>(in));
  if (map.size < 2 || map.pano_height < 2 || map.pano_width < 2) {
    throw std::runtime_error("load_warp_map: corrupt header in " + path.string());
  }
  const std::size_t n = static_cast<std::size_t>(map.size) * map.size;
  map.entries.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    map.entries[k].src_v = detail::read_le<float>(in);
    map.entries[k].src_u = detail::read_le<float>(in);
    map.entries[k].valid = detail::read_le<std::uint8_t>(in);
  }
  return map;
}

}  // namespace panobev
