#include "panobev/tiles.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace panobev {

namespace {
constexpr double kMercatorLatLimit = 85.05113;
}

TileCoord lonlat_to_tile(double lon, double lat, int z) {
  if (z < 0 || z > 30) throw std::invalid_argument("lonlat_to_tile: zoom out of range");
  if (!(std::abs(lat) <= kMercatorLatLimit)) {
    throw std::invalid_argument("lonlat_to_tile: latitude beyond Mercator limit");
  }
  if (!(lon >= -180.0 && lon <= 180.0)) {
    throw std::invalid_argument("lonlat_to_tile: longitude out of range");
  }

  const double n = std::pow(2.0, z);
  const double lat_rad = lat * std::numbers::pi / 180.0;
  int x = static_cast<int>(std::floor((lon + 180.0) / 360.0 * n));
  int y = static_cast<int>(
      std::floor((1.0 - std::asinh(std::tan(lat_rad)) / std::numbers::pi) / 2.0 * n));

  const int max_idx = static_cast<int>(n) - 1;
  x = std::clamp(x, 0, max_idx);
  y = std::clamp(y, 0, max_idx);
  return {z, x, y};
}

void tile_center(const TileCoord& tile, double& lon, double& lat) {
  const double n = std::pow(2.0, tile.z);
  lon = (tile.x + 0.5) / n * 360.0 - 180.0;
  const double merc_y = std::numbers::pi * (1.0 - 2.0 * (tile.y + 0.5) / n);
  lat = std::atan(std::sinh(merc_y)) * 180.0 / std::numbers::pi;
}

namespace {

struct UrlParts {
  std::string scheme_host;  // "http://host:port"
  std::string path;
};

std::string substitute(std::string templ, const TileCoord& t) {
  auto replace_all = [&templ](const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = templ.find(key, pos)) != std::string::npos) {
      templ.replace(pos, key.size(), value);
      pos += value.size();
    }
  };
  replace_all("{z}", std::to_string(t.z));
  replace_all("{x}", std::to_string(t.x));
  replace_all("{y}", std::to_string(t.y));
  return templ;
}

UrlParts split_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("fetch_tiles: url template needs a scheme: " + url);
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::filesystem::path tile_cache_path(const std::filesystem::path& cache_dir,
                                      const TileCoord& t) {
  return cache_dir / std::to_string(t.z) / std::to_string(t.x) /
         (std::to_string(t.y) + ".png");
}

/// Write-temp-then-rename so concurrent readers never see partial tiles.
void atomic_write(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("fetch_tiles: cannot write " + tmp.string());
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
  }
  std::filesystem::rename(tmp, path);
}

std::string fetch_one(const std::string& url, int timeout_seconds) {
  const UrlParts parts = split_url(url);
  if (parts.scheme_host.rfind("https://", 0) == 0) {
    throw std::runtime_error("https support not built in; front the server with plain http");
  }
  httplib::Client client(parts.scheme_host);
  client.set_connection_timeout(timeout_seconds);
  client.set_read_timeout(timeout_seconds);
  client.set_follow_location(true);

  httplib::Result res = client.Get(parts.path);
  if (!res) throw std::runtime_error("transport error: " + httplib::to_string(res.error()));
  if (res->status != 200) throw std::runtime_error("HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace

TileFetchReport fetch_tiles(const std::vector<PairRecord>& records,
                            const std::string& url_template,
                            const std::filesystem::path& cache_dir,
                            const TileFetchOptions& options) {
  for (const char* key : {"{z}", "{x}", "{y}"}) {
    if (url_template.find(key) == std::string::npos) {
      throw std::invalid_argument("fetch_tiles: template is missing " + std::string(key));
    }
  }
  if (options.concurrency < 1) {
    throw std::invalid_argument("fetch_tiles: concurrency must be >= 1");
  }

  TileFetchReport report;
  report.items.resize(records.size());

  // Records sharing a tile resolve to one request.
  std::map<std::string, TileCoord> unique_tiles;
  std::vector<std::string> tile_keys(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    const TileCoord tile = lonlat_to_tile(records[k].lon, records[k].lat, options.zoom);
    const std::string key = std::to_string(tile.z) + "/" + std::to_string(tile.x) + "/" +
                            std::to_string(tile.y);
    tile_keys[k] = key;
    unique_tiles.emplace(key, tile);
    report.items[k].record_id = records[k].id;
    report.items[k].tile = tile;
  }

  std::vector<std::pair<std::string, TileCoord>> work(unique_tiles.begin(), unique_tiles.end());
  std::map<std::string, std::string> outcomes;  // key -> status
  std::mutex outcomes_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= work.size()) return;
      const auto& [key, tile] = work[k];
      const std::filesystem::path path = tile_cache_path(cache_dir, tile);

      std::string status;
      if (std::filesystem::exists(path)) {
        status = "cached";
      } else {
        try {
          atomic_write(path, fetch_one(substitute(url_template, tile),
                                       options.timeout_seconds));
          status = "fetched";
        } catch (const std::exception& e) {
          status = std::string("failed: ") + e.what();
        }
      }
      std::lock_guard<std::mutex> lock(outcomes_mutex);
      outcomes[key] = std::move(status);
    }
  };

  const int workers = std::min<int>(options.concurrency, static_cast<int>(work.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t k = 0; k < records.size(); ++k) {
    const std::string& status = outcomes.at(tile_keys[k]);
    report.items[k].status = status;
    if (status == "cached") {
      ++report.cached;
    } else if (status == "fetched") {
      ++report.fetched;
    } else {
      ++report.failed;
    }
  }
  return report;
}

}  // namespace panobev
