#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "panobev/manifest.hpp"

namespace panobev {

/// Slippy-map / Web-Mercator tile address.
struct TileCoord {
  int z = 0;
  int x = 0;
  int y = 0;
};

/// Standard Web-Mercator tiling: x = floor((lon+180)/360 * 2^z),
/// y = floor((1 - asinh(tan lat)/pi)/2 * 2^z). Latitudes beyond the
/// Mercator limit (85.05113 degrees) are rejected.
TileCoord lonlat_to_tile(double lon, double lat, int z);

/// Center of a tile in degrees; inverse of lonlat_to_tile up to one tile.
void tile_center(const TileCoord& tile, double& lon, double& lat);

struct TileFetchOptions {
  int zoom = 18;
  int concurrency = 4;      // bounded parallel requests
  int timeout_seconds = 10;
};

struct TileFetchReport {
  struct Item {
    std::string record_id;
    TileCoord tile;
    std::string status;  // "fetched" | "cached" | "failed: <why>"
  };
  std::vector<Item> items;  // one per record, in manifest order
  int fetched = 0;
  int cached = 0;
  int failed = 0;
};

/// Downloads the tile covering each record from an XYZ template URL
/// ("https://host/path/{z}/{x}/{y}.png") into `<cache>/<z>/<x>/<y>.png`.
/// Cache-first and idempotent: existing files are never re-requested.
/// Individual failures are recorded per record and never abort the
/// batch. Cache writes go through a temp file and rename.
TileFetchReport fetch_tiles(const std::vector<PairRecord>& records,
                            const std::string& url_template,
                            const std::filesystem::path& cache_dir,
                            const TileFetchOptions& options = {});

}  // namespace panobev
