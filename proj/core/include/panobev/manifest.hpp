#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace panobev {

/// One query/reference pair: a street panorama with its co-located
/// overhead imagery. Paths are relative to the manifest's directory.
struct PairRecord {
  std::string id;
  std::string city;
  double lat = 0.0;
  double lon = 0.0;
  std::string capture_date;  // ISO YYYY-MM-DD
  std::string panorama_path;
  std::string satellite_path;
  std::optional<std::string> map_path;
  std::optional<double> heading_deg;  // nullopt = unknown orientation
};

/// Loads a JSON-lines manifest (one record per line, UTF-8). Malformed
/// lines fail with their line number; records violating invariants
/// (lat/lon range, duplicate or empty ids, missing paths) fail with the
/// offending ids listed. An empty file is an empty dataset.
std::vector<PairRecord> load_manifest(const std::filesystem::path& path);

/// Writes records as JSON-lines with a fixed key order, so identical
/// inputs produce identical bytes.
void save_manifest(const std::filesystem::path& path, const std::vector<PairRecord>& records);

/// Capture year parsed from the record's ISO date.
int record_year(const PairRecord& record);

}  // namespace panobev
