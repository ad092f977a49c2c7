#include "panobev/manifest.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace panobev {

namespace {

using json = nlohmann::ordered_json;

void append_violation(std::string& msg, const std::string& id, const char* why) {
  if (!msg.empty()) msg += "; ";
  msg += "'" + id + "': " + why;
}

}  // namespace

std::vector<PairRecord> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_manifest: cannot open " + path.string());

  std::vector<PairRecord> records;
  std::unordered_set<std::string> ids;
  std::string violations;
  std::string line;
  int line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("load_manifest: " + path.string() + ":" +
                               std::to_string(line_no) + ": " + e.what());
    }

    PairRecord rec;
    try {
      rec.id = j.at("id").get<std::string>();
      rec.city = j.at("city").get<std::string>();
      rec.lat = j.at("lat").get<double>();
      rec.lon = j.at("lon").get<double>();
      rec.capture_date = j.at("capture_date").get<std::string>();
      rec.panorama_path = j.at("panorama_path").get<std::string>();
      rec.satellite_path = j.at("satellite_path").get<std::string>();
      if (j.contains("map_path") && !j["map_path"].is_null()) {
        rec.map_path = j["map_path"].get<std::string>();
      }
      if (j.contains("heading") && !j["heading"].is_null() && !j["heading"].is_string()) {
        rec.heading_deg = j["heading"].get<double>();
      }
    } catch (const json::exception& e) {
      throw std::runtime_error("load_manifest: " + path.string() + ":" +
                               std::to_string(line_no) + ": " + e.what());
    }

    if (rec.id.empty()) {
      throw std::runtime_error("load_manifest: " + path.string() + ":" +
                               std::to_string(line_no) + ": empty id");
    }
    if (!ids.insert(rec.id).second) append_violation(violations, rec.id, "duplicate id");
    if (rec.lat < -90.0 || rec.lat > 90.0) append_violation(violations, rec.id, "lat out of range");
    if (rec.lon < -180.0 || rec.lon > 180.0) {
      append_violation(violations, rec.id, "lon out of range");
    }
    if (rec.panorama_path.empty()) append_violation(violations, rec.id, "missing panorama_path");
    if (rec.satellite_path.empty()) append_violation(violations, rec.id, "missing satellite_path");
    if (rec.capture_date.size() < 4) append_violation(violations, rec.id, "bad capture_date");

    records.push_back(std::move(rec));
  }

  if (!violations.empty()) {
    throw std::runtime_error("load_manifest: invalid records: " + violations);
  }
  return records;
}

void save_manifest(const std::filesystem::path& path, const std::vector<PairRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_manifest: cannot open " + path.string());

  for (const PairRecord& rec : records) {
    json j;
    j["id"] = rec.id;
    j["city"] = rec.city;
    j["lat"] = rec.lat;
    j["lon"] = rec.lon;
    j["capture_date"] = rec.capture_date;
    j["panorama_path"] = rec.panorama_path;
    j["satellite_path"] = rec.satellite_path;
    if (rec.map_path) {
      j["map_path"] = *rec.map_path;
    } else {
      j["map_path"] = nullptr;
    }
    if (rec.heading_deg) {
      j["heading"] = *rec.heading_deg;
    } else {
      j["heading"] = "unknown";
    }
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("save_manifest: write failed for " + path.string());
}

int record_year(const PairRecord& record) {
  try {
    return std::stoi(record.capture_date.substr(0, 4));
  } catch (...) {
    throw std::runtime_error("record_year: unparsable capture_date '" + record.capture_date +
                             "' for id '" + record.id + "'");
  }
}

}  // namespace panobev
