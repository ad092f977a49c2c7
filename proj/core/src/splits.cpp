#include "panobev/splits.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "panobev/rng.hpp"

namespace panobev {

namespace {

using json = nlohmann::ordered_json;

std::map<std::string, std::vector<std::string>> identity_positives(
    const std::vector<std::string>& ids) {
  std::map<std::string, std::vector<std::string>> out;
  for (const std::string& id : ids) out[id] = {id};
  return out;
}

std::string location_key(const PairRecord& rec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.7f,%.7f", rec.lat, rec.lon);
  return buf;
}

void require_map_paths(const std::vector<PairRecord>& records,
                       const std::vector<std::string>& ids) {
  std::map<std::string, const PairRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  std::string missing;
  for (const std::string& id : ids) {
    if (!by_id.at(id)->map_path) {
      if (!missing.empty()) missing += ", ";
      missing += id;
    }
  }
  if (!missing.empty()) {
    throw std::invalid_argument("make_splits: map scheme needs map_path on: " + missing);
  }
}

std::vector<SplitSpec> regional_splits(const std::vector<PairRecord>& records,
                                       const SplitScheme& scheme, Modality modality) {
  std::vector<std::string> pool;  // non-holdout, manifest order
  std::vector<std::string> holdout;
  for (const auto& r : records) {
    if (scheme.holdout_cities.count(r.city)) {
      holdout.push_back(r.id);
    } else {
      pool.push_back(r.id);
    }
  }
  if (pool.empty()) {
    throw std::invalid_argument("make_splits: no records left for training after holdout");
  }

  Rng rng(Rng::mix(scheme.seed, 0x73706c6974ULL));
  const auto perm = random_permutation(pool.size(), rng);
  const std::size_t val_count =
      static_cast<std::size_t>(scheme.val_fraction * static_cast<double>(pool.size()));
  if (val_count >= pool.size()) {
    throw std::invalid_argument("make_splits: val_fraction leaves no training data");
  }

  std::vector<std::string> val_ids, train_ids;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    (k < val_count ? val_ids : train_ids).push_back(pool[perm[k]]);
  }
  std::sort(train_ids.begin(), train_ids.end());
  std::sort(val_ids.begin(), val_ids.end());
  std::sort(holdout.begin(), holdout.end());

  std::vector<SplitSpec> out;
  const std::string tag = modality == Modality::map ? "map_" : "";

  SplitSpec train;
  train.name = tag + "train";
  train.protocol = scheme.scheme;
  train.query_ids = train_ids;
  train.reference_ids = train_ids;
  train.modality = modality;
  train.positives = identity_positives(train_ids);
  out.push_back(std::move(train));

  if (!val_ids.empty()) {
    SplitSpec val;
    val.name = tag + "regional_val";
    val.protocol = scheme.scheme;
    val.query_ids = val_ids;
    val.reference_ids = val_ids;
    val.modality = modality;
    val.positives = identity_positives(val_ids);
    val.excluded_reference_ids = train_ids;
    out.push_back(std::move(val));
  }

  if (!holdout.empty()) {
    SplitSpec test;
    test.name = tag + "regional_test";
    test.protocol = scheme.scheme;
    test.query_ids = holdout;
    test.reference_ids = holdout;
    test.modality = modality;
    test.positives = identity_positives(holdout);
    test.excluded_reference_ids = train_ids;
    test.excluded_reference_ids.insert(test.excluded_reference_ids.end(), val_ids.begin(),
                                       val_ids.end());
    std::sort(test.excluded_reference_ids.begin(), test.excluded_reference_ids.end());
    out.push_back(std::move(test));
  }

  if (modality == Modality::map) {
    for (const auto& split : out) require_map_paths(records, split.reference_ids);
  }
  return out;
}

std::vector<SplitSpec> temporal_splits(const std::vector<PairRecord>& records) {
  std::map<int, std::vector<const PairRecord*>> by_year;
  for (const auto& r : records) by_year[record_year(r)].push_back(&r);
  if (by_year.size() < 2) {
    throw std::invalid_argument("make_splits: temporal scheme needs at least two capture years");
  }

  const int newest = by_year.rbegin()->first;
  std::vector<std::string> ref_ids;
  std::map<std::string, std::vector<std::string>> refs_by_location;
  for (const PairRecord* r : by_year[newest]) {
    ref_ids.push_back(r->id);
    refs_by_location[location_key(*r)].push_back(r->id);
  }
  std::sort(ref_ids.begin(), ref_ids.end());
  for (auto& [loc, ids] : refs_by_location) std::sort(ids.begin(), ids.end());

  std::vector<SplitSpec> out;

  SplitSpec train;
  train.name = "train";
  train.protocol = "temporal";
  train.query_ids = ref_ids;
  train.reference_ids = ref_ids;
  train.positives = identity_positives(ref_ids);
  out.push_back(std::move(train));

  SplitSpec mixed;
  mixed.name = "temporal_mixed";
  mixed.protocol = "temporal";
  mixed.reference_ids = ref_ids;

  bool any_queries = false;
  for (const auto& [year, recs] : by_year) {
    if (year == newest) continue;
    SplitSpec split;
    split.name = "temporal_" + std::to_string(year);
    split.protocol = "temporal";
    split.reference_ids = ref_ids;
    for (const PairRecord* r : recs) {
      auto hit = refs_by_location.find(location_key(*r));
      if (hit == refs_by_location.end()) continue;  // no same-location newest reference
      split.query_ids.push_back(r->id);
      split.positives[r->id] = hit->second;
      mixed.query_ids.push_back(r->id);
      mixed.positives[r->id] = hit->second;
    }
    if (split.query_ids.empty()) continue;
    std::sort(split.query_ids.begin(), split.query_ids.end());
    any_queries = true;
    out.push_back(std::move(split));
  }
  if (!any_queries) {
    throw std::invalid_argument(
        "make_splits: temporal scheme found no query with a same-location newest reference");
  }
  std::sort(mixed.query_ids.begin(), mixed.query_ids.end());
  out.push_back(std::move(mixed));
  return out;
}

}  // namespace

std::vector<SplitSpec> make_splits(const std::vector<PairRecord>& records,
                                   const SplitScheme& scheme) {
  if (records.empty()) throw std::invalid_argument("make_splits: empty manifest");
  if (scheme.val_fraction < 0.0 || scheme.val_fraction >= 1.0) {
    throw std::invalid_argument("make_splits: val_fraction must be in [0, 1)");
  }

  if (scheme.scheme == "regional") return regional_splits(records, scheme, Modality::satellite);
  if (scheme.scheme == "map") return regional_splits(records, scheme, Modality::map);
  if (scheme.scheme == "temporal") return temporal_splits(records);
  throw std::invalid_argument("make_splits: unknown scheme '" + scheme.scheme + "'");
}

void save_split(const std::filesystem::path& path, const SplitSpec& split) {
  json j;
  j["name"] = split.name;
  j["protocol"] = split.protocol;
  j["modality"] = to_string(split.modality);
  j["query_ids"] = split.query_ids;
  j["reference_ids"] = split.reference_ids;
  j["positives"] = json::object();
  for (const auto& [q, pos] : split.positives) j["positives"][q] = pos;
  j["excluded_reference_ids"] = split.excluded_reference_ids;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_split: cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("save_split: write failed for " + path.string());
}

SplitSpec load_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_split: cannot open " + path.string());

  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("load_split: " + path.string() + ": " + e.what());
  }

  SplitSpec split;
  try {
    split.name = j.at("name").get<std::string>();
    split.protocol = j.at("protocol").get<std::string>();
    split.modality = modality_from_string(j.at("modality").get<std::string>());
    split.query_ids = j.at("query_ids").get<std::vector<std::string>>();
    split.reference_ids = j.at("reference_ids").get<std::vector<std::string>>();
    for (const auto& [q, pos] : j.at("positives").items()) {
      split.positives[q] = pos.get<std::vector<std::string>>();
    }
    if (j.contains("excluded_reference_ids")) {
      split.excluded_reference_ids =
          j["excluded_reference_ids"].get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("load_split: " + path.string() + ": " + e.what());
  }
  return split;
}

}  // namespace panobev
