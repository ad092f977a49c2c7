#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "panobev/manifest.hpp"
#include "panobev/search.hpp"

namespace panobev {

/// One evaluation (or training) split: which records query, which form
/// the reference gallery, in which modality, and the ground-truth
/// positives per query. excluded_reference_ids carries the train-side
/// references so evaluation can prove the gallery leaks nothing.
struct SplitSpec {
  std::string name;
  std::string protocol;
  std::vector<std::string> query_ids;
  std::vector<std::string> reference_ids;
  Modality modality = Modality::satellite;
  std::map<std::string, std::vector<std::string>> positives;
  std::vector<std::string> excluded_reference_ids;
};

struct SplitScheme {
  std::string scheme = "regional";  // "regional" | "temporal" | "map"
  std::uint64_t seed = 0;
  double val_fraction = 0.1;
  std::set<std::string> holdout_cities;  // regional/cross-continent test cities
};

/// Generates the evaluation protocol splits for a manifest.
///
/// regional: non-holdout cities are shuffled (seeded) into train/val;
///   holdout cities become the regional test. Galleries contain only the
///   split's own references.
/// temporal: newest-year records train and serve as the gallery; each
///   older year queries against them, matched by location; a "mixed"
///   split combines all older years.
/// map: the regional layout with map-modality references (map_path
///   required on every gallery record).
std::vector<SplitSpec> make_splits(const std::vector<PairRecord>& records,
                                   const SplitScheme& scheme);

/// Split files are JSON: name, protocol, modality, query_ids,
/// reference_ids, positives, excluded_reference_ids.
void save_split(const std::filesystem::path& path, const SplitSpec& split);
SplitSpec load_split(const std::filesystem::path& path);

}  // namespace panobev
