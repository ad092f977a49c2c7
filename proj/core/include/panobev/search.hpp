#pragma once

#include <string>
#include <vector>

#include "panobev/embedding.hpp"

namespace panobev {

enum class Modality { satellite, map };

std::string to_string(Modality m);
Modality modality_from_string(const std::string& s);

/// Immutable reference gallery; construction validates unit norms and id
/// uniqueness. Safe for concurrent read-only searches.
struct GalleryIndex {
  EmbeddingMatrix refs;
  Modality modality = Modality::satellite;
};

GalleryIndex make_gallery(EmbeddingMatrix refs, Modality modality);

struct RankedEntry {
  std::string id;
  float score = 0.0f;
};
using RankedList = std::vector<RankedEntry>;

struct FusedEntry {
  std::string id;
  float score_fused = 0.0f;
  float score_s1 = 0.0f;
  float score_s2 = 0.0f;
};
using FusedList = std::vector<FusedEntry>;

struct FusionConfig {
  int shortlist = 64;  // M: street-branch candidates kept for fusion
};

/// Exhaustive exact top-k by dot product (cosine on unit vectors),
/// descending score with ties broken by ascending id.
RankedList search(const Eigen::VectorXf& query, const GalleryIndex& index, int k);

/// Dual-branch fusion: S1 scores the street query over the full street
/// gallery, the top-M candidates are rescored as S1 + S2 with the BEV
/// query against the BEV gallery, and the fused top-k is returned. The
/// two galleries must list the same ids in the same order; with M equal
/// to the gallery size this is exact fusion over all references.
FusedList co_retrieve(const Eigen::VectorXf& q_street, const Eigen::VectorXf& q_bev,
                      const GalleryIndex& street_index, const GalleryIndex& bev_index,
                      const FusionConfig& cfg, int k);

/// Single-index form: both branches score against the same gallery.
FusedList co_retrieve(const Eigen::VectorXf& q_street, const Eigen::VectorXf& q_bev,
                      const GalleryIndex& index, const FusionConfig& cfg, int k);

}  // namespace panobev
