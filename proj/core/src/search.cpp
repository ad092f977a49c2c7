#include "panobev/search.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace panobev {

std::string to_string(Modality m) { return m == Modality::satellite ? "satellite" : "map"; }

Modality modality_from_string(const std::string& s) {
  if (s == "satellite") return Modality::satellite;
  if (s == "map") return Modality::map;
  throw std::invalid_argument("unknown modality '" + s + "'");
}

GalleryIndex make_gallery(EmbeddingMatrix refs, Modality modality) {
  validate(refs);
  if (refs.count() == 0) throw std::invalid_argument("make_gallery: empty gallery");
  return {std::move(refs), modality};
}

namespace {

/// Plain sequential dot product; keeps scores bit-identical to any oracle
/// that accumulates in the same order.
float dot_score(const Eigen::VectorXf& q, const EmbeddingMatrix& emb, Eigen::Index row) {
  float acc = 0.0f;
  for (Eigen::Index c = 0; c < emb.rows.cols(); ++c) acc += q[c] * emb.rows(row, c);
  return acc;
}

void check_query(const Eigen::VectorXf& q, const GalleryIndex& index, const char* who) {
  if (q.size() != index.refs.rows.cols()) {
    throw std::invalid_argument(std::string(who) + ": query dimension mismatch");
  }
  if (!q.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite query");
  }
}

}  // namespace

RankedList search(const Eigen::VectorXf& query, const GalleryIndex& index, int k) {
  const int n = index.refs.count();
  if (n == 0) throw std::invalid_argument("search: empty gallery");
  if (k < 1 || k > n) throw std::invalid_argument("search: k must be in [1, gallery size]");
  check_query(query, index, "search");

  std::vector<float> scores(n);
  for (int r = 0; r < n; ++r) scores[r] = dot_score(query, index.refs, r);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return index.refs.ids[a] < index.refs.ids[b];
  });

  RankedList out;
  out.reserve(k);
  for (int r = 0; r < k; ++r) out.push_back({index.refs.ids[order[r]], scores[order[r]]});
  return out;
}

FusedList co_retrieve(const Eigen::VectorXf& q_street, const Eigen::VectorXf& q_bev,
                      const GalleryIndex& street_index, const GalleryIndex& bev_index,
                      const FusionConfig& cfg, int k) {
  const int n = street_index.refs.count();
  if (n == 0) throw std::invalid_argument("co_retrieve: empty gallery");
  if (bev_index.refs.count() != n || bev_index.refs.ids != street_index.refs.ids) {
    throw std::invalid_argument("co_retrieve: street and BEV galleries must be id-aligned");
  }
  if (k < 1) throw std::invalid_argument("co_retrieve: k must be >= 1");
  if (cfg.shortlist < k) throw std::invalid_argument("co_retrieve: shortlist M smaller than k");
  if (cfg.shortlist > n) {
    throw std::invalid_argument("co_retrieve: shortlist M exceeds gallery size");
  }
  check_query(q_street, street_index, "co_retrieve");
  check_query(q_bev, bev_index, "co_retrieve");

  std::vector<float> s1(n);
  for (int r = 0; r < n; ++r) s1[r] = dot_score(q_street, street_index.refs, r);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (s1[a] != s1[b]) return s1[a] > s1[b];
    return street_index.refs.ids[a] < street_index.refs.ids[b];
  });
  order.resize(cfg.shortlist);

  FusedList fused;
  fused.reserve(order.size());
  for (int r : order) {
    const float s2 = dot_score(q_bev, bev_index.refs, r);
    fused.push_back({street_index.refs.ids[r], s1[r] + s2, s1[r], s2});
  }
  std::sort(fused.begin(), fused.end(), [](const FusedEntry& a, const FusedEntry& b) {
    if (a.score_fused != b.score_fused) return a.score_fused > b.score_fused;
    return a.id < b.id;
  });
  fused.resize(k);
  return fused;
}

FusedList co_retrieve(const Eigen::VectorXf& q_street, const Eigen::VectorXf& q_bev,
                      const GalleryIndex& index, const FusionConfig& cfg, int k) {
  return co_retrieve(q_street, q_bev, index, index, cfg, k);
}

}  // namespace panobev
