#include "panobev/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace panobev {

std::string to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::street_only: return "street";
    case EvalMode::bev_only: return "bev";
    case EvalMode::fused: return "fused";
  }
  return "?";
}

namespace {

std::unordered_map<std::string, int> row_index(const EmbeddingMatrix& emb) {
  std::unordered_map<std::string, int> idx;
  idx.reserve(emb.ids.size());
  for (int r = 0; r < emb.count(); ++r) idx[emb.ids[r]] = r;
  return idx;
}

/// Rows of `emb` selected by id, in the given order.
EmbeddingMatrix select_rows(const EmbeddingMatrix& emb, const std::vector<std::string>& ids,
                            const char* what) {
  const auto idx = row_index(emb);
  EmbeddingMatrix out;
  out.rows.resize(static_cast<Eigen::Index>(ids.size()), emb.rows.cols());
  out.ids = ids;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    auto hit = idx.find(ids[k]);
    if (hit == idx.end()) {
      throw std::invalid_argument(std::string("evaluate_protocol: no ") + what +
                                  " embedding for id '" + ids[k] + "'");
    }
    out.rows.row(static_cast<Eigen::Index>(k)) = emb.rows.row(hit->second);
  }
  return out;
}

}  // namespace

RecallReport evaluate_protocol(const SplitSpec& split, const ProtocolEmbeddings& embeddings,
                               const FusionConfig& fusion, EvalMode mode,
                               std::vector<QueryRanking>* dump) {
  if (split.query_ids.empty() || split.reference_ids.empty()) {
    throw std::invalid_argument("evaluate_protocol: split has no queries or no references");
  }

  // Gallery hygiene: the split's reference set must not contain anything
  // the split declared off-limits (the training references).
  if (!split.excluded_reference_ids.empty()) {
    const std::unordered_set<std::string> excluded(split.excluded_reference_ids.begin(),
                                                   split.excluded_reference_ids.end());
    std::string leaked;
    for (const std::string& id : split.reference_ids) {
      if (excluded.count(id)) {
        if (!leaked.empty()) leaked += ", ";
        leaked += id;
      }
    }
    if (!leaked.empty()) {
      throw protocol_error("evaluate_protocol: gallery contains excluded references: " + leaked);
    }
  }

  // Every query needs at least one positive inside the gallery.
  const std::unordered_set<std::string> gallery_ids(split.reference_ids.begin(),
                                                    split.reference_ids.end());
  std::string orphaned;
  for (const std::string& q : split.query_ids) {
    auto pos = split.positives.find(q);
    const bool covered =
        pos != split.positives.end() &&
        std::any_of(pos->second.begin(), pos->second.end(),
                    [&](const std::string& id) { return gallery_ids.count(id) > 0; });
    if (!covered) {
      if (!orphaned.empty()) orphaned += ", ";
      orphaned += q;
    }
  }
  if (!orphaned.empty()) {
    throw protocol_error("evaluate_protocol: queries with no positive in the gallery: " +
                         orphaned);
  }

  const int n = static_cast<int>(split.reference_ids.size());
  const int k_1pct = static_cast<int>(std::ceil(0.01 * n));
  const int depth = std::min(n, std::max(10, k_1pct));

  GalleryIndex street_gallery, bev_gallery;
  if (mode != EvalMode::bev_only) {
    street_gallery =
        make_gallery(select_rows(embeddings.street_refs, split.reference_ids, "street reference"),
                     split.modality);
  }
  if (mode != EvalMode::street_only) {
    bev_gallery = make_gallery(
        select_rows(embeddings.bev_refs, split.reference_ids, "bev reference"), split.modality);
  }

  const EmbeddingMatrix street_q =
      mode == EvalMode::bev_only
          ? EmbeddingMatrix{}
          : select_rows(embeddings.street_queries, split.query_ids, "street query");
  const EmbeddingMatrix bev_q =
      mode == EvalMode::street_only
          ? EmbeddingMatrix{}
          : select_rows(embeddings.bev_queries, split.query_ids, "bev query");

  FusionConfig effective = fusion;
  effective.shortlist = std::min(effective.shortlist, n);

  std::vector<std::vector<std::string>> ranked(split.query_ids.size());
  std::vector<std::vector<std::string>> positives(split.query_ids.size());

  for (std::size_t q = 0; q < split.query_ids.size(); ++q) {
    positives[q] = split.positives.at(split.query_ids[q]);
    FusedList entries;
    if (mode == EvalMode::fused) {
      entries = co_retrieve(street_q.rows.row(static_cast<Eigen::Index>(q)).transpose(),
                            bev_q.rows.row(static_cast<Eigen::Index>(q)).transpose(),
                            street_gallery, bev_gallery, effective, depth);
    } else {
      const auto& gallery = mode == EvalMode::street_only ? street_gallery : bev_gallery;
      const auto& queries = mode == EvalMode::street_only ? street_q : bev_q;
      const RankedList list =
          search(queries.rows.row(static_cast<Eigen::Index>(q)).transpose(), gallery, depth);
      entries.reserve(list.size());
      for (const RankedEntry& e : list) {
        entries.push_back({e.id, e.score,
                           mode == EvalMode::street_only ? e.score : 0.0f,
                           mode == EvalMode::bev_only ? e.score : 0.0f});
      }
    }
    ranked[q].reserve(entries.size());
    for (const FusedEntry& e : entries) ranked[q].push_back(e.id);
    if (dump) dump->push_back({split.query_ids[q], std::move(entries)});
  }

  return recall_at_k(ranked, positives, n, split.name + ":" + to_string(mode));
}

}  // namespace panobev
