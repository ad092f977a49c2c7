#pragma once

#include <stdexcept>

#include "panobev/recall.hpp"
#include "panobev/search.hpp"
#include "panobev/splits.hpp"

namespace panobev {

/// Violation of an evaluation protocol contract (leaked training
/// reference in the gallery, query with no positive in the gallery).
/// The CLI maps this to exit code 3.
class protocol_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EvalMode { street_only, bev_only, fused };
std::string to_string(EvalMode mode);

/// Branch outputs for one split: query embeddings per branch and the
/// reference gallery embedded by each branch's encoder.
struct ProtocolEmbeddings {
  EmbeddingMatrix street_queries;
  EmbeddingMatrix bev_queries;
  EmbeddingMatrix street_refs;
  EmbeddingMatrix bev_refs;
};

/// Per-query ranked output, kept for debug dumps.
struct QueryRanking {
  std::string query_id;
  FusedList entries;
};

/// Runs one protocol: builds the gallery strictly from the split's
/// reference ids (asserting none of the excluded/training references
/// leaked in), ranks every query in the requested mode, and aggregates
/// recall. Queries whose positives are entirely absent from the gallery
/// raise protocol_error listing the offending ids.
RecallReport evaluate_protocol(const SplitSpec& split, const ProtocolEmbeddings& embeddings,
                               const FusionConfig& fusion, EvalMode mode,
                               std::vector<QueryRanking>* dump = nullptr);

}  // namespace panobev
