#include "panobev/recall.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace panobev {

RecallReport recall_at_k(const std::vector<std::vector<std::string>>& ranked_ids,
                         const std::vector<std::vector<std::string>>& positives,
                         int gallery_size, const std::string& protocol) {
  if (ranked_ids.empty()) throw std::invalid_argument("recall_at_k: no queries");
  if (ranked_ids.size() != positives.size()) {
    throw std::invalid_argument("recall_at_k: results/positives count mismatch");
  }
  if (gallery_size < 1) throw std::invalid_argument("recall_at_k: empty gallery");

  RecallReport report;
  report.protocol = protocol;
  report.query_count = static_cast<int>(ranked_ids.size());
  report.gallery_size = gallery_size;
  report.k_1pct = static_cast<int>(std::ceil(0.01 * gallery_size));

  const int ks[4] = {1, 5, 10, report.k_1pct};
  for (int k : ks) {
    if (k > gallery_size) {
      throw std::invalid_argument("recall_at_k: K=" + std::to_string(k) +
                                  " exceeds gallery size " + std::to_string(gallery_size));
    }
  }

  int hits[4] = {0, 0, 0, 0};
  for (std::size_t q = 0; q < ranked_ids.size(); ++q) {
    if (positives[q].empty()) {
      throw std::invalid_argument("recall_at_k: query " + std::to_string(q) + " has no positives");
    }
    const std::unordered_set<std::string> pos(positives[q].begin(), positives[q].end());
    int first_hit = -1;  // 1-based rank of the first positive
    const int depth = static_cast<int>(ranked_ids[q].size());
    for (int r = 0; r < depth; ++r) {
      if (pos.count(ranked_ids[q][r])) {
        first_hit = r + 1;
        break;
      }
    }
    if (first_hit < 0) continue;
    for (int t = 0; t < 4; ++t) {
      if (first_hit <= ks[t]) ++hits[t];
    }
  }

  const double scale = 100.0 / report.query_count;
  report.r1 = hits[0] * scale;
  report.r5 = hits[1] * scale;
  report.r10 = hits[2] * scale;
  report.r1pct = hits[3] * scale;
  return report;
}

std::string recall_csv_header() { return "protocol,R1,R5,R10,R1pct,queries,gallery"; }

std::string recall_csv_row(const RecallReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%.2f,%.2f,%.2f,%.2f,%d,%d", r.protocol.c_str(), r.r1, r.r5,
                r.r10, r.r1pct, r.query_count, r.gallery_size);
  return buf;
}

void print_recall_table(std::ostream& out, const std::vector<RecallReport>& reports) {
  std::size_t name_w = 8;
  for (const auto& r : reports) name_w = std::max(name_w, r.protocol.size());

  char buf[320];
  std::snprintf(buf, sizeof(buf), "%-*s %8s %8s %8s %8s %8s %8s\n",
                static_cast<int>(name_w), "protocol", "R@1", "R@5", "R@10", "R@1%", "queries",
                "gallery");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%-*s %8.2f %8.2f %8.2f %8.2f %8d %8d\n",
                  static_cast<int>(name_w), r.protocol.c_str(), r.r1, r.r5, r.r10, r.r1pct,
                  r.query_count, r.gallery_size);
    out << buf;
  }
}

}  // namespace panobev
