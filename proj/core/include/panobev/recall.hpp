#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace panobev {

struct RecallReport {
  std::string protocol;
  double r1 = 0.0;     // percentages
  double r5 = 0.0;
  double r10 = 0.0;
  double r1pct = 0.0;
  int k_1pct = 0;      // ceil(0.01 * gallery)
  int query_count = 0;
  int gallery_size = 0;
};

/// Top-K recall over ranked id lists: a query counts as retrieved at K
/// when any of its positives appears in its first K results. K_1% is
/// ceil(0.01 * gallery size); every evaluated K must fit in the gallery.
RecallReport recall_at_k(const std::vector<std::vector<std::string>>& ranked_ids,
                         const std::vector<std::vector<std::string>>& positives,
                         int gallery_size, const std::string& protocol);

std::string recall_csv_header();
std::string recall_csv_row(const RecallReport& report);
void print_recall_table(std::ostream& out, const std::vector<RecallReport>& reports);

}  // namespace panobev
