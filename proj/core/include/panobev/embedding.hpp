#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace panobev {

/// L2-normalized feature vectors keyed to manifest ids, one row per item.
struct EmbeddingMatrix {
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows;
  std::vector<std::string> ids;

  int count() const { return static_cast<int>(rows.rows()); }
  int dim() const { return static_cast<int>(rows.cols()); }
};

/// Throws unless every row is unit norm within `tol` and ids are unique
/// and match the row count.
void validate(const EmbeddingMatrix& emb, double tol = 1e-6);

/// Binary embeddings file: magic "EPBM", version u32, n u32, d u32,
/// n*d f32 row-major little-endian, then n ids as (u32 length, UTF-8).
void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& emb);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

}  // namespace panobev
