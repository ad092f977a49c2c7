#include "panobev/embedding.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "serial.hpp"

namespace panobev {

namespace {
constexpr char kEmbeddingMagic[5] = "EPBM";
constexpr std::uint32_t kEmbeddingVersion = 1;
}  // namespace

void validate(const EmbeddingMatrix& emb, double tol) {
  if (emb.rows.rows() != static_cast<Eigen::Index>(emb.ids.size())) {
    throw std::invalid_argument("EmbeddingMatrix: id count does not match row count");
  }
  std::unordered_set<std::string> seen;
  for (const std::string& id : emb.ids) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument("EmbeddingMatrix: duplicate id '" + id + "'");
    }
  }
  for (Eigen::Index r = 0; r < emb.rows.rows(); ++r) {
    double norm_sq = 0.0;
    for (Eigen::Index c = 0; c < emb.rows.cols(); ++c) {
      const double v = emb.rows(r, c);
      if (!std::isfinite(v)) {
        throw std::invalid_argument("EmbeddingMatrix: non-finite value in row " +
                                    std::to_string(r));
      }
      norm_sq += v * v;
    }
    if (std::abs(std::sqrt(norm_sq) - 1.0) > tol) {
      throw std::invalid_argument("EmbeddingMatrix: row " + std::to_string(r) +
                                  " is not unit norm");
    }
  }
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& emb) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_embeddings: cannot open " + path.string());

  detail::write_magic(out, kEmbeddingMagic);
  detail::write_le<std::uint32_t>(out, kEmbeddingVersion);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(emb.rows.rows()));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(emb.rows.cols()));
  for (Eigen::Index r = 0; r < emb.rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < emb.rows.cols(); ++c) {
      detail::write_le<float>(out, emb.rows(r, c));
    }
  }
  for (const std::string& id : emb.ids) {
    detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  if (!out) throw std::runtime_error("save_embeddings: write failed for " + path.string());
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_embeddings: cannot open " + path.string());

  detail::expect_magic(in, kEmbeddingMagic, "load_embeddings");
  const auto version = detail::read_le<std::uint32_t>(in);
  if (version != kEmbeddingVersion) {
    throw std::runtime_error("load_embeddings: unsupported version " + std::to_string(version));
  }
  const auto n = detail::read_le<std::uint32_t>(in);
  const auto d = detail::read_le<std::uint32_t>(in);

  EmbeddingMatrix emb;
  emb.rows.resize(n, d);
  for (std::uint32_t r = 0; r < n; ++r) {
    for (std::uint32_t c = 0; c < d; ++c) {
      emb.rows(r, c) = detail::read_le<float>(in);
    }
  }
  emb.ids.resize(n);
  for (std::uint32_t r = 0; r < n; ++r) {
    const auto len = detail::read_le<std::uint32_t>(in);
    emb.ids[r].resize(len);
    in.read(emb.ids[r].data(), len);
    if (!in) throw std::runtime_error("load_embeddings: truncated id table");
  }
  return emb;
}

}  // namespace panobev
