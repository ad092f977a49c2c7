#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>

namespace panobev {

/// Learnable linear projection into the retrieval space plus the InfoNCE
/// temperature, parameterized as log_tau so tau stays positive.
struct EncoderParams {
  Eigen::MatrixXd projection;  // descriptor_len x dim
  Eigen::VectorXd bias;        // dim
  double log_tau = 0.0;

  double tau() const;
  int input_dim() const { return static_cast<int>(projection.rows()); }
  int output_dim() const { return static_cast<int>(projection.cols()); }
};

struct EncodeResult {
  Eigen::VectorXd embedding;  // unit norm
  bool degenerate = false;    // pre-normalization vector was (near) zero
};

/// Glorot-uniform projection from a seeded generator, zero bias,
/// tau initialized to tau_init. Bit-reproducible for a given seed.
EncoderParams init_encoder(int descriptor_len, int dim, std::uint64_t seed,
                           double tau_init = 0.07);

/// normalize(projection^T * descriptor + bias). A zero pre-normalization
/// vector falls back to the first basis vector and sets `degenerate`.
EncodeResult encode(const Eigen::VectorXd& descriptor, const EncoderParams& params);

/// Binary encoder file: magic "EPBE", version u32, descriptor_len u32,
/// dim u32, then f64 projection row-major, f64 bias, f64 log_tau.
void save_encoder(const std::filesystem::path& path, const EncoderParams& params);
EncoderParams load_encoder(const std::filesystem::path& path);

}  // namespace panobev
