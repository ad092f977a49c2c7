#include "panobev/encoder.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "panobev/rng.hpp"
#include "serial.hpp"

namespace panobev {

namespace {
constexpr char kEncoderMagic[5] = "EPBE";
constexpr std::uint32_t kEncoderVersion = 1;
constexpr double kZeroNormFloor = 1e-12;
}  // namespace

// random_permutation lives here so rng.hpp stays header-only-light.
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.next_below(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

double EncoderParams::tau() const { return std::exp(log_tau); }

EncoderParams init_encoder(int descriptor_len, int dim, std::uint64_t seed, double tau_init) {
  if (descriptor_len < 1 || dim < 2) {
    throw std::invalid_argument("init_encoder: need descriptor_len >= 1 and dim >= 2");
  }
  if (!(tau_init > 0.0)) {
    throw std::invalid_argument("init_encoder: tau_init must be positive");
  }

  EncoderParams params;
  params.projection.resize(descriptor_len, dim);
  params.bias = Eigen::VectorXd::Zero(dim);
  params.log_tau = std::log(tau_init);

  const double bound = std::sqrt(6.0 / (descriptor_len + dim));
  Rng rng(seed);
  for (int r = 0; r < descriptor_len; ++r) {
    for (int c = 0; c < dim; ++c) {
      params.projection(r, c) = rng.uniform(-bound, bound);
    }
  }
  return params;
}

EncodeResult encode(const Eigen::VectorXd& descriptor, const EncoderParams& params) {
  if (descriptor.size() != params.projection.rows()) {
    throw std::invalid_argument("encode: descriptor length " + std::to_string(descriptor.size()) +
                                " does not match projection rows " +
                                std::to_string(params.projection.rows()));
  }
  Eigen::VectorXd pre = params.projection.transpose() * descriptor + params.bias;
  const double norm = pre.norm();
  if (norm < kZeroNormFloor) {
    Eigen::VectorXd fallback = Eigen::VectorXd::Zero(params.projection.cols());
    fallback[0] = 1.0;
    return {std::move(fallback), true};
  }
  return {pre / norm, false};
}

void save_encoder(const std::filesystem::path& path, const EncoderParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_encoder: cannot open " + path.string());

  detail::write_magic(out, kEncoderMagic);
  detail::write_le<std::uint32_t>(out, kEncoderVersion);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.projection.rows()));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.projection.cols()));
  for (Eigen::Index r = 0; r < params.projection.rows(); ++r) {
    for (Eigen::Index c = 0; c < params.projection.cols(); ++c) {
      detail::write_le<double>(out, params.projection(r, c));
    }
  }
  for (Eigen::Index k = 0; k < params.bias.size(); ++k) {
    detail::write_le<double>(out, params.bias[k]);
  }
  detail::write_le<double>(out, params.log_tau);
  if (!out) throw std::runtime_error("save_encoder: write failed for " + path.string());
}

EncoderParams load_encoder(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_encoder: cannot open " + path.string());

  detail::expect_magic(in, kEncoderMagic, "load_encoder");
  const auto version = detail::read_le<std::uint32_t>(in);
  if (version != kEncoderVersion) {
    throw std::runtime_error("load_encoder: unsupported version " + std::to_string(version));
  }
  const auto rows = detail::read_le<std::uint32_t>(in);
  const auto cols = detail::read_le<std::uint32_t>(in);
  if (rows < 1 || cols < 2) {
    throw std::runtime_error("load_encoder: corrupt dimensions in " + path.string());
  }

  EncoderParams params;
  params.projection.resize(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      params.projection(r, c) = detail::read_le<double>(in);
    }
  }
  params.bias.resize(cols);
  for (std::uint32_t k = 0; k < cols; ++k) params.bias[k] = detail::read_le<double>(in);
  params.log_tau = detail::read_le<double>(in);
  return params;
}

}  // namespace panobev
