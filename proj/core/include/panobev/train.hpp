#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "panobev/encoder.hpp"

namespace panobev {

struct TrainConfig {
  int batch = 32;
  int epochs = 30;
  double lr = 1e-3;
  double weight_decay = 0.01;
  std::uint64_t seed = 0;
  int dim = 64;
  double tau_init = 0.07;
  bool symmetric = true;  // average both InfoNCE directions
};

struct LossCurvePoint {
  int epoch = 0;
  double mean_loss = 0.0;
  double tau = 0.0;
};

struct TrainResult {
  EncoderParams params;
  std::vector<LossCurvePoint> curve;
};

/// Trains one branch encoder on row-aligned (query descriptor, reference
/// descriptor) pairs with in-batch InfoNCE and AdamW-style updates
/// (beta1 0.9, beta2 0.999, eps 1e-8, decoupled weight decay on the
/// projection only). Bit-reproducible for a given config: initialization,
/// shuffling, and update order are all derived from the seed.
TrainResult train_branch(const std::vector<Eigen::VectorXd>& query_descriptors,
                         const std::vector<Eigen::VectorXd>& reference_descriptors,
                         const TrainConfig& config);

/// Writes the loss curve as CSV "epoch,mean_loss,tau".
void save_loss_curve(const std::filesystem::path& path, const std::vector<LossCurvePoint>& curve);

}  // namespace panobev
