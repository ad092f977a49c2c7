#include "panobev/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "panobev/loss.hpp"
#include "panobev/rng.hpp"

namespace panobev {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;
constexpr double kZeroNormFloor = 1e-12;

struct AdamState {
  Eigen::MatrixXd m_proj, v_proj;
  Eigen::VectorXd m_bias, v_bias;
  double m_tau = 0.0, v_tau = 0.0;
  long step = 0;

  explicit AdamState(const EncoderParams& p)
      : m_proj(Eigen::MatrixXd::Zero(p.projection.rows(), p.projection.cols())),
        v_proj(Eigen::MatrixXd::Zero(p.projection.rows(), p.projection.cols())),
        m_bias(Eigen::VectorXd::Zero(p.bias.size())),
        v_bias(Eigen::VectorXd::Zero(p.bias.size())) {}
};

/// Forward pass for one side of a batch; keeps what backward needs.
struct BatchSide {
  Eigen::MatrixXd embeddings;  // b x d unit rows (or fallback e1)
  Eigen::VectorXd norms;       // pre-normalization norms, 0 when degenerate
};

BatchSide encode_batch(const std::vector<Eigen::VectorXd>& descs,
                       const std::vector<std::size_t>& order, std::size_t begin, std::size_t count,
                       const EncoderParams& params) {
  const Eigen::Index d = params.projection.cols();
  BatchSide side;
  side.embeddings.resize(count, d);
  side.norms.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Eigen::VectorXd pre =
        params.projection.transpose() * descs[order[begin + k]] + params.bias;
    const double norm = pre.norm();
    if (norm < kZeroNormFloor) {
      side.embeddings.row(k).setZero();
      side.embeddings(k, 0) = 1.0;
      side.norms[k] = 0.0;
    } else {
      side.embeddings.row(k) = (pre / norm).transpose();
      side.norms[k] = norm;
    }
  }
  return side;
}

/// Accumulates projection/bias gradients through the normalization:
/// dL/dz = (g - y (y.g)) / |z| for y = z/|z|.
void backprop_side(const BatchSide& side, const Eigen::MatrixXd& d_embeddings,
                   const std::vector<Eigen::VectorXd>& descs,
                   const std::vector<std::size_t>& order, std::size_t begin,
                   Eigen::MatrixXd& g_proj, Eigen::VectorXd& g_bias) {
  const Eigen::Index count = side.embeddings.rows();
  for (Eigen::Index k = 0; k < count; ++k) {
    if (side.norms[k] == 0.0) continue;  // fallback embedding is constant
    const Eigen::VectorXd y = side.embeddings.row(k).transpose();
    const Eigen::VectorXd g = d_embeddings.row(k).transpose();
    const Eigen::VectorXd dz = (g - y * y.dot(g)) / side.norms[k];
    g_proj.noalias() += descs[order[begin + k]] * dz.transpose();
    g_bias += dz;
  }
}

void adamw_update(EncoderParams& params, AdamState& state, const Eigen::MatrixXd& g_proj,
                  const Eigen::VectorXd& g_bias, double g_log_tau, const TrainConfig& cfg) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));

  state.m_proj = kBeta1 * state.m_proj + (1.0 - kBeta1) * g_proj;
  state.v_proj =
      (kBeta2 * state.v_proj.array() + (1.0 - kBeta2) * g_proj.array().square()).matrix();
  params.projection.array() -=
      cfg.lr * ((state.m_proj.array() / bc1) / ((state.v_proj.array() / bc2).sqrt() + kEps) +
                cfg.weight_decay * params.projection.array());

  state.m_bias = kBeta1 * state.m_bias + (1.0 - kBeta1) * g_bias;
  state.v_bias =
      (kBeta2 * state.v_bias.array() + (1.0 - kBeta2) * g_bias.array().square()).matrix();
  params.bias.array() -=
      cfg.lr * (state.m_bias.array() / bc1) / ((state.v_bias.array() / bc2).sqrt() + kEps);

  state.m_tau = kBeta1 * state.m_tau + (1.0 - kBeta1) * g_log_tau;
  state.v_tau = kBeta2 * state.v_tau + (1.0 - kBeta2) * g_log_tau * g_log_tau;
  params.log_tau -= cfg.lr * (state.m_tau / bc1) / (std::sqrt(state.v_tau / bc2) + kEps);
}

}  // namespace

TrainResult train_branch(const std::vector<Eigen::VectorXd>& query_descriptors,
                         const std::vector<Eigen::VectorXd>& reference_descriptors,
                         const TrainConfig& config) {
  const std::size_t n = query_descriptors.size();
  if (n < 2) throw std::invalid_argument("train_branch: need at least 2 training pairs");
  if (reference_descriptors.size() != n) {
    throw std::invalid_argument("train_branch: query/reference pair count mismatch");
  }
  if (config.batch < 2) throw std::invalid_argument("train_branch: batch must be >= 2");
  if (config.epochs < 1) throw std::invalid_argument("train_branch: epochs must be >= 1");
  const Eigen::Index desc_len = query_descriptors[0].size();
  for (const auto& d : query_descriptors) {
    if (d.size() != desc_len) throw std::invalid_argument("train_branch: ragged descriptors");
  }
  for (const auto& d : reference_descriptors) {
    if (d.size() != desc_len) throw std::invalid_argument("train_branch: ragged descriptors");
  }

  TrainResult result;
  result.params =
      init_encoder(static_cast<int>(desc_len), config.dim, config.seed, config.tau_init);
  AdamState state(result.params);
  Rng rng(Rng::mix(config.seed, 0x7261696eULL));  // shuffle stream

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<std::size_t> order = random_permutation(n, rng);
    double loss_sum = 0.0;
    std::size_t seen = 0;

    for (std::size_t begin = 0; begin < n;) {
      const std::size_t count = std::min<std::size_t>(config.batch, n - begin);
      if (count < 2) break;  // a trailing singleton has no negatives

      const BatchSide q = encode_batch(query_descriptors, order, begin, count, result.params);
      const BatchSide r = encode_batch(reference_descriptors, order, begin, count, result.params);

      const double tau = result.params.tau();
      const InfoNceResult nce =
          info_nce_batch(q.embeddings, r.embeddings, tau, config.symmetric);
      loss_sum += nce.loss * static_cast<double>(count);
      seen += count;

      Eigen::MatrixXd g_proj =
          Eigen::MatrixXd::Zero(result.params.projection.rows(), result.params.projection.cols());
      Eigen::VectorXd g_bias = Eigen::VectorXd::Zero(result.params.bias.size());
      backprop_side(q, nce.d_queries, query_descriptors, order, begin, g_proj, g_bias);
      backprop_side(r, nce.d_refs, reference_descriptors, order, begin, g_proj, g_bias);

      adamw_update(result.params, state, g_proj, g_bias, nce.d_log_tau, config);
      begin += count;
    }

    result.curve.push_back({epoch, seen ? loss_sum / static_cast<double>(seen) : 0.0,
                            result.params.tau()});
  }
  return result;
}

void save_loss_curve(const std::filesystem::path& path,
                     const std::vector<LossCurvePoint>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_loss_curve: cannot open " + path.string());
  out << "epoch,mean_loss,tau\n";
  char line[96];
  for (const LossCurvePoint& p : curve) {
    std::snprintf(line, sizeof(line), "%d,%.12g,%.12g\n", p.epoch, p.mean_loss, p.tau);
    out << line;
  }
}

}  // namespace panobev
