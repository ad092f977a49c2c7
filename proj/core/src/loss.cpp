#include "panobev/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace panobev {

namespace {

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string("info_nce: non-finite ") + what);
  }
}

/// logsumexp of a vector with max subtraction.
double logsumexp(const Eigen::VectorXd& x) {
  const double m = x.maxCoeff();
  return m + std::log((x.array() - m).exp().sum());
}

}  // namespace

double info_nce_loss(const Eigen::VectorXd& query, const Eigen::MatrixXd& refs, int positive,
                     double tau) {
  check_finite(query, "query");
  check_finite(refs, "references");
  if (refs.rows() < 2) throw std::invalid_argument("info_nce_loss: need at least 2 references");
  if (positive < 0 || positive >= refs.rows()) {
    throw std::invalid_argument("info_nce_loss: positive index out of range");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("info_nce_loss: tau must be positive and finite");
  }
  if (query.size() != refs.cols()) {
    throw std::invalid_argument("info_nce_loss: dimension mismatch");
  }

  const Eigen::VectorXd logits = (refs * query) / tau;
  return logsumexp(logits) - logits[positive];
}

InfoNceResult info_nce_batch(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& refs,
                             double tau, bool symmetric) {
  check_finite(queries, "queries");
  check_finite(refs, "references");
  if (queries.rows() != refs.rows() || queries.cols() != refs.cols()) {
    throw std::invalid_argument("info_nce_batch: queries and refs must be row-aligned");
  }
  const Eigen::Index n = queries.rows();
  if (n < 2) throw std::invalid_argument("info_nce_batch: batch must be >= 2");
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("info_nce_batch: tau must be positive and finite");
  }

  const Eigen::MatrixXd logits = (queries * refs.transpose()) / tau;  // n x n

  // Row-direction softmax (query k against all references).
  Eigen::MatrixXd soft_rows(n, n);
  double loss_rows = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lse = logsumexp(logits.row(k).transpose());
    loss_rows += lse - logits(k, k);
    soft_rows.row(k) = (logits.row(k).array() - lse).exp();
  }
  loss_rows /= static_cast<double>(n);

  InfoNceResult out;
  Eigen::MatrixXd grad_logits;  // dL/d(logits)

  if (symmetric) {
    // Column-direction softmax (reference k against all queries).
    Eigen::MatrixXd soft_cols(n, n);
    double loss_cols = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double lse = logsumexp(logits.col(k));
      loss_cols += lse - logits(k, k);
      soft_cols.col(k) = (logits.col(k).array() - lse).exp();
    }
    loss_cols /= static_cast<double>(n);

    out.loss = 0.5 * (loss_rows + loss_cols);
    grad_logits = 0.5 / static_cast<double>(n) * (soft_rows + soft_cols);
    grad_logits.diagonal().array() -= 1.0 / static_cast<double>(n);
  } else {
    out.loss = loss_rows;
    grad_logits = soft_rows / static_cast<double>(n);
    grad_logits.diagonal().array() -= 1.0 / static_cast<double>(n);
  }

  out.d_queries = grad_logits * refs / tau;
  out.d_refs = grad_logits.transpose() * queries / tau;
  // logits scale as exp(-log_tau), so d(logits)/d(log_tau) = -logits.
  out.d_log_tau = -(grad_logits.array() * logits.array()).sum();
  return out;
}

}  // namespace panobev
