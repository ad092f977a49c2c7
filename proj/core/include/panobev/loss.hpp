#pragma once

#include <Eigen/Core>

namespace panobev {

/// Contrastive loss for one query against a reference set: the negative
/// log softmax of the positive's similarity, with logits q.r_j / tau.
/// Computed with max subtraction; requires at least two references.
double info_nce_loss(const Eigen::VectorXd& query, const Eigen::MatrixXd& refs, int positive,
                     double tau);

struct InfoNceResult {
  double loss = 0.0;
  Eigen::MatrixXd d_queries;  // dL/dQ
  Eigen::MatrixXd d_refs;     // dL/dR
  double d_log_tau = 0.0;
};

/// In-batch contrastive loss over row-aligned query/reference matrices
/// (row k of refs is the positive for query k; the other rows are the
/// negatives). By default both softmax directions are averaged; with
/// symmetric = false only the query -> references direction is used.
/// Returns the mean loss and analytic gradients with respect to both
/// matrices and log(tau).
InfoNceResult info_nce_batch(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& refs,
                             double tau, bool symmetric = true);

}  // namespace panobev
