#pragma once

#include "labelshift/types.hpp"

namespace labelshift {

/// Empirical joint distribution of (predicted label, true label) on source
/// data. Rows index the prediction, columns the true label, so column sums
/// reproduce the empirical label marginal and row sums the predicted-label
/// marginal. In soft mode the row indicator is replaced by the predicted
/// probability of each class.
struct ConfusionMatrix {
  Eigen::MatrixXd entries;  // k x k, entry (i, j) estimates p(f(x)=i, y=j)
  PredMode mode;
  Eigen::Index n;           // sample count behind the estimate

  ConfusionMatrix(Eigen::MatrixXd e, PredMode m, Eigen::Index count)
      : entries(std::move(e)), mode(m), n(count) {
    if (entries.rows() != entries.cols() || entries.rows() < 2)
      throw DomainError("ConfusionMatrix: expected square k x k matrix with k >= 2");
    if ((entries.array() < 0.0).any()) throw DomainError("ConfusionMatrix: negative entry");
    double total = entries.sum();
    if (std::abs(total - 1.0) > 1e-12)
      throw DomainError("ConfusionMatrix: entries sum to " + std::to_string(total) +
                        ", expected 1 within 1e-12");
  }

  Eigen::Index k() const { return entries.rows(); }
  Eigen::VectorXd column_sums() const { return entries.colwise().sum().transpose(); }
  Eigen::VectorXd row_sums() const { return entries.rowwise().sum(); }
};

/// Joint estimate C[i, j] = (1/n) sum_l pred_l(i) * 1{y_l = j}, where
/// pred_l(i) is an indicator in hard mode and the predicted probability of
/// class i in soft mode.
ConfusionMatrix estimate_confusion(const SourceEval& eval, LabelSpace space);

/// Empirical distribution of the predictions themselves (soft mode: the mean
/// predicted probability per class).
LabelDistribution estimate_pred_marginal(const Predictions& preds, LabelSpace space);

/// Empirical class frequencies of a label sequence.
LabelDistribution estimate_label_marginal(const Eigen::VectorXi& labels, LabelSpace space);

}  // namespace labelshift
