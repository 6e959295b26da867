#include "labelshift/confusion.hpp"

namespace labelshift {

ConfusionMatrix estimate_confusion(const SourceEval& eval, LabelSpace space) {
  check_labels(eval.labels, space, "estimate_confusion");
  const Eigen::Index n = eval.n();
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(space.k, space.k);

  if (eval.preds.mode() == PredMode::Hard) {
    check_labels(eval.preds.hard_labels(), space, "estimate_confusion (predictions)");
    for (Eigen::Index l = 0; l < n; ++l) counts(eval.preds.hard_labels()(l), eval.labels(l)) += 1.0;
  } else {
    const Eigen::MatrixXd& probs = eval.preds.soft_probs();
    if (probs.cols() != space.k)
      throw FormatError("estimate_confusion: soft predictions have " +
                        std::to_string(probs.cols()) + " columns, expected k=" +
                        std::to_string(space.k));
    for (Eigen::Index l = 0; l < n; ++l) counts.col(eval.labels(l)) += probs.row(l).transpose();
  }

  return ConfusionMatrix(counts / static_cast<double>(n), eval.preds.mode(), n);
}

LabelDistribution estimate_pred_marginal(const Predictions& preds, LabelSpace space) {
  const Eigen::Index n = preds.count();
  if (preds.mode() == PredMode::Hard) {
    check_labels(preds.hard_labels(), space, "estimate_pred_marginal");
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(space.k);
    for (Eigen::Index l = 0; l < n; ++l) counts(preds.hard_labels()(l)) += 1.0;
    return LabelDistribution(counts / static_cast<double>(n));
  }
  const Eigen::MatrixXd& probs = preds.soft_probs();
  if (probs.cols() != space.k)
    throw FormatError("estimate_pred_marginal: soft predictions have " +
                      std::to_string(probs.cols()) + " columns, expected k=" +
                      std::to_string(space.k));
  Eigen::VectorXd mean = probs.colwise().sum().transpose() / static_cast<double>(n);
  return LabelDistribution::from_counts(mean);
}

LabelDistribution estimate_label_marginal(const Eigen::VectorXi& labels, LabelSpace space) {
  if (labels.size() == 0) throw DomainError("estimate_label_marginal: empty input");
  check_labels(labels, space, "estimate_label_marginal");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(space.k);
  for (Eigen::Index l = 0; l < labels.size(); ++l) counts(labels(l)) += 1.0;
  return LabelDistribution(counts / static_cast<double>(labels.size()));
}

}  // namespace labelshift
