#include "labelshift/model.hpp"

#include <cmath>

namespace labelshift::model {

Dataset gen_gaussian_mixture(LabelSpace space, Eigen::Index dim, const Eigen::MatrixXd& means,
                             double scale, const LabelDistribution& q, Eigen::Index n,
                             SeededRng& rng) {
  if (means.rows() != space.k || means.cols() != dim)
    throw DomainError("gen_gaussian_mixture: means must be k x dim");
  if (!means.allFinite()) throw DomainError("gen_gaussian_mixture: non-finite means");
  if (scale <= 0.0) throw DomainError("gen_gaussian_mixture: scale must be positive");
  if (q.k() != space.k) throw DomainError("gen_gaussian_mixture: distribution k mismatch");

  Eigen::MatrixXd features(n, dim);
  Eigen::VectorXi labels(n);
  // Per example: one label draw, then dim normal draws.
  for (Eigen::Index i = 0; i < n; ++i) {
    int c = rng.draw_class(q);
    labels(i) = c;
    for (Eigen::Index j = 0; j < dim; ++j) features(i, j) = means(c, j) + scale * rng.normal();
  }
  return Dataset(std::move(features), std::move(labels), space);
}

Eigen::MatrixXd corner_means(LabelSpace space, Eigen::Index dim, double separation, double scale) {
  if (dim < space.k)
    throw DomainError("corner_means: need dim >= k to place equidistant class means");
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(space.k, dim);
  const double r = separation * scale / std::sqrt(2.0);
  for (int c = 0; c < space.k; ++c) means(c, c) = r;
  return means;
}

namespace {

void validate_weights(const std::optional<Eigen::VectorXd>& w, Eigen::Index n) {
  if (!w) return;
  if (w->size() != n) throw DomainError("example weights length does not match dataset size");
  if ((w->array() < 0.0).any()) throw DomainError("example weights must be nonnegative");
  if (w->sum() <= 0.0) throw DomainError("example weights must not be all zero");
}

// Row-wise softmax with max subtraction; also returns the per-row log-sum-exp
// so the loss reuses the same stabilization.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits, Eigen::VectorXd* lse_out = nullptr) {
  Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  Eigen::MatrixXd shifted = logits.colwise() - row_max;
  Eigen::MatrixXd ex = shifted.array().exp();
  Eigen::VectorXd sums = ex.rowwise().sum();
  if (lse_out) *lse_out = row_max.array() + sums.array().log();
  return ex.array().colwise() / sums.array();
}

}  // namespace

LossGrad loss_and_grad(const SoftmaxModel& model, const Dataset& data,
                       const std::optional<Eigen::VectorXd>& example_weights, double l2) {
  if (data.dim() != model.dim()) throw DomainError("loss_and_grad: feature width mismatch");
  if (l2 < 0.0) throw DomainError("loss_and_grad: l2 must be nonnegative");
  validate_weights(example_weights, data.n());
  const Eigen::Index n = data.n();
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::MatrixXd logits =
      (data.features * model.weights.transpose()).rowwise() + model.bias.transpose();
  Eigen::VectorXd lse;
  Eigen::MatrixXd probs = softmax_rows(logits, &lse);

  double loss = 0.0;
  Eigen::MatrixXd dlogits = probs;  // becomes (w_i/n) (p_i - onehot(y_i)) row by row
  for (Eigen::Index i = 0; i < n; ++i) {
    double wi = example_weights ? (*example_weights)(i) : 1.0;
    loss += wi * (lse(i) - logits(i, data.labels(i)));
    dlogits(i, data.labels(i)) -= 1.0;
    dlogits.row(i) *= wi * inv_n;
  }
  loss *= inv_n;
  loss += 0.5 * l2 * model.weights.squaredNorm();

  LossGrad out;
  out.loss = loss;
  out.grad_weights = dlogits.transpose() * data.features + l2 * model.weights;
  out.grad_bias = dlogits.colwise().sum().transpose();
  return out;
}

SoftmaxModel train_softmax(const Dataset& data,
                           const std::optional<Eigen::VectorXd>& example_weights,
                           const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0.0) throw DomainError("train_softmax: learning rate must be positive");
  if (cfg.iterations < 0) throw DomainError("train_softmax: negative iteration count");
  validate_weights(example_weights, data.n());

  SoftmaxModel model = SoftmaxModel::zero(data.space, data.dim());
  for (int it = 0; it < cfg.iterations; ++it) {
    LossGrad lg = loss_and_grad(model, data, example_weights, cfg.l2);
    model.weights -= cfg.learning_rate * lg.grad_weights;
    model.bias -= cfg.learning_rate * lg.grad_bias;
  }
  return model;
}

Eigen::MatrixXd predict_soft(const SoftmaxModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.dim()) throw DomainError("predict: feature width mismatch");
  Eigen::MatrixXd logits =
      (features * model.weights.transpose()).rowwise() + model.bias.transpose();
  return softmax_rows(logits);
}

Eigen::VectorXi predict_hard(const SoftmaxModel& model, const Eigen::MatrixXd& features) {
  Eigen::MatrixXd probs = predict_soft(model, features);
  Eigen::VectorXi out(probs.rows());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < probs.cols(); ++j)
      if (probs(i, j) > probs(i, best)) best = static_cast<int>(j);
    out(i) = best;
  }
  return out;
}

Predictions predict(const SoftmaxModel& model, const Eigen::MatrixXd& features, PredMode mode) {
  return mode == PredMode::Hard ? Predictions::hard(predict_hard(model, features))
                                : Predictions::soft(predict_soft(model, features));
}

double accuracy(const SoftmaxModel& model, const Eigen::MatrixXd& features,
                const Eigen::VectorXi& labels) {
  if (features.rows() != labels.size()) throw DomainError("accuracy: row/label count mismatch");
  if (labels.size() == 0) throw DomainError("accuracy: empty evaluation set");
  Eigen::VectorXi preds = predict_hard(model, features);
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (preds(i) == labels(i)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace labelshift::model
