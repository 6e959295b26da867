#pragma once

#include <cstdint>
#include <optional>

#include "labelshift/rng.hpp"
#include "labelshift/types.hpp"

namespace labelshift::model {

/// Multinomial softmax classifier. The estimation and correction machinery
/// treats the predictor as a black box; stronger models plug in through
/// prediction files.
struct SoftmaxModel {
  Eigen::MatrixXd weights;  // k x d
  Eigen::VectorXd bias;     // k
  LabelSpace space;

  SoftmaxModel(Eigen::MatrixXd w, Eigen::VectorXd b, LabelSpace s)
      : weights(std::move(w)), bias(std::move(b)), space(s) {
    if (weights.rows() != space.k || bias.size() != space.k)
      throw DomainError("SoftmaxModel: parameter shapes do not match label space");
    if (!weights.allFinite() || !bias.allFinite())
      throw DomainError("SoftmaxModel: non-finite parameters");
  }

  static SoftmaxModel zero(LabelSpace space, Eigen::Index dim) {
    return SoftmaxModel(Eigen::MatrixXd::Zero(space.k, dim), Eigen::VectorXd::Zero(space.k),
                        space);
  }

  Eigen::Index dim() const { return weights.cols(); }
};

struct TrainConfig {
  double learning_rate = 0.1;
  int iterations = 100;
  double l2 = 0.0;
  std::uint64_t seed = 0;  // reserved; zero init keeps training deterministic
};

struct LossGrad {
  double loss;
  Eigen::MatrixXd grad_weights;  // k x d
  Eigen::VectorXd grad_bias;     // k
};

/// Synthetic mixture: labels ~ q iid, features ~ Normal(means[label],
/// scale^2 I). Class-conditionals are fixed, so any two datasets drawn with
/// different q satisfy the label-shift assumption by construction.
Dataset gen_gaussian_mixture(LabelSpace space, Eigen::Index dim, const Eigen::MatrixXd& means,
                             double scale, const LabelDistribution& q, Eigen::Index n,
                             SeededRng& rng);

/// Class means at (separation * scale / sqrt(2)) * e_c, giving every pair of
/// classes Euclidean distance separation * scale. Requires dim >= k.
Eigen::MatrixXd corner_means(LabelSpace space, Eigen::Index dim, double separation, double scale);

/// Weighted ERM objective at the given parameters:
///   (1/n) sum_i w_i * CE(softmax(W x_i + b), y_i) + l2/2 * ||W||_F^2
/// with its exact analytic gradient. Absent weights mean all-ones.
LossGrad loss_and_grad(const SoftmaxModel& model, const Dataset& data,
                       const std::optional<Eigen::VectorXd>& example_weights, double l2);

/// Full-batch gradient descent on the objective above: parameters start at
/// zero and take exactly cfg.iterations steps, so identical inputs give
/// bit-identical models.
SoftmaxModel train_softmax(const Dataset& data,
                           const std::optional<Eigen::VectorXd>& example_weights,
                           const TrainConfig& cfg);

/// Softmax probabilities, rows on the simplex (max-subtraction for
/// stability).
Eigen::MatrixXd predict_soft(const SoftmaxModel& model, const Eigen::MatrixXd& features);

/// Argmax labels, ties broken toward the lowest class index.
Eigen::VectorXi predict_hard(const SoftmaxModel& model, const Eigen::MatrixXd& features);

Predictions predict(const SoftmaxModel& model, const Eigen::MatrixXd& features, PredMode mode);

/// Fraction of rows whose hard prediction matches the label.
double accuracy(const SoftmaxModel& model, const Eigen::MatrixXd& features,
                const Eigen::VectorXi& labels);

}  // namespace labelshift::model
