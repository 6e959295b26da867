#include "labelshift/solve.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace labelshift {

double smallest_singular_value(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols())
    throw DomainError("smallest_singular_value: matrix must be square");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix);
  return svd.singularValues()(matrix.rows() - 1);
}

double smallest_singular_value(const ConfusionMatrix& c) {
  return smallest_singular_value(c.entries);
}

double error_bound(Eigen::Index n, Eigen::Index m, int k, double sigma_min,
                   const Eigen::VectorXd& w) {
  if (n < 2 || m < 2) throw DomainError("error_bound: n and m must be at least 2");
  if (sigma_min <= 0.0) throw DomainError("error_bound: sigma_min must be positive");
  const double s2 = sigma_min * sigma_min;
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return 80.0 * std::log(nn) * w.squaredNorm() / (s2 * nn) +
         80.0 * static_cast<double>(k) * std::log(mm) / (s2 * mm);
}

namespace {

Eigen::VectorXd pseudo_inverse_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = 1e-12 * sv(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * b;
}

}  // namespace

WeightEstimate solve_weights(const ConfusionMatrix& c, const LabelDistribution& mu_hat,
                             const LabelDistribution& nu_y, double delta, Solver solver) {
  const Eigen::Index k = c.k();
  if (mu_hat.k() != k || nu_y.k() != k)
    throw DomainError("solve_weights: dimension mismatch between C, mu_hat, nu_y");
  if (delta <= 0.0 || delta >= 1.0 / static_cast<double>(k))
    throw DomainError("solve_weights: delta must satisfy 0 < delta < 1/k");

  WeightEstimate est;
  est.sigma_min = smallest_singular_value(c);
  est.clipped.assign(static_cast<std::size_t>(k), false);

  if (est.sigma_min <= delta) {
    est.fallback = true;
    est.w = Eigen::VectorXd::Ones(k);
    est.w_raw = est.w;
    est.mu_y = nu_y.probs();
    return est;
  }

  if (solver == Solver::Lu) {
    est.w_raw = Eigen::PartialPivLU<Eigen::MatrixXd>(c.entries).solve(mu_hat.probs());
  } else {
    est.w_raw = pseudo_inverse_solve(c.entries, mu_hat.probs());
  }

  est.w = est.w_raw.cwiseMax(0.0);
  for (Eigen::Index i = 0; i < k; ++i) est.clipped[static_cast<std::size_t>(i)] = est.w_raw(i) < 0.0;
  est.mu_y = nu_y.probs().cwiseProduct(est.w);
  return est;
}

WeightEstimate estimate_weights(const SourceEval& source, const TargetEval& target,
                                LabelSpace space, const EstimateOptions& opts) {
  if (source.preds.mode() != target.preds.mode())
    throw FormatError("estimate_weights: source and target prediction kinds differ");
  const double delta = opts.delta > 0.0 ? opts.delta : default_delta(space);

  ConfusionMatrix c = estimate_confusion(source, space);
  LabelDistribution mu_hat = estimate_pred_marginal(target.preds, space);
  LabelDistribution nu_y = estimate_label_marginal(source.labels, space);

  WeightEstimate est = solve_weights(c, mu_hat, nu_y, delta, opts.solver);
  if (!est.fallback && source.n() >= 2 && target.m() >= 2)
    est.bound = error_bound(source.n(), target.m(), space.k, est.sigma_min, est.w);
  return est;
}

}  // namespace labelshift
