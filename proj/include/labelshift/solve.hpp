#pragma once

#include <optional>
#include <vector>

#include "labelshift/confusion.hpp"
#include "labelshift/types.hpp"

namespace labelshift {

enum class Solver { Lu, PseudoInverse };

/// Estimated importance weights q(y)/p(y) with solve diagnostics.
struct WeightEstimate {
  Eigen::VectorXd w;          // clipped weights, all >= 0
  Eigen::VectorXd w_raw;      // solver output before clipping
  Eigen::VectorXd mu_y;       // diag(nu_y) * w; not renormalized after clipping
  double sigma_min = 0.0;     // smallest singular value of the confusion matrix
  bool fallback = false;      // sigma_min <= delta, w forced to all-ones
  std::vector<bool> clipped;  // per class, w_raw < 0
  std::optional<double> bound;  // square-error diagnostic, set when m is known

  bool any_clipped() const {
    for (bool c : clipped)
      if (c) return true;
    return false;
  }

  /// mu_y pushed back to the simplex, for reporting only.
  LabelDistribution mu_y_normalized() const { return LabelDistribution::from_counts(mu_y); }
};

/// Smallest singular value of the confusion matrix, by full SVD of the small
/// dense k x k system.
double smallest_singular_value(const Eigen::MatrixXd& matrix);
double smallest_singular_value(const ConfusionMatrix& c);

/// High-probability square-error diagnostic for the weight estimate:
///   80 log(n) ||w||^2 / (sigma_min^2 n) + 80 k log(m) / (sigma_min^2 m).
/// Uses the plug-in ||w_hat||^2; a diagnostic, not a guarantee.
double error_bound(Eigen::Index n, Eigen::Index m, int k, double sigma_min,
                   const Eigen::VectorXd& w);

/// Solves C * w = mu_hat for the importance weights. If sigma_min(C) <= delta
/// the system is declared unreliable and w falls back to all-ones; otherwise
/// the solve runs through LU with partial pivoting or, for degenerate
/// operators, the SVD pseudo-inverse. Negative weights are clipped to zero.
/// Requires 0 < delta < 1/k.
WeightEstimate solve_weights(const ConfusionMatrix& c, const LabelDistribution& mu_hat,
                             const LabelDistribution& nu_y, double delta,
                             Solver solver = Solver::Lu);

/// Default fallback threshold: one order of magnitude below the
/// sigma_min = 1/k of a perfect classifier under uniform priors.
inline double default_delta(LabelSpace space) { return 1.0 / (10.0 * space.k); }

struct EstimateOptions {
  double delta = 0.0;  // <= 0 means default_delta(space)
  Solver solver = Solver::Lu;
};

/// Full plug-in estimate from evaluations: confusion and label marginal from
/// the source, prediction marginal from the target, then solve_weights.
/// Prediction kinds must match between source and target. Fills the error
/// bound diagnostic from the two sample sizes.
WeightEstimate estimate_weights(const SourceEval& source, const TargetEval& target,
                                LabelSpace space, const EstimateOptions& opts = {});

}  // namespace labelshift
