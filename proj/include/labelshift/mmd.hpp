#pragma once

#include "labelshift/detect.hpp"
#include "labelshift/rng.hpp"
#include "labelshift/types.hpp"

namespace labelshift::detect {

/// Median pairwise Euclidean distance over the pooled rows of a and b (the
/// median trick). Throws DomainError if the median is zero.
double median_pairwise_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Biased weighted MMD^2 between the w-weighted source rows and the target
/// rows under an RBF kernel exp(-||x-y||^2 / (2 bandwidth^2)). Source row i
/// carries mass w(i)/n, target rows 1/m. Always >= 0.
double weighted_mmd2(const Eigen::MatrixXd& source, const Eigen::VectorXd& source_weights,
                     const Eigen::MatrixXd& target, double bandwidth);

/// Checks whether the label-shift assumption is compatible with the data:
/// under label shift and correct per-class weights w, the w-weighted source
/// score distribution matches the target score distribution, so the weighted
/// MMD^2 should be statistically indistinguishable from zero.
///
/// The null distribution is bootstrapped from the source pool: each
/// replication resamples a pseudo-source (uniform, keeping its weights) and a
/// pseudo-target (probability proportional to w) and recomputes the
/// statistic. Replication b draws from substream(seed, b), so results do not
/// depend on evaluation order.
ShiftReport assumption_check_mmd(const Eigen::MatrixXd& source_scores,
                                 const Eigen::VectorXi& source_labels,
                                 const Eigen::VectorXd& w,
                                 const Eigen::MatrixXd& target_scores, int bootstrap_reps,
                                 SeededRng rng, double alpha = 0.05);

}  // namespace labelshift::detect
