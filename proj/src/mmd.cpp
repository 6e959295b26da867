#include "labelshift/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace labelshift::detect {

namespace {

Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double bandwidth) {
  const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);
  Eigen::VectorXd an = a.rowwise().squaredNorm();
  Eigen::VectorXd bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd sq =
      (an.replicate(1, b.rows()) + bn.transpose().replicate(a.rows(), 1) - 2.0 * a * b.transpose())
          .cwiseMax(0.0);
  return (-gamma * sq.array()).exp();
}

double quad_form(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& y) {
  return x.dot(kernel * y);
}

}  // namespace

double median_pairwise_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd pooled(a.rows() + b.rows(), a.cols());
  pooled << a, b;
  const Eigen::Index n = pooled.rows();
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      dists.push_back((pooled.row(i) - pooled.row(j)).norm());
  if (dists.empty()) throw DomainError("median_pairwise_distance: need at least 2 pooled points");
  auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  double med = *mid;
  if (med <= 0.0) throw DomainError("median_pairwise_distance: degenerate kernel, all points identical");
  return med;
}

double weighted_mmd2(const Eigen::MatrixXd& source, const Eigen::VectorXd& source_weights,
                     const Eigen::MatrixXd& target, double bandwidth) {
  if (source.rows() != source_weights.size())
    throw DomainError("weighted_mmd2: weight count does not match source rows");
  if ((source_weights.array() < 0.0).any()) throw DomainError("weighted_mmd2: negative weight");
  const double n = static_cast<double>(source.rows());
  const double m = static_cast<double>(target.rows());

  Eigen::VectorXd a = source_weights / n;
  Eigen::VectorXd b = Eigen::VectorXd::Constant(target.rows(), 1.0 / m);

  double ss = quad_form(rbf_kernel(source, source, bandwidth), a, a);
  double tt = quad_form(rbf_kernel(target, target, bandwidth), b, b);
  double st = quad_form(rbf_kernel(source, target, bandwidth), a, b);
  return std::max(0.0, ss + tt - 2.0 * st);
}

ShiftReport assumption_check_mmd(const Eigen::MatrixXd& source_scores,
                                 const Eigen::VectorXi& source_labels,
                                 const Eigen::VectorXd& w, const Eigen::MatrixXd& target_scores,
                                 int bootstrap_reps, SeededRng rng, double alpha) {
  const Eigen::Index n = source_scores.rows();
  const Eigen::Index m = target_scores.rows();
  if (n == 0 || m == 0) throw DomainError("assumption_check_mmd: empty scores");
  if (source_labels.size() != n)
    throw DomainError("assumption_check_mmd: label count does not match source rows");
  if (source_scores.cols() != target_scores.cols())
    throw DomainError("assumption_check_mmd: score dimensions differ");
  if ((w.array() < 0.0).any()) throw DomainError("assumption_check_mmd: negative weight");
  if (!source_scores.allFinite() || !target_scores.allFinite())
    throw DomainError("assumption_check_mmd: non-finite score");
  if (bootstrap_reps < 100) throw DomainError("assumption_check_mmd: need at least 100 bootstrap reps");

  Eigen::VectorXd example_w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int y = source_labels(i);
    if (y < 0 || y >= w.size()) throw DomainError("assumption_check_mmd: label out of range");
    example_w(i) = w(y);
  }
  if (example_w.sum() <= 0.0) throw DomainError("assumption_check_mmd: all example weights zero");

  const double bandwidth = median_pairwise_distance(source_scores, target_scores);
  const double observed = weighted_mmd2(source_scores, example_w, target_scores, bandwidth);

  // Null resampling happens entirely inside the source pool, so the kernel
  // matrix over source points is computed once and indexed per replication.
  Eigen::MatrixXd k_ss = rbf_kernel(source_scores, source_scores, bandwidth);

  // Cumulative masses for drawing pseudo-target points proportional to w.
  std::vector<double> cum(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += example_w(i);
    cum[static_cast<std::size_t>(i)] = acc;
  }
  const double w_total = acc;

  auto draw_weighted = [&](SeededRng& r) {
    double u = r.uniform() * w_total;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    return static_cast<Eigen::Index>(std::min<std::ptrdiff_t>(it - cum.begin(), n - 1));
  };

  int exceed = 0;
  std::vector<Eigen::Index> src_idx(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> tgt_idx(static_cast<std::size_t>(m));
  for (int rep = 0; rep < bootstrap_reps; ++rep) {
    SeededRng sub = rng.substream(static_cast<std::uint64_t>(rep));
    for (Eigen::Index i = 0; i < n; ++i) src_idx[static_cast<std::size_t>(i)] = sub.uniform_index(n);
    for (Eigen::Index j = 0; j < m; ++j) tgt_idx[static_cast<std::size_t>(j)] = draw_weighted(sub);

    // Same statistic as the observed one, with the pseudo-source carrying its
    // weights and the pseudo-target drawn from the w-weighted pool (the null).
    Eigen::VectorXd a(n);
    for (Eigen::Index i = 0; i < n; ++i)
      a(i) = example_w(src_idx[static_cast<std::size_t>(i)]) / static_cast<double>(n);
    const double bmass = 1.0 / static_cast<double>(m);

    double ss = 0.0, st = 0.0, tt = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index ri = src_idx[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < n; ++j)
        ss += a(i) * a(j) * k_ss(ri, src_idx[static_cast<std::size_t>(j)]);
      for (Eigen::Index j = 0; j < m; ++j)
        st += a(i) * bmass * k_ss(ri, tgt_idx[static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        tt += bmass * bmass *
              k_ss(tgt_idx[static_cast<std::size_t>(i)], tgt_idx[static_cast<std::size_t>(j)]);

    if (std::max(0.0, ss + tt - 2.0 * st) >= observed) ++exceed;
  }

  double p = (1.0 + exceed) / (1.0 + bootstrap_reps);
  return ShiftReport{TestMethod::Mmd, observed, p, alpha, p < alpha, n, m};
}

}  // namespace labelshift::detect
