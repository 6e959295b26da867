#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace labelshift {

/// Raised when a value is outside its mathematical domain (bad label,
/// non-positive concentration, threshold out of range, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when structured input is malformed (mixed prediction kinds,
/// unparsable file rows, bad magic numbers, ...).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a requested distribution puts mass on classes that have no
/// examples to draw from, or a data split loses a class entirely.
class SupportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Discrete label space {0, 1, ..., k-1}.
struct LabelSpace {
  int k;

  explicit LabelSpace(int k_) : k(k_) {
    if (k < 2) throw DomainError("LabelSpace: k must be at least 2, got " + std::to_string(k));
  }
};

/// A point on the k-simplex. Entries are nonnegative and sum to one within
/// 1e-12; constructors reject anything else.
class LabelDistribution {
 public:
  explicit LabelDistribution(Eigen::VectorXd probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) throw DomainError("LabelDistribution: need at least 2 classes");
    if ((probs_.array() < 0.0).any())
      throw DomainError("LabelDistribution: negative probability entry");
    double sum = probs_.sum();
    if (std::abs(sum - 1.0) > 1e-12)
      throw DomainError("LabelDistribution: entries sum to " + std::to_string(sum) +
                        ", expected 1 within 1e-12");
  }

  static LabelDistribution uniform(LabelSpace space) {
    return LabelDistribution(Eigen::VectorXd::Constant(space.k, 1.0 / space.k));
  }

  /// Normalizes a vector of nonnegative counts or masses to the simplex.
  static LabelDistribution from_counts(const Eigen::VectorXd& counts) {
    if ((counts.array() < 0.0).any())
      throw DomainError("LabelDistribution::from_counts: negative count");
    double total = counts.sum();
    if (total <= 0.0) throw DomainError("LabelDistribution::from_counts: all-zero counts");
    return LabelDistribution(counts / total);
  }

  const Eigen::VectorXd& probs() const { return probs_; }
  Eigen::Index k() const { return probs_.size(); }
  double operator[](Eigen::Index i) const { return probs_(i); }

 private:
  Eigen::VectorXd probs_;
};

enum class PredMode { Hard, Soft };

/// Classifier outputs for a batch of examples: either hard labels or rows of
/// class probabilities. Soft rows must be nonnegative and sum to one within
/// 1e-9 on input; they are renormalized exactly so downstream moment
/// identities hold to full precision.
class Predictions {
 public:
  static Predictions hard(Eigen::VectorXi labels) {
    if (labels.size() == 0) throw DomainError("Predictions: empty input");
    Predictions p;
    p.mode_ = PredMode::Hard;
    p.hard_ = std::move(labels);
    return p;
  }

  static Predictions soft(Eigen::MatrixXd probs) {
    if (probs.rows() == 0) throw DomainError("Predictions: empty input");
    if (probs.cols() < 2) throw DomainError("Predictions: soft rows need at least 2 columns");
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
      if ((probs.row(i).array() < 0.0).any())
        throw FormatError("Predictions: negative probability in soft row " + std::to_string(i));
      double s = probs.row(i).sum();
      if (std::abs(s - 1.0) > 1e-9)
        throw FormatError("Predictions: soft row " + std::to_string(i) + " sums to " +
                          std::to_string(s) + ", expected 1 within 1e-9");
      // Renormalize rows that are meaningfully off the simplex; rows exact to
      // a few ulp stay untouched so file round-trips are bit-exact.
      if (std::abs(s - 1.0) > 1e-13) probs.row(i) /= s;
    }
    Predictions p;
    p.mode_ = PredMode::Soft;
    p.soft_ = std::move(probs);
    return p;
  }

  PredMode mode() const { return mode_; }
  Eigen::Index count() const {
    return mode_ == PredMode::Hard ? hard_.size() : soft_.rows();
  }
  /// Number of classes carried by soft rows; hard predictions do not pin k.
  Eigen::Index soft_width() const { return soft_.cols(); }

  const Eigen::VectorXi& hard_labels() const { return hard_; }
  const Eigen::MatrixXd& soft_probs() const { return soft_; }

  /// Hard view: soft rows reduce by argmax, ties broken toward the lowest
  /// class index.
  Eigen::VectorXi argmax_labels() const {
    if (mode_ == PredMode::Hard) return hard_;
    Eigen::VectorXi out(soft_.rows());
    for (Eigen::Index i = 0; i < soft_.rows(); ++i) {
      int best = 0;
      for (Eigen::Index j = 1; j < soft_.cols(); ++j)
        if (soft_(i, j) > soft_(i, best)) best = static_cast<int>(j);
      out(i) = best;
    }
    return out;
  }

 private:
  Predictions() = default;
  PredMode mode_ = PredMode::Hard;
  Eigen::VectorXi hard_;
  Eigen::MatrixXd soft_;
};

/// Labeled source-domain evaluation: predictions paired with true labels.
struct SourceEval {
  Predictions preds;
  Eigen::VectorXi labels;

  SourceEval(Predictions p, Eigen::VectorXi y) : preds(std::move(p)), labels(std::move(y)) {
    if (preds.count() != labels.size())
      throw DomainError("SourceEval: " + std::to_string(preds.count()) + " predictions vs " +
                        std::to_string(labels.size()) + " labels");
  }

  Eigen::Index n() const { return labels.size(); }
};

/// Unlabeled target-domain evaluation.
struct TargetEval {
  Predictions preds;

  explicit TargetEval(Predictions p) : preds(std::move(p)) {}

  Eigen::Index m() const { return preds.count(); }
};

/// Feature matrix (examples as rows) with integer labels.
struct Dataset {
  Eigen::MatrixXd features;  // n x d
  Eigen::VectorXi labels;    // n
  LabelSpace space;

  Dataset(Eigen::MatrixXd x, Eigen::VectorXi y, LabelSpace s)
      : features(std::move(x)), labels(std::move(y)), space(s) {
    if (features.rows() != labels.size())
      throw DomainError("Dataset: feature rows and label count differ");
    for (Eigen::Index i = 0; i < labels.size(); ++i)
      if (labels(i) < 0 || labels(i) >= space.k)
        throw DomainError("Dataset: label " + std::to_string(labels(i)) + " out of range at row " +
                          std::to_string(i));
    if (!features.allFinite()) throw DomainError("Dataset: non-finite feature value");
  }

  Eigen::Index n() const { return labels.size(); }
  Eigen::Index dim() const { return features.cols(); }
};

/// Checks a label sequence against a label space.
inline void check_labels(const Eigen::VectorXi& labels, LabelSpace space, const char* what) {
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels(i) < 0 || labels(i) >= space.k)
      throw DomainError(std::string(what) + ": label " + std::to_string(labels(i)) +
                        " out of range [0, " + std::to_string(space.k) + ") at index " +
                        std::to_string(i));
}

}  // namespace labelshift
