#pragma once

#include <optional>
#include <string>
#include <vector>

#include "labelshift/detect.hpp"
#include "labelshift/model.hpp"
#include "labelshift/shiftsim.hpp"
#include "labelshift/solve.hpp"

namespace labelshift::pipeline {

enum class RetrainOn { Split, Full };

/// Deterministic shuffle-and-cut used by bbsc_correct: the two index sets
/// partition 0..n-1, with the first holding floor(n * fraction) entries.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_indices(
    Eigen::Index n, double fraction, std::uint64_t seed);

/// Black box shift correction configuration.
struct CorrectionConfig {
  double delta = 0.0;  // <= 0 means default_delta
  model::TrainConfig train;
  double split_fraction = 0.5;
  RetrainOn retrain_on = RetrainOn::Full;
  std::uint64_t seed = 0;
  Solver solver = Solver::Lu;
  PredMode estimation_mode = PredMode::Hard;
  bool reuse_split = false;    // train f and estimate the confusion on the same data
  bool detect_first = false;   // run detection and skip reweighting when not rejected
  double detect_alpha = 0.05;
  detect::TestMethod detect_method = detect::TestMethod::Chi2;
};

struct CorrectionResult {
  model::SoftmaxModel model;     // corrected classifier
  model::SoftmaxModel baseline;  // unweighted classifier on the same data
  WeightEstimate weights;
  Eigen::VectorXd applied_weights;  // per-class weights the weighted ERM actually used
  bool skipped_by_detection = false;
  std::optional<detect::ShiftReport> detection;
  std::optional<double> target_accuracy;    // corrected model, when target labels given
  std::optional<double> baseline_accuracy;  // same evaluation for the baseline
};

/// Shift correction: split the training data, fit the black box on one half,
/// estimate the confusion matrix on the other, solve for the importance
/// weights against the unlabeled target predictions, and retrain with
/// per-example weight w[y_i] (negative weights clipped to zero). The weighted
/// and unweighted models train on the same examples, so a fallback (w = 1)
/// reproduces the baseline parameters exactly.
///
/// target_labels, when given, are used only to score both models.
CorrectionResult bbsc_correct(const Dataset& train, const Eigen::MatrixXd& target_features,
                              const CorrectionConfig& cfg,
                              const Eigen::VectorXi* target_labels = nullptr);

enum class ExperimentKind { Estimation, Detection, Correction };

const char* experiment_kind_name(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& name);

/// Synthetic data source: Gaussian corner mixture (see corner_means).
struct SyntheticSpec {
  LabelSpace space{3};
  Eigen::Index dim = 3;
  double scale = 1.0;
  double separation = 6.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Estimation;
  sim::ShiftKind shift_kind = sim::ShiftKind::Knockout;
  std::vector<double> shift_params;  // sweep over delta / rho / alpha
  int shift_class = 0;
  std::vector<Eigen::Index> sizes;   // n = m sweep
  int replications = 1;
  std::uint64_t base_seed = 0;
  SyntheticSpec synth;
  std::optional<Dataset> pool;  // when set, resample_by_label replaces synthesis
  model::TrainConfig train;
  double delta = 0.0;  // <= 0 means default_delta
  Solver solver = Solver::Lu;
  PredMode estimation_mode = PredMode::Hard;
  double split_fraction = 0.5;
  RetrainOn retrain_on = RetrainOn::Full;
  double alpha = 0.05;
  detect::TestMethod method = detect::TestMethod::Chi2;
};

/// One (sweep point, replication) outcome. Fields that do not apply to the
/// experiment kind stay unset and serialize as empty.
struct ResultRow {
  std::string shift_kind;
  double shift_param = 0.0;
  std::optional<int> shift_class;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  std::uint64_t seed = 0;  // substream seed driving the replication
  int replication = 0;
  std::optional<double> mse_w;
  std::optional<double> mse_mu;
  std::optional<double> sigma_min;
  std::optional<double> p_value;
  std::optional<bool> reject;
  std::optional<double> acc_baseline;
  std::optional<double> acc_corrected;
};

/// Runs the configured sweep. Replication rows are ordered by (shift
/// parameter, size, replication index) and each draws from
/// substream(base_seed, row_index), so the table is reproducible regardless
/// of scheduling.
///
/// Estimation rows record the squared errors of w-hat and mu-hat against the
/// simulated truth; detection rows run the two-sample test between source
/// and target predictions; correction rows score baseline and corrected
/// models on a fresh target sample of size m.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

}  // namespace labelshift::pipeline
