// Command-line surface for label-shift estimation (estimate), detection
// (detect), correction (correct), dataset simulation (simulate), and the
// replication harness (experiment).
//
// Exit codes: 0 success / no shift detected, 1 usage error, 2 data error,
// 3 shift detected (a signal for shell pipelines, not a failure).

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "labelshift/confusion.hpp"
#include "labelshift/io.hpp"
#include "labelshift/mmd.hpp"
#include "labelshift/pipeline.hpp"
#include "labelshift/shiftsim.hpp"
#include "labelshift/solve.hpp"

namespace ls = labelshift;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitShiftDetected = 3;

struct CommonOpts {
  std::string out;
  std::string format = "json";
  int k = 0;
  double delta = 0.0;  // 0 -> 1/(10k)
  std::uint64_t seed = 0;
};

void emit(const CommonOpts& opts, const std::string& text) {
  if (opts.out.empty())
    std::cout << text;
  else
    ls::io::write_file(opts.out, text);
}

std::string render_report(const ls::io::ReportDocument& doc, const std::string& format) {
  return format == "csv" ? ls::io::report_to_csv(doc) : ls::io::report_to_json(doc);
}

const ls::Predictions& preds_of(const std::variant<ls::SourceEval, ls::TargetEval>& v) {
  if (std::holds_alternative<ls::SourceEval>(v)) return std::get<ls::SourceEval>(v).preds;
  return std::get<ls::TargetEval>(v).preds;
}

int run_estimate(const CommonOpts& opts, const std::string& source_path,
                 const std::string& target_path, ls::Solver solver, bool normalize) {
  ls::LabelSpace space(opts.k);
  auto source = ls::io::load_predictions(source_path, space);
  if (!std::holds_alternative<ls::SourceEval>(source))
    throw ls::FormatError(source_path + ": estimation needs a y_true column in the source file");
  auto target = ls::io::load_predictions(target_path, space);

  ls::EstimateOptions eopts;
  eopts.delta = opts.delta;
  eopts.solver = solver;
  ls::SourceEval& src = std::get<ls::SourceEval>(source);
  ls::WeightEstimate est = ls::estimate_weights(src, ls::TargetEval(preds_of(target)), space, eopts);

  ls::io::ReportDocument doc;
  doc.meta.k = opts.k;
  doc.meta.version = kVersion;
  doc.weights = ls::io::WeightsSection::from(est, normalize);
  emit(opts, render_report(doc, opts.format));
  return kExitOk;
}

int run_detect(const CommonOpts& opts, const std::string& source_path,
               const std::string& target_path, double alpha, ls::detect::TestMethod method) {
  ls::LabelSpace space(opts.k);
  auto source = ls::io::load_predictions(source_path, space);
  auto target = ls::io::load_predictions(target_path, space);

  ls::detect::ShiftReport report =
      ls::detect::detect_label_shift(preds_of(source), preds_of(target), space, alpha, method);

  ls::io::ReportDocument doc;
  doc.meta.k = opts.k;
  doc.meta.version = kVersion;
  doc.detection = ls::io::DetectionSection::from(report);
  emit(opts, render_report(doc, opts.format));
  return report.reject ? kExitShiftDetected : kExitOk;
}

int run_correct(const CommonOpts& opts, const std::string& source_path,
                const std::string& target_path, const ls::pipeline::CorrectionConfig& cfg,
                const std::string& model_out, bool normalize) {
  ls::LabelSpace space(opts.k);
  ls::Dataset train = ls::io::load_labeled_dataset(source_path, space);
  ls::io::DatasetFile target = ls::io::load_dataset_csv(target_path);
  if (target.labels) ls::check_labels(*target.labels, space, target_path.c_str());

  ls::pipeline::CorrectionResult res = ls::pipeline::bbsc_correct(
      train, target.features, cfg, target.labels ? &*target.labels : nullptr);

  ls::io::ReportDocument doc;
  doc.meta.k = opts.k;
  doc.meta.seed = cfg.seed;
  doc.meta.version = kVersion;
  doc.weights = ls::io::WeightsSection::from(res.weights, normalize);
  if (res.detection) doc.detection = ls::io::DetectionSection::from(*res.detection);
  emit(opts, render_report(doc, opts.format));

  if (!model_out.empty()) ls::io::write_file(model_out, ls::io::model_to_json(res.model));
  if (res.target_accuracy) {
    std::cout << "target_accuracy_corrected=" << ls::io::format_real(*res.target_accuracy) << "\n"
              << "target_accuracy_baseline=" << ls::io::format_real(*res.baseline_accuracy)
              << "\n";
  }
  return kExitOk;
}

int run_simulate(const CommonOpts& opts, const std::string& source_path,
                 const std::string& images_path, const std::string& labels_path,
                 const ls::sim::ShiftSpec& spec, Eigen::Index size) {
  std::optional<ls::Dataset> data;
  if (!images_path.empty()) {
    data = ls::io::load_idx(images_path, labels_path);
  } else {
    if (opts.k < 2) throw ls::DomainError("simulate: --k is required with a CSV dataset");
    data = ls::io::load_labeled_dataset(source_path, ls::LabelSpace(opts.k));
  }

  ls::SeededRng rng(opts.seed);
  ls::LabelDistribution base = ls::estimate_label_marginal(data->labels, data->space);
  ls::LabelDistribution q = ls::sim::apply_shift(spec, base, data->space, rng);
  ls::Dataset out = ls::sim::resample_by_label(*data, q, size, rng);
  if (opts.out.empty()) throw ls::DomainError("simulate: --out is required");
  ls::io::save_dataset(opts.out, out);
  return kExitOk;
}

int run_experiment_cmd(const CommonOpts& opts, ls::pipeline::ExperimentConfig cfg,
                       const std::string& source_path, const std::string& images_path,
                       const std::string& labels_path) {
  if (!images_path.empty())
    cfg.pool = ls::io::load_idx(images_path, labels_path);
  else if (!source_path.empty()) {
    if (opts.k < 2) throw ls::DomainError("experiment: --k is required with a CSV dataset");
    cfg.pool = ls::io::load_labeled_dataset(source_path, ls::LabelSpace(opts.k));
  }

  std::vector<ls::pipeline::ResultRow> rows = ls::pipeline::run_experiment(cfg);
  emit(opts, opts.format == "json" ? ls::io::result_table_to_json(rows)
                                   : ls::io::result_table_to_csv(rows));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Black box label-shift estimation, detection, and correction"};
  app.require_subcommand(1);

  const std::map<std::string, ls::Solver> solver_map{{"lu", ls::Solver::Lu},
                                                     {"pinv", ls::Solver::PseudoInverse}};
  const std::map<std::string, ls::detect::TestMethod> method_map{
      {"ks", ls::detect::TestMethod::Ks}, {"chi2", ls::detect::TestMethod::Chi2}};
  const std::map<std::string, ls::PredMode> mode_map{{"hard", ls::PredMode::Hard},
                                                     {"soft", ls::PredMode::Soft}};
  const std::map<std::string, ls::pipeline::RetrainOn> retrain_map{
      {"split", ls::pipeline::RetrainOn::Split}, {"full", ls::pipeline::RetrainOn::Full}};
  const std::map<std::string, ls::sim::ShiftKind> shift_map{
      {"knockout", ls::sim::ShiftKind::Knockout},
      {"tweak_one", ls::sim::ShiftKind::TweakOne},
      {"dirichlet", ls::sim::ShiftKind::Dirichlet}};
  const std::map<std::string, ls::pipeline::ExperimentKind> kind_map{
      {"estimation", ls::pipeline::ExperimentKind::Estimation},
      {"detection", ls::pipeline::ExperimentKind::Detection},
      {"correction", ls::pipeline::ExperimentKind::Correction}};

  CommonOpts common;
  std::string source_path, target_path, images_path, labels_path, model_out;
  ls::Solver solver = ls::Solver::Lu;
  ls::detect::TestMethod method = ls::detect::TestMethod::Chi2;
  double alpha = 0.05;
  bool normalize = false;

  auto add_common = [&](CLI::App* cmd, bool with_k = true) {
    cmd->add_option("--out", common.out, "Output file (default: stdout)");
    cmd->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    if (with_k) cmd->add_option("--k", common.k, "Number of classes")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--seed", common.seed, "RNG seed");
  };

  // estimate
  CLI::App* estimate = app.add_subcommand("estimate", "Estimate importance weights q(y)/p(y)");
  add_common(estimate);
  estimate->add_option("--source", source_path, "Source predictions CSV (needs y_true)")->required();
  estimate->add_option("--target", target_path, "Target predictions CSV")->required();
  estimate->add_option("--delta", common.delta, "Fallback threshold (default 1/(10k))");
  estimate->add_option("--solver", solver, "Linear solver")
      ->transform(CLI::CheckedTransformer(solver_map));
  estimate->add_flag("--normalize", normalize, "Also report mu_y renormalized to the simplex");

  // detect
  CLI::App* detect_cmd = app.add_subcommand("detect", "Two-sample test for label shift");
  add_common(detect_cmd);
  detect_cmd->add_option("--source", source_path, "Source predictions CSV")->required();
  detect_cmd->add_option("--target", target_path, "Target predictions CSV")->required();
  detect_cmd->add_option("--alpha", alpha, "Significance level");
  detect_cmd->add_option("--method", method, "Test statistic")
      ->transform(CLI::CheckedTransformer(method_map));

  // correct
  ls::pipeline::CorrectionConfig ccfg;
  std::string retrain = "full";
  CLI::App* correct = app.add_subcommand("correct", "Importance-weighted retraining (BBSC)");
  add_common(correct);
  correct->add_option("--source", source_path, "Labeled training dataset CSV")->required();
  correct->add_option("--target", target_path, "Target dataset CSV (y column used only to score)")
      ->required();
  correct->add_option("--delta", common.delta, "Fallback threshold (default 1/(10k))");
  correct->add_option("--solver", ccfg.solver, "Linear solver")
      ->transform(CLI::CheckedTransformer(solver_map));
  correct->add_option("--mode", ccfg.estimation_mode, "Confusion-matrix mode")
      ->transform(CLI::CheckedTransformer(mode_map));
  correct->add_option("--lr", ccfg.train.learning_rate, "Learning rate");
  correct->add_option("--iterations", ccfg.train.iterations, "Gradient steps");
  correct->add_option("--l2", ccfg.train.l2, "L2 penalty on the weight matrix");
  correct->add_option("--split-fraction", ccfg.split_fraction, "Training-half fraction");
  correct->add_option("--retrain-on", ccfg.retrain_on, "Weighted ERM data: split or full")
      ->transform(CLI::CheckedTransformer(retrain_map));
  correct->add_flag("--reuse-split", ccfg.reuse_split,
                    "Train f and estimate the confusion matrix on the same data");
  correct->add_flag("--detect-first", ccfg.detect_first,
                    "Skip reweighting unless a shift test rejects");
  correct->add_option("--alpha", ccfg.detect_alpha, "Detection level for --detect-first");
  correct->add_option("--method", ccfg.detect_method, "Detection method for --detect-first")
      ->transform(CLI::CheckedTransformer(method_map));
  correct->add_option("--model-out", model_out, "Write the corrected model JSON here");
  correct->add_flag("--normalize", normalize, "Also report mu_y renormalized to the simplex");

  // simulate
  ls::sim::ShiftKind shift_kind = ls::sim::ShiftKind::Knockout;
  double shift_param = 0.0;
  int class_index = 0;
  Eigen::Index size = 0;
  CLI::App* simulate = app.add_subcommand("simulate", "Resample a dataset under a label shift");
  simulate->add_option("--source", source_path, "Labeled dataset CSV");
  simulate->add_option("--images", images_path, "IDX image file (alternative to --source)");
  simulate->add_option("--labels", labels_path, "IDX label file");
  simulate->add_option("--shift", shift_kind, "Shift kind")
      ->required()
      ->transform(CLI::CheckedTransformer(shift_map));
  simulate->add_option("--shift-param", shift_param, "delta / rho / alpha for the shift kind")
      ->required();
  simulate->add_option("--class-index", class_index, "Class for knockout / tweak_one");
  simulate->add_option("--size", size, "Examples to draw")->required();
  simulate->add_option("--out", common.out, "Output dataset CSV")->required();
  simulate->add_option("--k", common.k, "Number of classes (CSV datasets)");
  simulate->add_option("--seed", common.seed, "RNG seed");

  // experiment
  ls::pipeline::ExperimentConfig ecfg;
  std::vector<double> shift_params;
  std::vector<long long> sizes;
  int synth_k = 3;
  long long synth_dim = 0;
  CLI::App* experiment = app.add_subcommand("experiment", "Replication sweeps over shifts and sizes");
  experiment->add_option("--kind", ecfg.kind, "estimation, detection, or correction")
      ->required()
      ->transform(CLI::CheckedTransformer(kind_map));
  experiment->add_option("--shift", ecfg.shift_kind, "Shift kind")
      ->required()
      ->transform(CLI::CheckedTransformer(shift_map));
  experiment->add_option("--shift-params", shift_params, "Sweep values (delta / rho / alpha)")
      ->required()
      ->delimiter(',');
  experiment->add_option("--class-index", ecfg.shift_class, "Class for knockout / tweak_one");
  experiment->add_option("--sizes", sizes, "n = m sweep")->required()->delimiter(',');
  experiment->add_option("--reps", ecfg.replications, "Replications per sweep point");
  experiment->add_option("--seed", ecfg.base_seed, "Base seed");
  experiment->add_option("--k", synth_k, "Classes for synthetic data");
  experiment->add_option("--dim", synth_dim, "Feature dimension (default k)");
  experiment->add_option("--scale", ecfg.synth.scale, "Class-conditional standard deviation");
  experiment->add_option("--separation", ecfg.synth.separation, "Mean separation in scale units");
  experiment->add_option("--lr", ecfg.train.learning_rate, "Learning rate");
  experiment->add_option("--iterations", ecfg.train.iterations, "Gradient steps");
  experiment->add_option("--l2", ecfg.train.l2, "L2 penalty");
  experiment->add_option("--delta", ecfg.delta, "Fallback threshold (default 1/(10k))");
  experiment->add_option("--solver", ecfg.solver, "Linear solver")
      ->transform(CLI::CheckedTransformer(solver_map));
  experiment->add_option("--mode", ecfg.estimation_mode, "Confusion-matrix mode")
      ->transform(CLI::CheckedTransformer(mode_map));
  experiment->add_option("--alpha", ecfg.alpha, "Detection level");
  experiment->add_option("--method", ecfg.method, "Detection method")
      ->transform(CLI::CheckedTransformer(method_map));
  experiment->add_option("--split-fraction", ecfg.split_fraction, "Training-half fraction");
  experiment->add_option("--retrain-on", ecfg.retrain_on, "Weighted ERM data: split or full")
      ->transform(CLI::CheckedTransformer(retrain_map));
  experiment->add_option("--source", source_path, "Labeled dataset CSV pool (replaces synthesis)");
  experiment->add_option("--images", images_path, "IDX image pool");
  experiment->add_option("--labels", labels_path, "IDX label pool");
  experiment->add_option("--out", common.out, "Output file (default: stdout)");
  experiment->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  common.format = "json";
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*estimate || *detect_cmd || *correct) {
      if (common.delta < 0.0 || common.delta >= 1.0 / common.k) {
        std::cerr << "error: --delta must satisfy 0 < delta < 1/k\n";
        return kExitUsage;
      }
      if (alpha <= 0.0 || alpha >= 1.0 || ccfg.detect_alpha <= 0.0 || ccfg.detect_alpha >= 1.0) {
        std::cerr << "error: --alpha must lie in (0, 1)\n";
        return kExitUsage;
      }
    }

    if (*estimate) return run_estimate(common, source_path, target_path, solver, normalize);
    if (*detect_cmd) return run_detect(common, source_path, target_path, alpha, method);
    if (*correct) {
      ccfg.delta = common.delta;
      ccfg.seed = common.seed;
      return run_correct(common, source_path, target_path, ccfg, model_out, normalize);
    }
    if (*simulate) {
      if (source_path.empty() == images_path.empty()) {
        std::cerr << "error: simulate needs exactly one of --source or --images/--labels\n";
        return kExitUsage;
      }
      ls::sim::ShiftSpec spec{shift_kind, class_index, shift_param};
      if (shift_kind == ls::sim::ShiftKind::Dirichlet) spec.class_index.reset();
      return run_simulate(common, source_path, images_path, labels_path, spec, size);
    }
    if (*experiment) {
      ecfg.synth.space = ls::LabelSpace(synth_k);
      ecfg.synth.dim = synth_dim > 0 ? synth_dim : synth_k;
      ecfg.shift_params = shift_params;
      ecfg.sizes.assign(sizes.begin(), sizes.end());
      common.k = synth_k;
      if (ecfg.delta < 0.0 || (ecfg.delta > 0.0 && ecfg.delta >= 1.0 / synth_k)) {
        std::cerr << "error: --delta must satisfy 0 < delta < 1/k\n";
        return kExitUsage;
      }
      if (experiment->count("--format") == 0) common.format = "csv";
      return run_experiment_cmd(common, std::move(ecfg), source_path, images_path, labels_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
