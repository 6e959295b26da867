#include "labelshift/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "labelshift/confusion.hpp"

namespace labelshift::pipeline {

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Estimation: return "estimation";
    case ExperimentKind::Detection: return "detection";
    case ExperimentKind::Correction: return "correction";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "estimation") return ExperimentKind::Estimation;
  if (name == "detection") return ExperimentKind::Detection;
  if (name == "correction") return ExperimentKind::Correction;
  throw DomainError("unknown experiment kind: " + name);
}

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_indices(
    Eigen::Index n, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction >= 1.0)
    throw DomainError("split_indices: fraction must be in (0, 1)");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  SeededRng rng = SeededRng(seed).substream(0);
  for (Eigen::Index i = n - 1; i > 0; --i)
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(rng.uniform_index(i + 1))]);
  auto n1 = static_cast<Eigen::Index>(static_cast<double>(n) * fraction);
  if (n1 < 1 || n1 >= n) throw DomainError("split_indices: split leaves an empty half");
  return {{idx.begin(), idx.begin() + n1}, {idx.begin() + n1, idx.end()}};
}

namespace {

Dataset subset(const Dataset& data, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd features(static_cast<Eigen::Index>(idx.size()), data.dim());
  Eigen::VectorXi labels(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    features.row(static_cast<Eigen::Index>(i)) = data.features.row(idx[i]);
    labels(static_cast<Eigen::Index>(i)) = data.labels(idx[i]);
  }
  return Dataset(std::move(features), std::move(labels), data.space);
}

void require_all_classes(const Dataset& data, const char* which) {
  std::vector<bool> seen(static_cast<std::size_t>(data.space.k), false);
  for (Eigen::Index i = 0; i < data.n(); ++i) seen[static_cast<std::size_t>(data.labels(i))] = true;
  for (int c = 0; c < data.space.k; ++c)
    if (!seen[static_cast<std::size_t>(c)])
      throw SupportError(std::string("bbsc_correct: class ") + std::to_string(c) +
                         " missing from " + which);
}

struct BbseParts {
  Dataset fit_half;   // data the black box trained on
  Dataset est_half;   // data the confusion matrix came from
  model::SoftmaxModel f;
  WeightEstimate weights;
  Predictions est_preds;
  Predictions tgt_preds;
};

BbseParts bbse_parts(const Dataset& train, const Eigen::MatrixXd& target_features, double delta,
                     Solver solver, PredMode mode, const model::TrainConfig& train_cfg,
                     double split_fraction, bool reuse_split, std::uint64_t seed) {
  if (train.n() == 0) throw DomainError("bbsc_correct: empty training set");
  if (target_features.rows() == 0) throw DomainError("bbsc_correct: empty target set");
  if (split_fraction <= 0.0 || split_fraction >= 1.0)
    throw DomainError("bbsc_correct: split fraction must be in (0, 1)");

  Dataset fit_half = train;
  Dataset est_half = train;
  if (!reuse_split) {
    auto [fit_idx, est_idx] = split_indices(train.n(), split_fraction, seed);
    fit_half = subset(train, fit_idx);
    est_half = subset(train, est_idx);
  }
  require_all_classes(fit_half, reuse_split ? "the training set" : "the training half");
  require_all_classes(est_half, reuse_split ? "the training set" : "the hold-out half");

  model::SoftmaxModel f = model::train_softmax(fit_half, std::nullopt, train_cfg);
  Predictions est_preds = model::predict(f, est_half.features, mode);
  Predictions tgt_preds = model::predict(f, target_features, mode);

  SourceEval source_eval(est_preds, est_half.labels);
  TargetEval target_eval(tgt_preds);
  EstimateOptions opts;
  opts.delta = delta;
  opts.solver = solver;
  WeightEstimate weights = estimate_weights(source_eval, target_eval, train.space, opts);

  return BbseParts{std::move(fit_half), std::move(est_half), std::move(f), std::move(weights),
                   std::move(est_preds), std::move(tgt_preds)};
}

}  // namespace

CorrectionResult bbsc_correct(const Dataset& train, const Eigen::MatrixXd& target_features,
                              const CorrectionConfig& cfg, const Eigen::VectorXi* target_labels) {
  const double delta = cfg.delta > 0.0 ? cfg.delta : default_delta(train.space);
  if (delta >= 1.0 / train.space.k)
    throw DomainError("bbsc_correct: delta must satisfy 0 < delta < 1/k");

  BbseParts parts = bbse_parts(train, target_features, delta, cfg.solver, cfg.estimation_mode,
                               cfg.train, cfg.split_fraction, cfg.reuse_split, cfg.seed);

  std::optional<detect::ShiftReport> detection;
  bool skipped = false;
  if (cfg.detect_first) {
    detection = detect::detect_label_shift(parts.est_preds, parts.tgt_preds, train.space,
                                           cfg.detect_alpha, cfg.detect_method);
    skipped = !detection->reject;
  }

  Eigen::VectorXd applied = (skipped || parts.weights.fallback)
                                ? Eigen::VectorXd::Ones(train.space.k)
                                : parts.weights.w;

  const Dataset& retrain_set =
      (cfg.retrain_on == RetrainOn::Split && !cfg.reuse_split) ? parts.fit_half : train;
  Eigen::VectorXd example_w(retrain_set.n());
  for (Eigen::Index i = 0; i < retrain_set.n(); ++i) example_w(i) = applied(retrain_set.labels(i));

  model::SoftmaxModel corrected = model::train_softmax(retrain_set, example_w, cfg.train);
  model::SoftmaxModel baseline = model::train_softmax(retrain_set, std::nullopt, cfg.train);

  CorrectionResult result{std::move(corrected), std::move(baseline), std::move(parts.weights),
                          std::move(applied),   skipped,             std::move(detection),
                          std::nullopt,         std::nullopt};
  if (target_labels) {
    result.target_accuracy = model::accuracy(result.model, target_features, *target_labels);
    result.baseline_accuracy = model::accuracy(result.baseline, target_features, *target_labels);
  }
  return result;
}

namespace {

Dataset make_sample(const ExperimentConfig& cfg, const Eigen::MatrixXd& means,
                    const LabelDistribution& dist, Eigen::Index n, SeededRng& rng) {
  if (cfg.pool) return sim::resample_by_label(*cfg.pool, dist, n, rng);
  return model::gen_gaussian_mixture(cfg.synth.space, cfg.synth.dim, means, cfg.synth.scale, dist,
                                     n, rng);
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.shift_params.empty()) throw DomainError("run_experiment: no shift parameters");
  if (cfg.sizes.empty()) throw DomainError("run_experiment: no sizes");
  if (cfg.replications < 1) throw DomainError("run_experiment: replications must be >= 1");

  const LabelSpace space = cfg.pool ? cfg.pool->space : cfg.synth.space;
  const double delta = cfg.delta > 0.0 ? cfg.delta : default_delta(space);
  Eigen::MatrixXd means;
  if (!cfg.pool)
    means = model::corner_means(space, cfg.synth.dim, cfg.synth.separation, cfg.synth.scale);
  const LabelDistribution p_y = LabelDistribution::uniform(space);

  std::vector<ResultRow> rows;
  rows.reserve(cfg.shift_params.size() * cfg.sizes.size() *
               static_cast<std::size_t>(cfg.replications));
  const SeededRng root(cfg.base_seed);
  std::uint64_t row_index = 0;

  for (double param : cfg.shift_params) {
    sim::ShiftSpec spec{cfg.shift_kind, cfg.shift_class, param};
    if (cfg.shift_kind == sim::ShiftKind::Dirichlet) spec.class_index.reset();

    for (Eigen::Index n : cfg.sizes) {
      for (int rep = 0; rep < cfg.replications; ++rep, ++row_index) {
        SeededRng rep_rng = root.substream(row_index);
        SeededRng data_rng = rep_rng.substream(0);
        SeededRng shift_rng = rep_rng.substream(1);
        const std::uint64_t pipe_seed = rep_rng.substream(2).seed();
        SeededRng eval_rng = rep_rng.substream(3);

        LabelDistribution q_y = sim::apply_shift(spec, p_y, space, shift_rng);

        ResultRow row;
        row.shift_kind = sim::shift_kind_name(cfg.shift_kind);
        row.shift_param = param;
        if (cfg.shift_kind != sim::ShiftKind::Dirichlet) row.shift_class = cfg.shift_class;
        row.n = n;
        row.m = n;
        row.seed = rep_rng.seed();
        row.replication = rep;

        switch (cfg.kind) {
          case ExperimentKind::Estimation: {
            Dataset train = make_sample(cfg, means, p_y, n, data_rng);
            Dataset target = make_sample(cfg, means, q_y, n, data_rng);
            BbseParts parts =
                bbse_parts(train, target.features, delta, cfg.solver, cfg.estimation_mode,
                           cfg.train, cfg.split_fraction, false, pipe_seed);

            Eigen::VectorXd w_true = q_y.probs().cwiseQuotient(p_y.probs());
            if (std::abs(p_y.probs().dot(w_true) - 1.0) > 1e-12)
              throw DomainError("run_experiment: simulated truth fails mass conservation");
            row.mse_w = (parts.weights.w - w_true).squaredNorm();
            row.mse_mu = (parts.weights.mu_y - q_y.probs()).squaredNorm();
            row.sigma_min = parts.weights.sigma_min;
            break;
          }
          case ExperimentKind::Detection: {
            Dataset train = make_sample(cfg, means, p_y, n, data_rng);
            Dataset valid = make_sample(cfg, means, p_y, n, data_rng);
            Dataset test = make_sample(cfg, means, q_y, n, data_rng);
            model::SoftmaxModel f = model::train_softmax(train, std::nullopt, cfg.train);
            detect::ShiftReport report = detect::detect_label_shift(
                model::predict(f, valid.features, PredMode::Hard),
                model::predict(f, test.features, PredMode::Hard), space, cfg.alpha, cfg.method);
            row.p_value = report.p_value;
            row.reject = report.reject;
            break;
          }
          case ExperimentKind::Correction: {
            Dataset train = make_sample(cfg, means, p_y, n, data_rng);
            Dataset target = make_sample(cfg, means, q_y, n, data_rng);
            Dataset eval = make_sample(cfg, means, q_y, n, eval_rng);

            CorrectionConfig ccfg;
            ccfg.delta = delta;
            ccfg.train = cfg.train;
            ccfg.split_fraction = cfg.split_fraction;
            ccfg.retrain_on = cfg.retrain_on;
            ccfg.seed = pipe_seed;
            ccfg.solver = cfg.solver;
            ccfg.estimation_mode = cfg.estimation_mode;
            CorrectionResult res = bbsc_correct(train, target.features, ccfg);

            Eigen::VectorXd w_true = q_y.probs().cwiseQuotient(p_y.probs());
            row.mse_w = (res.weights.w - w_true).squaredNorm();
            row.mse_mu = (res.weights.mu_y - q_y.probs()).squaredNorm();
            row.sigma_min = res.weights.sigma_min;
            row.acc_baseline = model::accuracy(res.baseline, eval.features, eval.labels);
            row.acc_corrected = model::accuracy(res.model, eval.features, eval.labels);
            break;
          }
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace labelshift::pipeline
