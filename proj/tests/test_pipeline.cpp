#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "labelshift/pipeline.hpp"

using namespace labelshift;
using namespace labelshift::pipeline;

namespace {

Dataset mixture(const LabelDistribution& dist, Eigen::Index n, double separation, SeededRng& rng,
                double scale = 1.0) {
  LabelSpace space(static_cast<int>(dist.k()));
  Eigen::MatrixXd means = model::corner_means(space, dist.k(), separation, scale);
  return model::gen_gaussian_mixture(space, dist.k(), means, scale, dist, n, rng);
}

model::TrainConfig quick_train(int iterations = 200, double lr = 0.3) {
  model::TrainConfig cfg;
  cfg.learning_rate = lr;
  cfg.iterations = iterations;
  return cfg;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

TEST_CASE("bbsc_correct: fallback with a constant predictor reproduces the baseline") {
  SeededRng rng(3);
  LabelDistribution uniform = LabelDistribution::uniform(LabelSpace(3));
  Dataset train = mixture(uniform, 600, 6.0, rng);
  Dataset target = mixture(uniform, 300, 6.0, rng);

  CorrectionConfig cfg;
  cfg.train = quick_train(0);  // zero iterations: constant predictor, singular confusion
  cfg.seed = 42;
  CorrectionResult res = bbsc_correct(train, target.features, cfg);

  CHECK(res.weights.fallback);
  CHECK((res.weights.w.array() == 1.0).all());
  CHECK(res.model.weights == res.baseline.weights);
  CHECK(res.model.bias == res.baseline.bias);
  CHECK(!res.skipped_by_detection);
}

TEST_CASE("bbsc_correct: no shift keeps weights near one and accuracy unchanged") {
  LabelDistribution uniform = LabelDistribution::uniform(LabelSpace(3));
  SeededRng root(17);
  std::vector<double> winf, accdiff;
  for (int seed = 0; seed < 20; ++seed) {
    SeededRng rng = root.substream(static_cast<std::uint64_t>(seed));
    Dataset train = mixture(uniform, 4000, 6.0, rng);
    Dataset target = mixture(uniform, 4000, 6.0, rng);
    SeededRng eval_rng = rng.substream(99);
    Dataset eval = mixture(uniform, 4000, 6.0, eval_rng);

    CorrectionConfig cfg;
    cfg.train = quick_train();
    cfg.seed = static_cast<std::uint64_t>(seed);
    CorrectionResult res = bbsc_correct(train, target.features, cfg);

    winf.push_back((res.weights.w - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff());
    accdiff.push_back(model::accuracy(res.model, eval.features, eval.labels) -
                      model::accuracy(res.baseline, eval.features, eval.labels));
  }
  CHECK(median(winf) < 0.15);
  CHECK(std::abs(median(accdiff)) < 0.02);
}

TEST_CASE("bbsc_correct: tweak-one shift is corrected more often than not") {
  LabelDistribution q = sim::tweak_one(LabelSpace(3), 0, 0.8);
  LabelDistribution uniform = LabelDistribution::uniform(LabelSpace(3));
  SeededRng root(29);
  int improved_or_equal = 0;
  for (int seed = 0; seed < 20; ++seed) {
    SeededRng rng = root.substream(static_cast<std::uint64_t>(seed));
    Dataset train = mixture(uniform, 8000, 6.0, rng);
    Dataset target = mixture(q, 8000, 6.0, rng);
    SeededRng eval_rng = rng.substream(99);
    Dataset eval = mixture(q, 8000, 6.0, eval_rng);

    CorrectionConfig cfg;
    cfg.train = quick_train();
    cfg.seed = static_cast<std::uint64_t>(seed);
    CorrectionResult res = bbsc_correct(train, target.features, cfg);

    double corrected = model::accuracy(res.model, eval.features, eval.labels);
    double baseline = model::accuracy(res.baseline, eval.features, eval.labels);
    if (corrected >= baseline) ++improved_or_equal;
  }
  CHECK(improved_or_equal >= 16);  // >= 80% of 20 seeds
}

TEST_CASE("bbsc_correct: preconditions and configuration errors") {
  SeededRng rng(31);
  LabelDistribution uniform = LabelDistribution::uniform(LabelSpace(3));
  Dataset train = mixture(uniform, 200, 6.0, rng);
  Dataset target = mixture(uniform, 100, 6.0, rng);

  CorrectionConfig cfg;
  cfg.train = quick_train(10);

  CorrectionConfig bad_delta = cfg;
  bad_delta.delta = 0.5;  // >= 1/3
  CHECK_THROWS_AS(bbsc_correct(train, target.features, bad_delta), DomainError);

  CorrectionConfig bad_split = cfg;
  bad_split.split_fraction = 1.0;
  CHECK_THROWS_AS(bbsc_correct(train, target.features, bad_split), DomainError);

  // A class missing from one half of the split: two examples of a class force
  // at least one half to lose it sometimes; make it deterministic by using a
  // class with a single example.
  Eigen::MatrixXd features = train.features.topRows(7);
  Eigen::VectorXi labels(7);
  labels << 0, 0, 0, 1, 1, 1, 2;
  Dataset tiny(features, labels, LabelSpace(3));
  CHECK_THROWS_AS(bbsc_correct(tiny, target.features, cfg), SupportError);
}

TEST_CASE("bbsc_correct: detect_first skips reweighting when no shift is found") {
  SeededRng rng(37);
  LabelDistribution uniform = LabelDistribution::uniform(LabelSpace(3));
  Dataset train = mixture(uniform, 2000, 6.0, rng);
  Dataset target = mixture(uniform, 2000, 6.0, rng);

  CorrectionConfig cfg;
  cfg.train = quick_train();
  cfg.detect_first = true;
  cfg.seed = 7;
  CorrectionResult res = bbsc_correct(train, target.features, cfg);

  REQUIRE(res.detection.has_value());
  CHECK(!res.detection->reject);
  CHECK(res.skipped_by_detection);
  CHECK((res.applied_weights.array() == 1.0).all());
  CHECK(res.model.weights == res.baseline.weights);

  // Strong shift: the test rejects and the reweighting is applied.
  LabelDistribution skewed = sim::tweak_one(LabelSpace(3), 1, 0.9);
  Dataset shifted = mixture(skewed, 2000, 6.0, rng);
  CorrectionResult res2 = bbsc_correct(train, shifted.features, cfg);
  REQUIRE(res2.detection.has_value());
  CHECK(res2.detection->reject);
  CHECK(!res2.skipped_by_detection);
  CHECK(res2.applied_weights == res2.weights.w);
}

TEST_CASE("bbsc_correct: retrain_on and reuse_split variants run and differ") {
  SeededRng rng(41);
  LabelDistribution uniform = LabelDistribution::uniform(LabelSpace(3));
  LabelDistribution q = sim::tweak_one(LabelSpace(3), 0, 0.7);
  Dataset train = mixture(uniform, 1000, 4.0, rng);
  Dataset target = mixture(q, 1000, 4.0, rng);

  CorrectionConfig cfg;
  cfg.train = quick_train(100);
  cfg.seed = 11;

  cfg.retrain_on = RetrainOn::Full;
  CorrectionResult full = bbsc_correct(train, target.features, cfg);
  cfg.retrain_on = RetrainOn::Split;
  CorrectionResult split = bbsc_correct(train, target.features, cfg);
  CHECK(full.model.weights != split.model.weights);

  cfg.reuse_split = true;
  CorrectionResult reused = bbsc_correct(train, target.features, cfg);
  CHECK(!reused.weights.fallback);

  // Labeled target reports accuracies.
  CorrectionConfig scored_cfg;
  scored_cfg.train = quick_train(100);
  scored_cfg.seed = 11;
  CorrectionResult scored = bbsc_correct(train, target.features, scored_cfg, &target.labels);
  CHECK(scored.target_accuracy.has_value());
  CHECK(scored.baseline_accuracy.has_value());
}

TEST_CASE("split determinism: same seed, same corrected model") {
  SeededRng rng(43);
  LabelDistribution uniform = LabelDistribution::uniform(LabelSpace(3));
  Dataset train = mixture(uniform, 500, 6.0, rng);
  Dataset target = mixture(uniform, 500, 6.0, rng);

  CorrectionConfig cfg;
  cfg.train = quick_train(50);
  cfg.seed = 1234;
  CorrectionResult a = bbsc_correct(train, target.features, cfg);
  CorrectionResult b = bbsc_correct(train, target.features, cfg);
  CHECK(a.model.weights == b.model.weights);
  CHECK(a.weights.w == b.weights.w);

  cfg.seed = 1235;
  CorrectionResult c = bbsc_correct(train, target.features, cfg);
  CHECK(a.model.weights != c.model.weights);  // different split
}

TEST_CASE("run_experiment: estimation rows carry finite errors and are deterministic") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Estimation;
  cfg.shift_kind = sim::ShiftKind::TweakOne;
  cfg.shift_params = {0.5};
  cfg.shift_class = 0;
  cfg.sizes = {400, 800};
  cfg.replications = 3;
  cfg.base_seed = 99;
  cfg.train = quick_train(120);

  std::vector<ResultRow> rows = run_experiment(cfg);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.mse_w.has_value());
    CHECK(std::isfinite(*r.mse_w));
    CHECK(r.mse_mu.has_value());
    CHECK(r.sigma_min.has_value());
    CHECK(!r.p_value.has_value());
    CHECK(!r.acc_baseline.has_value());
    CHECK(r.shift_kind == "tweak_one");
  }
  CHECK(rows[0].n == 400);
  CHECK(rows[3].n == 800);
  CHECK(rows[0].seed != rows[1].seed);

  std::vector<ResultRow> again = run_experiment(cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].seed == again[i].seed);
    CHECK(rows[i].mse_w == again[i].mse_w);
    CHECK(rows[i].mse_mu == again[i].mse_mu);
    CHECK(rows[i].sigma_min == again[i].sigma_min);
  }
}

TEST_CASE("run_experiment: estimation error decreases with n in the median") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Estimation;
  cfg.shift_kind = sim::ShiftKind::Knockout;
  cfg.shift_params = {0.0};
  cfg.sizes = {500, 4000};
  cfg.replications = 10;
  cfg.base_seed = 7;
  cfg.train = quick_train(150);

  std::vector<ResultRow> rows = run_experiment(cfg);
  std::vector<double> small_n, large_n;
  for (const auto& r : rows) (r.n == 500 ? small_n : large_n).push_back(*r.mse_w);
  CHECK(median(large_n) < median(small_n));
}

TEST_CASE("run_experiment: harder Dirichlet shifts inflate the estimation error") {
  // The paper's k = 10 setting with an imperfect classifier: the spikier the
  // target marginal (small alpha), the larger ||w||^2 and the squared error.
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Estimation;
  cfg.shift_kind = sim::ShiftKind::Dirichlet;
  cfg.shift_params = {0.1, 10.0};
  cfg.sizes = {8000};
  cfg.replications = 20;
  cfg.base_seed = 11;
  cfg.synth.space = LabelSpace(10);
  cfg.synth.dim = 10;
  cfg.synth.separation = 3.0;
  cfg.train = quick_train(150);

  std::vector<ResultRow> rows = run_experiment(cfg);
  std::vector<double> hard_shift, mild_shift;
  for (const auto& r : rows) (r.shift_param == 0.1 ? hard_shift : mild_shift).push_back(*r.mse_w);
  CHECK(median(hard_shift) >= median(mild_shift));
}

TEST_CASE("run_experiment: detection rows expose p-values, correction rows accuracies") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Detection;
  cfg.shift_kind = sim::ShiftKind::Knockout;
  cfg.shift_params = {0.6};
  cfg.shift_class = 0;
  cfg.sizes = {800};
  cfg.replications = 4;
  cfg.base_seed = 3;
  cfg.train = quick_train(120);

  for (const auto& r : run_experiment(cfg)) {
    CHECK(r.p_value.has_value());
    CHECK(r.reject.has_value());
    CHECK(!r.mse_w.has_value());
  }

  cfg.kind = ExperimentKind::Correction;
  for (const auto& r : run_experiment(cfg)) {
    CHECK(r.acc_baseline.has_value());
    CHECK(r.acc_corrected.has_value());
    CHECK(r.mse_w.has_value());
    CHECK(*r.acc_baseline >= 0.0);
    CHECK(*r.acc_corrected <= 1.0);
  }
}

TEST_CASE("bbsc_correct: soft estimation mode recovers comparable weights") {
  // Soft confusion matrices accumulate predicted probabilities; with a decent
  // classifier both modes should land near the true ratios.
  LabelDistribution uniform = LabelDistribution::uniform(LabelSpace(3));
  LabelDistribution q = sim::tweak_one(LabelSpace(3), 1, 0.6);
  SeededRng rng(61);
  Dataset train = mixture(uniform, 6000, 4.0, rng);
  Dataset target = mixture(q, 6000, 4.0, rng);

  Eigen::VectorXd w_true = q.probs().cwiseQuotient(uniform.probs());

  CorrectionConfig cfg;
  cfg.train = quick_train();
  cfg.seed = 13;

  cfg.estimation_mode = PredMode::Hard;
  CorrectionResult hard = bbsc_correct(train, target.features, cfg);
  cfg.estimation_mode = PredMode::Soft;
  CorrectionResult soft = bbsc_correct(train, target.features, cfg);

  CHECK(!hard.weights.fallback);
  CHECK(!soft.weights.fallback);
  CHECK((hard.weights.w - w_true).cwiseAbs().maxCoeff() < 0.25);
  CHECK((soft.weights.w - w_true).cwiseAbs().maxCoeff() < 0.25);
  CHECK(hard.weights.w != soft.weights.w);  // genuinely different estimators
}

TEST_CASE("split_indices: the halves partition the index range") {
  for (Eigen::Index n : {10, 101, 1000}) {
    for (double frac : {0.3, 0.5, 0.7}) {
      auto [a, b] = split_indices(n, frac, 42);
      CHECK(static_cast<Eigen::Index>(a.size()) ==
            static_cast<Eigen::Index>(static_cast<double>(n) * frac));
      CHECK(a.size() + b.size() == static_cast<std::size_t>(n));

      std::vector<Eigen::Index> all(a);
      all.insert(all.end(), b.begin(), b.end());
      std::sort(all.begin(), all.end());
      for (Eigen::Index i = 0; i < n; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
    }
  }
  auto [a1, b1] = split_indices(100, 0.5, 7);
  auto [a2, b2] = split_indices(100, 0.5, 7);
  CHECK(a1 == a2);
  auto [a3, b3] = split_indices(100, 0.5, 8);
  CHECK(a1 != a3);
  CHECK_THROWS_AS(split_indices(100, 0.0, 1), DomainError);
  CHECK_THROWS_AS(split_indices(1, 0.5, 1), DomainError);
}

TEST_CASE("run_experiment: pool mode resamples a fixed dataset") {
  // Pool rows are reused with replacement, so every drawn feature row must
  // be one of the pool's rows.
  SeededRng rng(51);
  LabelDistribution uniform = LabelDistribution::uniform(LabelSpace(3));
  Dataset pool = mixture(uniform, 900, 6.0, rng);

  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Estimation;
  cfg.shift_kind = sim::ShiftKind::TweakOne;
  cfg.shift_params = {0.6};
  cfg.shift_class = 1;
  cfg.sizes = {400};
  cfg.replications = 2;
  cfg.base_seed = 5;
  cfg.pool = pool;
  cfg.train = quick_train(100);

  std::vector<ResultRow> rows = run_experiment(cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) CHECK(std::isfinite(*r.mse_w));
}

TEST_CASE("run_experiment: configuration validation") {
  ExperimentConfig cfg;
  cfg.shift_params = {};
  cfg.sizes = {100};
  CHECK_THROWS_AS(run_experiment(cfg), DomainError);
  cfg.shift_params = {0.5};
  cfg.sizes = {};
  CHECK_THROWS_AS(run_experiment(cfg), DomainError);
  cfg.sizes = {100};
  cfg.replications = 0;
  CHECK_THROWS_AS(run_experiment(cfg), DomainError);
}
