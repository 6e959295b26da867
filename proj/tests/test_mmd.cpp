#include <doctest.h>

#include <cmath>

#include "labelshift/mmd.hpp"

using namespace labelshift;
using namespace labelshift::detect;

namespace {

// Two-class 1-D mixture: class 0 at mean0, class 1 at mean1, unit scale.
struct Mixture {
  Eigen::MatrixXd scores;
  Eigen::VectorXi labels;
};

Mixture sample_mixture(double p0, double mean0, double mean1, Eigen::Index n, SeededRng& rng) {
  Eigen::MatrixXd scores(n, 1);
  Eigen::VectorXi labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    labels(i) = rng.uniform() < p0 ? 0 : 1;
    scores(i, 0) = (labels(i) == 0 ? mean0 : mean1) + rng.normal();
  }
  return {std::move(scores), std::move(labels)};
}

Eigen::VectorXd vecd(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("weighted_mmd2: zero on identical sets, nonnegative in general") {
  SeededRng rng(3);
  Eigen::MatrixXd x(40, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();

  double self = weighted_mmd2(x, Eigen::VectorXd::Ones(40), x, 1.0);
  CHECK(self <= 1e-12);

  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd y(30, 2);
    Eigen::VectorXd w(40);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = rng.normal() + 1.0;
    for (Eigen::Index i = 0; i < 40; ++i) w(i) = rng.uniform() * 2.0;
    CHECK(weighted_mmd2(x, w, y, 1.5) >= 0.0);
  }

  CHECK_THROWS_AS(weighted_mmd2(x, Eigen::VectorXd::Ones(3), x, 1.0), DomainError);
  CHECK_THROWS_AS(weighted_mmd2(x, (-Eigen::VectorXd::Ones(40)).eval(), x, 1.0), DomainError);
}

TEST_CASE("median_pairwise_distance: degenerate pools are rejected") {
  Eigen::MatrixXd same = Eigen::MatrixXd::Zero(5, 2);
  CHECK_THROWS_AS(median_pairwise_distance(same, same), DomainError);

  Eigen::MatrixXd two(2, 1);
  two << 0.0, 3.0;
  CHECK(median_pairwise_distance(two, two) > 0.0);
}

TEST_CASE("assumption_check_mmd: identical data with unit weights never rejects") {
  SeededRng rng(7);
  Mixture src = sample_mixture(0.5, 0.0, 4.0, 60, rng);
  SeededRng check_rng(11);
  ShiftReport r = assumption_check_mmd(src.scores, src.labels, vecd({1.0, 1.0}), src.scores, 100,
                                       check_rng);
  CHECK(r.statistic <= 1e-12);
  CHECK(r.p_value == 1.0);
  CHECK(!r.reject);
  CHECK(r.method == TestMethod::Mmd);
}

TEST_CASE("assumption_check_mmd: input validation") {
  SeededRng rng(13);
  Mixture src = sample_mixture(0.5, 0.0, 4.0, 30, rng);
  CHECK_THROWS_AS(assumption_check_mmd(src.scores, src.labels, vecd({1.0, 1.0}), src.scores, 50,
                                       SeededRng(1)),
                  DomainError);  // too few bootstrap reps
  CHECK_THROWS_AS(assumption_check_mmd(src.scores, src.labels, vecd({-1.0, 1.0}), src.scores, 100,
                                       SeededRng(1)),
                  DomainError);
}

TEST_CASE("assumption_check_mmd: calibrated under correct weighting, powerful under "
          "conditional shift") {
  // Source: balanced classes. Target: label-shifted to (0.8, 0.2). With the
  // exact weights the check should rarely reject; with a class-conditional
  // shift it should almost always reject.
  const double p0_src = 0.5, p0_tgt = 0.8;
  const Eigen::VectorXd w = vecd({p0_tgt / p0_src, (1.0 - p0_tgt) / (1.0 - p0_src)});
  const Eigen::Index n = 150, m = 150;
  const int runs = 50;

  SeededRng root(1001);
  int calibrated_ok = 0, power_hits = 0;
  for (int run = 0; run < runs; ++run) {
    SeededRng data_rng = root.substream(static_cast<std::uint64_t>(run));
    Mixture src = sample_mixture(p0_src, 0.0, 4.0, n, data_rng);

    Mixture tgt = sample_mixture(p0_tgt, 0.0, 4.0, m, data_rng);
    ShiftReport cal = assumption_check_mmd(src.scores, src.labels, w, tgt.scores, 120,
                                           data_rng.substream(101));
    if (cal.p_value > 0.05) ++calibrated_ok;

    Mixture shifted = sample_mixture(p0_tgt, 5.0, 4.0, m, data_rng);  // class 0 moved 5 sigma
    ShiftReport pow = assumption_check_mmd(src.scores, src.labels, w, shifted.scores, 120,
                                           data_rng.substream(102));
    if (pow.reject) ++power_hits;
  }

  CHECK(calibrated_ok >= 45);  // >= 90% of runs
  CHECK(power_hits >= 45);
}
