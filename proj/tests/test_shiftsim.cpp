#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "labelshift/shiftsim.hpp"

using namespace labelshift;
using namespace labelshift::sim;

namespace {

Eigen::VectorXd vecd(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

void check_simplex(const LabelDistribution& d) {
  CHECK((d.probs().array() >= 0.0).all());
  CHECK(std::abs(d.probs().sum() - 1.0) <= 1e-12);
}

Dataset toy_dataset(int k, Eigen::Index per_class, SeededRng& rng) {
  Eigen::MatrixXd features(per_class * k, 2);
  Eigen::VectorXi labels(per_class * k);
  for (Eigen::Index i = 0; i < per_class * k; ++i) {
    labels(i) = static_cast<int>(i % k);
    features(i, 0) = rng.uniform();
    features(i, 1) = rng.uniform();
  }
  return Dataset(std::move(features), std::move(labels), LabelSpace(k));
}

}  // namespace

TEST_CASE("apply_knockout: renormalization, no-op, full removal") {
  LabelDistribution uniform10 = LabelDistribution::uniform(LabelSpace(10));

  LabelDistribution half = apply_knockout(uniform10, 5, 0.5);
  CHECK(half[5] == doctest::Approx(0.05 / 0.95).epsilon(1e-12));
  for (int c = 0; c < 10; ++c)
    if (c != 5) CHECK(half[c] == doctest::Approx(0.1 / 0.95).epsilon(1e-12));
  check_simplex(half);

  LabelDistribution same = apply_knockout(uniform10, 5, 0.0);
  CHECK((same.probs() - uniform10.probs()).cwiseAbs().maxCoeff() < 1e-14);

  LabelDistribution gone = apply_knockout(uniform10, 5, 1.0);
  CHECK(gone[5] == 0.0);
  for (int c = 0; c < 10; ++c)
    if (c != 5) CHECK(gone[c] == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

  CHECK_THROWS_AS(apply_knockout(uniform10, 10, 0.5), DomainError);
  CHECK_THROWS_AS(apply_knockout(uniform10, -1, 0.5), DomainError);
  CHECK_THROWS_AS(apply_knockout(uniform10, 0, 1.5), DomainError);
}

TEST_CASE("tweak_one: pinned mass, uniform and one-hot corners") {
  LabelDistribution t = tweak_one(LabelSpace(5), 0, 0.5);
  CHECK(t[0] == 0.5);
  for (int c = 1; c < 5; ++c) CHECK(t[c] == doctest::Approx(0.125).epsilon(1e-15));
  check_simplex(t);

  LabelDistribution u = tweak_one(LabelSpace(4), 2, 0.25);
  for (int c = 0; c < 4; ++c) CHECK(u[c] == doctest::Approx(0.25).epsilon(1e-12));

  LabelDistribution onehot = tweak_one(LabelSpace(3), 1, 1.0);
  CHECK(onehot[1] == 1.0);
  CHECK(onehot[0] == 0.0);
  CHECK(onehot[2] == 0.0);

  CHECK_THROWS_AS(tweak_one(LabelSpace(3), 3, 0.5), DomainError);
  CHECK_THROWS_AS(tweak_one(LabelSpace(3), 0, -0.1), DomainError);
}

TEST_CASE("knockout equals tweak-one on the binary uniform case") {
  LabelDistribution uniform2 = LabelDistribution::uniform(LabelSpace(2));
  for (double delta : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    double rho = 0.5 * (1.0 - delta) / (1.0 - 0.5 * delta);
    LabelDistribution a = apply_knockout(uniform2, 0, delta);
    LabelDistribution b = tweak_one(LabelSpace(2), 0, rho);
    CHECK((a.probs() - b.probs()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("dirichlet_shift: validity, determinism, concentration at high alpha") {
  SeededRng rng(9);
  for (int rep = 0; rep < 50; ++rep) check_simplex(dirichlet_shift(LabelSpace(4), 0.3, rng));

  SeededRng r1(1234), r2(1234);
  LabelDistribution d1 = dirichlet_shift(LabelSpace(10), 1.0, r1);
  LabelDistribution d2 = dirichlet_shift(LabelSpace(10), 1.0, r2);
  CHECK(d1.probs() == d2.probs());

  SeededRng big(77);
  int concentrated = 0;
  const int draws = 1000;
  for (int rep = 0; rep < draws; ++rep) {
    LabelDistribution d = dirichlet_shift(LabelSpace(10), 1000.0, big);
    if ((d.probs().array() - 0.1).abs().maxCoeff() < 0.05) ++concentrated;
  }
  CHECK(concentrated >= 950);

  CHECK_THROWS_AS(dirichlet_shift(LabelSpace(3), 0.0, rng), DomainError);
  CHECK_THROWS_AS(dirichlet_shift(LabelSpace(3), -1.0, rng), DomainError);
}

TEST_CASE("SeededRng: stream determinism and substream independence of draws") {
  SeededRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // substream(i) depends only on (seed, i), not on consumed state.
  SeededRng fresh(42);
  CHECK(a.substream(3).seed() == fresh.substream(3).seed());
  CHECK(fresh.substream(3).seed() != fresh.substream(4).seed());
}

TEST_CASE("resample_by_label: one-hot target, empty output, support errors") {
  SeededRng rng(5);
  Dataset data = toy_dataset(3, 20, rng);

  LabelDistribution onehot(vecd({0.0, 0.0, 1.0}));
  Dataset all2 = resample_by_label(data, onehot, 50, rng);
  CHECK((all2.labels.array() == 2).all());

  Dataset empty = resample_by_label(data, onehot, 0, rng);
  CHECK(empty.n() == 0);

  // Remove class 1 from the pool, then ask for it.
  Eigen::MatrixXd features(2, 2);
  features << 0.0, 0.0, 1.0, 1.0;
  Dataset no1(features, Eigen::VectorXi::Zero(2), LabelSpace(2));
  CHECK_THROWS_AS(
      resample_by_label(no1, LabelDistribution(vecd({0.5, 0.5})), 10, rng), SupportError);
}

TEST_CASE("resample_by_label: frequencies concentrate around q") {
  SeededRng rng(17);
  Dataset data = toy_dataset(3, 50, rng);
  LabelDistribution q = LabelDistribution::uniform(LabelSpace(3));
  const Eigen::Index size = 100000;
  Dataset out = resample_by_label(data, q, size, rng);
  for (int c = 0; c < 3; ++c) {
    double freq = static_cast<double>((out.labels.array() == c).count()) / size;
    double tol = 3.0 * std::sqrt(q[c] * (1.0 - q[c]) / size);
    CHECK(std::abs(freq - q[c]) <= tol);
  }
}

TEST_CASE("resample_by_label: output rows are bit-identical members of the class pool") {
  SeededRng rng(23);
  Dataset data = toy_dataset(4, 10, rng);

  std::vector<std::set<std::vector<double>>> pool(4);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    std::vector<double> row(data.features.row(i).begin(), data.features.row(i).end());
    pool[static_cast<std::size_t>(data.labels(i))].insert(row);
  }

  LabelDistribution q(vecd({0.4, 0.3, 0.2, 0.1}));
  Dataset out = resample_by_label(data, q, 500, rng);
  for (Eigen::Index i = 0; i < out.n(); ++i) {
    std::vector<double> row(out.features.row(i).begin(), out.features.row(i).end());
    CHECK(pool[static_cast<std::size_t>(out.labels(i))].count(row) == 1);
  }
}

TEST_CASE("ShiftSpec construction and dispatch") {
  CHECK(ShiftSpec::knockout(1, 0.5).kind == ShiftKind::Knockout);
  CHECK(ShiftSpec::tweak_one(0, 0.9).param == 0.9);
  CHECK(!ShiftSpec::dirichlet(2.0).class_index.has_value());
  CHECK_THROWS_AS(ShiftSpec::knockout(0, 1.5), DomainError);
  CHECK_THROWS_AS(ShiftSpec::tweak_one(0, -0.5), DomainError);
  CHECK_THROWS_AS(ShiftSpec::dirichlet(0.0), DomainError);

  CHECK(parse_shift_kind("knockout") == ShiftKind::Knockout);
  CHECK(parse_shift_kind("tweak_one") == ShiftKind::TweakOne);
  CHECK(parse_shift_kind("dirichlet") == ShiftKind::Dirichlet);
  CHECK_THROWS_AS(parse_shift_kind("bogus"), DomainError);

  SeededRng rng(3);
  LabelDistribution base = LabelDistribution::uniform(LabelSpace(3));
  LabelDistribution viaspec =
      apply_shift(ShiftSpec::knockout(0, 0.6), base, LabelSpace(3), rng);
  LabelDistribution direct = apply_knockout(base, 0, 0.6);
  CHECK(viaspec.probs() == direct.probs());
}
