#include "labelshift/shiftsim.hpp"

#include <vector>

namespace labelshift::sim {

const char* shift_kind_name(ShiftKind k) {
  switch (k) {
    case ShiftKind::Knockout: return "knockout";
    case ShiftKind::TweakOne: return "tweak_one";
    case ShiftKind::Dirichlet: return "dirichlet";
  }
  return "?";
}

ShiftKind parse_shift_kind(const std::string& name) {
  if (name == "knockout") return ShiftKind::Knockout;
  if (name == "tweak_one") return ShiftKind::TweakOne;
  if (name == "dirichlet") return ShiftKind::Dirichlet;
  throw DomainError("unknown shift kind: " + name);
}

ShiftSpec ShiftSpec::knockout(int class_index, double delta) {
  if (delta < 0.0 || delta > 1.0) throw DomainError("knockout: delta must be in [0, 1]");
  return ShiftSpec{ShiftKind::Knockout, class_index, delta};
}

ShiftSpec ShiftSpec::tweak_one(int class_index, double rho) {
  if (rho < 0.0 || rho > 1.0) throw DomainError("tweak_one: rho must be in [0, 1]");
  return ShiftSpec{ShiftKind::TweakOne, class_index, rho};
}

ShiftSpec ShiftSpec::dirichlet(double alpha) {
  if (alpha <= 0.0) throw DomainError("dirichlet: alpha must be positive");
  return ShiftSpec{ShiftKind::Dirichlet, std::nullopt, alpha};
}

LabelDistribution apply_knockout(const LabelDistribution& base, int class_index, double delta) {
  if (class_index < 0 || class_index >= base.k())
    throw DomainError("apply_knockout: class index out of range");
  if (delta < 0.0 || delta > 1.0) throw DomainError("apply_knockout: delta must be in [0, 1]");
  Eigen::VectorXd masses = base.probs();
  masses(class_index) *= 1.0 - delta;
  return LabelDistribution::from_counts(masses);
}

LabelDistribution tweak_one(LabelSpace space, int class_index, double rho) {
  if (class_index < 0 || class_index >= space.k)
    throw DomainError("tweak_one: class index out of range");
  if (rho < 0.0 || rho > 1.0) throw DomainError("tweak_one: rho must be in [0, 1]");
  Eigen::VectorXd probs = Eigen::VectorXd::Constant(space.k, (1.0 - rho) / (space.k - 1));
  probs(class_index) = rho;
  return LabelDistribution::from_counts(probs);
}

LabelDistribution dirichlet_shift(LabelSpace space, double alpha, SeededRng& rng) {
  if (alpha <= 0.0) throw DomainError("dirichlet_shift: alpha must be positive");
  Eigen::VectorXd gammas(space.k);
  for (int c = 0; c < space.k; ++c) gammas(c) = rng.gamma(alpha);
  return LabelDistribution::from_counts(gammas);
}

LabelDistribution apply_shift(const ShiftSpec& spec, const LabelDistribution& base,
                              LabelSpace space, SeededRng& rng) {
  switch (spec.kind) {
    case ShiftKind::Knockout:
      return apply_knockout(base, spec.class_index.value_or(0), spec.param);
    case ShiftKind::TweakOne:
      return tweak_one(space, spec.class_index.value_or(0), spec.param);
    case ShiftKind::Dirichlet:
      return dirichlet_shift(space, spec.param, rng);
  }
  throw DomainError("apply_shift: bad shift kind");
}

Dataset resample_by_label(const Dataset& data, const LabelDistribution& q, Eigen::Index size,
                          SeededRng& rng) {
  if (q.k() != data.space.k) throw DomainError("resample_by_label: distribution k mismatch");

  std::vector<std::vector<Eigen::Index>> pools(static_cast<std::size_t>(data.space.k));
  for (Eigen::Index i = 0; i < data.n(); ++i)
    pools[static_cast<std::size_t>(data.labels(i))].push_back(i);
  for (int c = 0; c < data.space.k; ++c)
    if (q[c] > 0.0 && pools[static_cast<std::size_t>(c)].empty())
      throw SupportError("resample_by_label: q puts mass on class " + std::to_string(c) +
                         " which has no examples");

  Eigen::MatrixXd features(size, data.dim());
  Eigen::VectorXi labels(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    int c = rng.draw_class(q);
    const auto& pool = pools[static_cast<std::size_t>(c)];
    Eigen::Index pick = pool[static_cast<std::size_t>(rng.uniform_index(
        static_cast<Eigen::Index>(pool.size())))];
    features.row(i) = data.features.row(pick);
    labels(i) = c;
  }
  return Dataset(std::move(features), std::move(labels), data.space);
}

}  // namespace labelshift::sim
