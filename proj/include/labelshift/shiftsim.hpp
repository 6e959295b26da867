#pragma once

#include <optional>
#include <string>

#include "labelshift/rng.hpp"
#include "labelshift/types.hpp"

namespace labelshift::sim {

enum class ShiftKind { Knockout, TweakOne, Dirichlet };

const char* shift_kind_name(ShiftKind k);
ShiftKind parse_shift_kind(const std::string& name);

/// One label-shift protocol with its parameter: knockout removes a fraction
/// delta of one class, tweak-one pins one class at mass rho, dirichlet draws
/// the whole marginal from a symmetric Dirichlet(alpha).
struct ShiftSpec {
  ShiftKind kind;
  std::optional<int> class_index;  // knockout, tweak_one
  double param = 0.0;              // delta / rho / alpha per kind

  static ShiftSpec knockout(int class_index, double delta);
  static ShiftSpec tweak_one(int class_index, double rho);
  static ShiftSpec dirichlet(double alpha);
};

/// Scales the chosen class mass by (1 - delta) and renormalizes.
LabelDistribution apply_knockout(const LabelDistribution& base, int class_index, double delta);

/// Gives the chosen class mass rho; the rest is spread evenly.
LabelDistribution tweak_one(LabelSpace space, int class_index, double rho);

/// Symmetric Dirichlet(alpha, ..., alpha) draw via normalized gamma variates.
LabelDistribution dirichlet_shift(LabelSpace space, double alpha, SeededRng& rng);

/// Applies a ShiftSpec to a base marginal (knockout uses the base; the other
/// kinds ignore it).
LabelDistribution apply_shift(const ShiftSpec& spec, const LabelDistribution& base,
                              LabelSpace space, SeededRng& rng);

/// Draws `size` examples with replacement: class c ~ q, then a uniform member
/// of the class-c pool. Output rows are bit-identical copies of input rows,
/// so class-conditional feature distributions are preserved exactly. Throws
/// SupportError if q puts mass on a class with no examples.
Dataset resample_by_label(const Dataset& data, const LabelDistribution& q, Eigen::Index size,
                          SeededRng& rng);

}  // namespace labelshift::sim
