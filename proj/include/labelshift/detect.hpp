#pragma once

#include <span>
#include <utility>

#include "labelshift/types.hpp"

namespace labelshift::detect {

enum class TestMethod { Ks, Chi2, Mmd };

const char* method_name(TestMethod m);

/// Outcome of a two-sample shift test.
struct ShiftReport {
  TestMethod method;
  double statistic;
  double p_value;
  double alpha;
  bool reject;  // p_value < alpha
  Eigen::Index n1, n2;
};

/// Asymptotic Kolmogorov survival value 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2
/// lambda^2), clamped to [0, 1]; terms below 1e-12 are dropped.
double kolmogorov_pvalue(double lambda);

/// Two-sample Kolmogorov-Smirnov test. D is the sup distance between the
/// empirical CDFs over the pooled sample points; the p-value is asymptotic at
/// lambda = D * sqrt(n1 n2 / (n1 + n2)). Ties (unavoidable on discrete
/// predictions) make the p-value conservative.
std::pair<double, double> ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x),
/// series / continued-fraction evaluation, absolute error below 1e-10.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// Chi-square survival function P(X > x) with df degrees of freedom.
double chi2_survival(double x, double df);

/// Two-sample chi-square homogeneity test on per-class counts. Categories
/// with zero pooled count are dropped and the degrees of freedom reduced
/// accordingly.
std::pair<double, double> chi2_two_sample(const Eigen::VectorXd& counts_a,
                                          const Eigen::VectorXd& counts_b);

/// Black box shift detection: two-sample test between the source and target
/// prediction distributions. Soft predictions reduce to argmax first (ties
/// toward the lowest class). `ks` treats class indices as reals; `chi2` tests
/// the per-class counts.
ShiftReport detect_label_shift(const Predictions& source, const Predictions& target,
                               LabelSpace space, double alpha, TestMethod method);

}  // namespace labelshift::detect
