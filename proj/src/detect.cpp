#include "labelshift/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace labelshift::detect {

const char* method_name(TestMethod m) {
  switch (m) {
    case TestMethod::Ks: return "ks";
    case TestMethod::Chi2: return "chi2";
    case TestMethod::Mmd: return "mmd";
  }
  return "?";
}

double kolmogorov_pvalue(double lambda) {
  // Below 0.05 the survival value is 1 to within ~1e-200 and the alternating
  // series converges too slowly to be worth summing.
  if (lambda < 0.05) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100000; ++j) {
    double term = std::exp(-2.0 * j * j * lambda * lambda);
    if (term < 1e-12) break;
    sum += sign * term;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

std::pair<double, double> ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  // Walk the pooled order statistics; compare the CDFs just after each
  // distinct value so ties advance both sides before the comparison.
  while (ia < sa.size() && ib < sb.size()) {
    double x = std::min(sa[ia], sb[ib]);
    while (ia < sa.size() && sa[ia] <= x) ++ia;
    while (ib < sb.size() && sb[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }

  double lambda = d * std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_pvalue(lambda)};
}

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;

double log_gamma(double x) { return std::lgamma(x); }

// Series representation of P(a, x), for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps)
      return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
  }
  throw DomainError("regularized_gamma_p: series failed to converge");
}

// Continued fraction for Q(a, x) by modified Lentz, for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double fpmin = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps)
      return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
  }
  throw DomainError("regularized_gamma_q: continued fraction failed to converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw DomainError("regularized_gamma_p: need a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw DomainError("regularized_gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_survival(double x, double df) {
  if (df <= 0.0) throw DomainError("chi2_survival: df must be positive");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

std::pair<double, double> chi2_two_sample(const Eigen::VectorXd& counts_a,
                                          const Eigen::VectorXd& counts_b) {
  if (counts_a.size() != counts_b.size())
    throw DomainError("chi2_two_sample: count vectors differ in length");
  if ((counts_a.array() < 0.0).any() || (counts_b.array() < 0.0).any())
    throw DomainError("chi2_two_sample: negative count");
  const double total_a = counts_a.sum();
  const double total_b = counts_b.sum();
  if (total_a < 1.0 || total_b < 1.0) throw DomainError("chi2_two_sample: all-zero counts");

  const double grand = total_a + total_b;
  double stat = 0.0;
  int retained = 0;
  for (Eigen::Index c = 0; c < counts_a.size(); ++c) {
    double pooled = counts_a(c) + counts_b(c);
    if (pooled <= 0.0) continue;  // dropped category, df shrinks with it
    ++retained;
    double ea = total_a * pooled / grand;
    double eb = total_b * pooled / grand;
    stat += (counts_a(c) - ea) * (counts_a(c) - ea) / ea;
    stat += (counts_b(c) - eb) * (counts_b(c) - eb) / eb;
  }

  if (retained <= 1) return {0.0, 1.0};  // one shared category carries no evidence
  return {stat, chi2_survival(stat, static_cast<double>(retained - 1))};
}

ShiftReport detect_label_shift(const Predictions& source, const Predictions& target,
                               LabelSpace space, double alpha, TestMethod method) {
  if (alpha <= 0.0 || alpha >= 1.0) throw DomainError("detect_label_shift: alpha must be in (0, 1)");
  if (method == TestMethod::Mmd)
    throw DomainError("detect_label_shift: use assumption_check_mmd for the kernel check");

  Eigen::VectorXi src = source.argmax_labels();
  Eigen::VectorXi tgt = target.argmax_labels();
  check_labels(src, space, "detect_label_shift(source)");
  check_labels(tgt, space, "detect_label_shift(target)");

  double stat, p;
  if (method == TestMethod::Ks) {
    std::vector<double> a(src.size()), b(tgt.size());
    for (Eigen::Index i = 0; i < src.size(); ++i) a[static_cast<std::size_t>(i)] = src(i);
    for (Eigen::Index i = 0; i < tgt.size(); ++i) b[static_cast<std::size_t>(i)] = tgt(i);
    std::tie(stat, p) = ks_two_sample(a, b);
  } else {
    Eigen::VectorXd ca = Eigen::VectorXd::Zero(space.k);
    Eigen::VectorXd cb = Eigen::VectorXd::Zero(space.k);
    for (Eigen::Index i = 0; i < src.size(); ++i) ca(src(i)) += 1.0;
    for (Eigen::Index i = 0; i < tgt.size(); ++i) cb(tgt(i)) += 1.0;
    std::tie(stat, p) = chi2_two_sample(ca, cb);
  }

  return ShiftReport{method, stat, p, alpha, p < alpha, src.size(), tgt.size()};
}

}  // namespace labelshift::detect
