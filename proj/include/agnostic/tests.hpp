#pragma once

// Closed-form agnostic tests: z, t, regression contrasts, the general linear
// hypothesis F test, the two-sample permutation test and effect-size
// calibrated regression tests.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "agnostic/core.hpp"

namespace agnostic::tests {

/// An i.i.d. sample of at least two finite values.
class Sample {
 public:
  explicit Sample(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double mean() const noexcept;
  /// Unbiased (n - 1 denominator) variance.
  double variance() const noexcept;

 private:
  std::vector<double> values_;
};

enum class SideKind { LessEqual, Equal };

/// H0: parameter <= value (unilateral) or parameter == value (bilateral).
struct HypothesisSide {
  SideKind kind;
  double value;

  static HypothesisSide less_equal(double v) { return {SideKind::LessEqual, v}; }
  static HypothesisSide equal(double v) { return {SideKind::Equal, v}; }
};

/// Decision rule expressed on a p-value: reject if p < reject_below, accept
/// if p >= accept_from.
struct PValueRule {
  double reject_below;
  double accept_from;
};

using Thresholds = std::variant<CutRule, FourCut, PValueRule>;

struct TestReport {
  double statistic;
  std::optional<double> p_value;
  Thresholds thresholds;
  Decision decision;
};

// z test (known variance) ---------------------------------------------------

CutRule z_cut_rule(double mu0, double sigma, int n, const ErrorBudget& budget);
TestReport z_test(const Sample& sample, double mu0, double sigma,
                  const ErrorBudget& budget);
/// Exact decision probabilities of the z test when the true mean is `mu`.
DecisionProbs z_decision_probs(double mu, double mu0, double sigma, int n,
                               const ErrorBudget& budget);

// t tests ---------------------------------------------------------------------

/// sqrt(n) (mean - mu0) / S. Throws DegenerateData on zero variance.
double t_statistic(const Sample& sample, double mu0);
TestReport t_test_unilateral(const Sample& sample, double mu0,
                             const ErrorBudget& budget);
TestReport t_test_bilateral(const Sample& sample, double mu0,
                            const ErrorBudget& budget);
/// Cuts on T for the unilateral test with n - 1 degrees of freedom.
CutRule t_unilateral_rule(DegreesOfFreedom df, const ErrorBudget& budget);
/// Symmetric cuts on T for the bilateral test.
FourCut t_bilateral_rule(DegreesOfFreedom df, const ErrorBudget& budget);
DecisionProbs t_decision_probs(double mu, double sigma, int n,
                               const HypothesisSide& h0,
                               const ErrorBudget& budget);

// Linear regression ---------------------------------------------------------

struct RegressionData {
  RegressionData(Eigen::MatrixXd design, Eigen::VectorXd response);

  Eigen::MatrixXd design;
  Eigen::VectorXd response;
};

struct RegressionFit {
  Eigen::VectorXd beta_hat;
  Eigen::MatrixXd xtx_inverse;
  double sigma2_hat;
  double rss;
  DegreesOfFreedom df_resid;
  /// Sample standard deviation of each design column; zero for the intercept.
  Eigen::VectorXd column_sd;

  Eigen::VectorXd std_errors() const;
};

/// Least squares through a column-pivoted QR of the design.
RegressionFit fit_regression(const RegressionData& data);

/// Studentized contrast V = (k'b - c) / se, tested against t_{n-d} cuts.
/// `h0.value` is c.
TestReport regression_contrast_test(const RegressionFit& fit,
                                    const Eigen::VectorXd& contrast,
                                    const ErrorBudget& budget,
                                    const HypothesisSide& h0);

/// F test of K beta = gamma0 with (q, n - d) degrees of freedom, decided via
/// its p-value.
TestReport glh_f_test(const RegressionFit& fit, const Eigen::MatrixXd& contrasts,
                      const Eigen::VectorXd& gamma0, const ErrorBudget& budget);
TestReport glh_f_test(const RegressionData& data,
                      const Eigen::MatrixXd& contrasts,
                      const Eigen::VectorXd& gamma0, const ErrorBudget& budget);

// Permutation test ------------------------------------------------------------

struct ExactEnumeration {};
struct MonteCarloPermutations {
  std::uint64_t replicates;
  std::uint64_t seed;
};
using PermutationMode = std::variant<ExactEnumeration, MonteCarloPermutations>;

inline constexpr std::uint64_t kExactPermutationCap = 1'000'000;

/// Tolerance under which two relabeling statistics count as tied.
double permutation_tie_tolerance(std::span<const double> x,
                                 std::span<const double> y) noexcept;

/// One-sided two-sample test of mean(y) - mean(x); large values are evidence
/// against H0.
TestReport permutation_test(std::span<const double> x,
                            std::span<const double> y,
                            const ErrorBudget& budget,
                            const PermutationMode& mode);

// Effect-size calibrated tests ------------------------------------------------

/// The accept cut c0 >= 0 such that P(|T| <= c0) = beta for T noncentral t
/// with noncentrality d_star / sqrt(unscaled_variance).
double effect_size_accept_cut(double d_star, double unscaled_variance,
                              DegreesOfFreedom df, double beta);

/// Cuts on |T| for coefficient j. The effect size is Cohen's d of a one
/// standard deviation change in the covariate, so the noncentrality is
/// d_star / (sd_j sqrt(a_j)). An accept cut beyond the reject cut is
/// truncated to it; a constant column has infinite noncentrality.
CutRule effect_size_rule(const RegressionFit& fit, std::size_t j, double d_star,
                         const ErrorBudget& budget);

TestReport effect_size_regression_test(const RegressionFit& fit, std::size_t j,
                                       double d_star, const ErrorBudget& budget);

/// Decision probabilities of the effect-size test for coefficient j when the
/// true effect size is `effect`.
DecisionProbs effect_size_decision_probs(const RegressionFit& fit, std::size_t j,
                                         double d_star,
                                         const ErrorBudget& budget,
                                         double effect);

}  // namespace agnostic::tests
