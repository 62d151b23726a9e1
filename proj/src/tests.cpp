#include "agnostic/tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "agnostic/errors.hpp"
#include "agnostic/random.hpp"

namespace agnostic::tests {

using specfun::noncentral_t_cdf;
using specfun::std_normal_cdf;
using specfun::std_normal_quantile;
using specfun::student_t_quantile;
using specfun::student_t_sf;

namespace {

void require_scale(double sigma, int n) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("sigma must be positive and finite");
  }
  if (n < 1) throw DomainError("sample size must be at least 1");
}

double two_sided_t_pvalue(double v, DegreesOfFreedom df) {
  return std::min(1.0, 2.0 * student_t_sf(std::fabs(v), df).value());
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// C(total, chosen), or cap + 1 once it exceeds cap.
std::uint64_t capped_binomial(std::uint64_t total, std::uint64_t chosen,
                              std::uint64_t cap) {
  chosen = std::min(chosen, total - chosen);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= chosen; ++i) {
    // result * (total - chosen + i) / i stays integral at every step.
    const __uint128_t next =
        static_cast<__uint128_t>(result) * (total - chosen + i) / i;
    if (next > cap) return cap + 1;
    result = static_cast<std::uint64_t>(next);
  }
  return result;
}

// mean(selected) - mean(rest), summing in pooled index order.
double relabeled_statistic(std::span<const double> pooled,
                           const std::vector<char>& in_y, std::size_t n_y) {
  double sum_y = 0.0;
  double sum_x = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    if (in_y[i]) {
      sum_y += pooled[i];
    } else {
      sum_x += pooled[i];
    }
  }
  const auto n_x = pooled.size() - n_y;
  return sum_y / static_cast<double>(n_y) - sum_x / static_cast<double>(n_x);
}

}  // namespace

// Sample ----------------------------------------------------------------------

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw DomainError("sample needs at least two values");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("sample values must be finite");
  }
}

double Sample::mean() const noexcept { return mean_of(values_); }

double Sample::variance() const noexcept {
  const double m = mean();
  double ss = 0.0;
  for (double v : values_) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values_.size() - 1);
}

// z test ----------------------------------------------------------------------

CutRule z_cut_rule(double mu0, double sigma, int n, const ErrorBudget& budget) {
  require_scale(sigma, n);
  budget.require_compatible();
  const double scale = sigma / std::sqrt(static_cast<double>(n));
  const double c0 = mu0 - scale * std_normal_quantile(1.0 - budget.beta());
  const double c1 = mu0 - scale * std_normal_quantile(budget.alpha());
  return CutRule(c0, c1);
}

TestReport z_test(const Sample& sample, double mu0, double sigma,
                  const ErrorBudget& budget) {
  const int n = static_cast<int>(sample.size());
  const CutRule rule = z_cut_rule(mu0, sigma, n, budget);
  const double mean = sample.mean();
  const double z = (mean - mu0) * std::sqrt(static_cast<double>(n)) / sigma;
  return {mean, specfun::std_normal_sf(z).value(), rule, cut_decision(mean, rule)};
}

DecisionProbs z_decision_probs(double mu, double mu0, double sigma, int n,
                               const ErrorBudget& budget) {
  const CutRule rule = z_cut_rule(mu0, sigma, n, budget);
  const double root_n = std::sqrt(static_cast<double>(n));
  return decision_probs_from_cut(
      [&](double x) { return std_normal_cdf((x - mu) * root_n / sigma).value(); },
      rule);
}

// t tests ---------------------------------------------------------------------

double t_statistic(const Sample& sample, double mu0) {
  const double var = sample.variance();
  if (!(var > 0.0)) throw DegenerateData("sample variance is zero");
  return std::sqrt(static_cast<double>(sample.size())) * (sample.mean() - mu0) /
         std::sqrt(var);
}

CutRule t_unilateral_rule(DegreesOfFreedom df, const ErrorBudget& budget) {
  budget.require_compatible();
  return CutRule(student_t_quantile(budget.beta(), df),
                 student_t_quantile(1.0 - budget.alpha(), df));
}

FourCut t_bilateral_rule(DegreesOfFreedom df, const ErrorBudget& budget) {
  budget.require_compatible();
  const double inner = student_t_quantile(0.5 * (1.0 + budget.beta()), df);
  const double outer = student_t_quantile(1.0 - 0.5 * budget.alpha(), df);
  return FourCut::symmetric(inner, outer);
}

TestReport t_test_unilateral(const Sample& sample, double mu0,
                             const ErrorBudget& budget) {
  const DegreesOfFreedom df(static_cast<double>(sample.size() - 1));
  const CutRule rule = t_unilateral_rule(df, budget);
  const double t = t_statistic(sample, mu0);
  return {t, student_t_sf(t, df).value(), rule, cut_decision(t, rule)};
}

TestReport t_test_bilateral(const Sample& sample, double mu0,
                            const ErrorBudget& budget) {
  const DegreesOfFreedom df(static_cast<double>(sample.size() - 1));
  const FourCut cuts = t_bilateral_rule(df, budget);
  const double t = t_statistic(sample, mu0);
  return {t, two_sided_t_pvalue(t, df), cuts, four_cut_decision(t, cuts)};
}

DecisionProbs t_decision_probs(double mu, double sigma, int n,
                               const HypothesisSide& h0,
                               const ErrorBudget& budget) {
  require_scale(sigma, n);
  if (n < 2) throw DomainError("t test needs n >= 2");
  const DegreesOfFreedom df(static_cast<double>(n - 1));
  const double delta = std::sqrt(static_cast<double>(n)) * (mu - h0.value) / sigma;
  auto cdf = [&](double x) { return noncentral_t_cdf(x, df, delta).value(); };
  if (h0.kind == SideKind::LessEqual) {
    return decision_probs_from_cut(cdf, t_unilateral_rule(df, budget));
  }
  return decision_probs_from_four_cut(cdf, t_bilateral_rule(df, budget));
}

// Linear regression -----------------------------------------------------------

RegressionData::RegressionData(Eigen::MatrixXd x, Eigen::VectorXd y)
    : design(std::move(x)), response(std::move(y)) {
  if (design.rows() != response.size()) {
    throw InvalidConfiguration("design and response row counts differ");
  }
  if (design.cols() < 1 || design.rows() <= design.cols()) {
    throw InvalidConfiguration("regression needs n > d >= 1");
  }
  if (!design.allFinite() || !response.allFinite()) {
    throw DomainError("regression data must be finite");
  }
}

Eigen::VectorXd RegressionFit::std_errors() const {
  return (xtx_inverse.diagonal() * sigma2_hat).cwiseSqrt();
}

RegressionFit fit_regression(const RegressionData& data) {
  const Eigen::Index n = data.design.rows();
  const Eigen::Index d = data.design.cols();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.design);
  if (qr.rank() < d) throw SingularMatrix("design matrix is rank deficient");

  Eigen::VectorXd beta = qr.solve(data.response);
  const Eigen::VectorXd residual = data.response - data.design * beta;
  const double rss = residual.squaredNorm();

  // X P = Q R  =>  (X'X)^-1 = P R^-1 R^-T P'.
  const Eigen::MatrixXd r =
      qr.matrixR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd permuted = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  Eigen::MatrixXd xtx_inv = perm * permuted * perm.transpose();
  xtx_inv = 0.5 * (xtx_inv + xtx_inv.transpose()).eval();

  Eigen::VectorXd column_sd(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto col = data.design.col(j);
    const double m = col.mean();
    column_sd(j) = std::sqrt((col.array() - m).square().sum() /
                             static_cast<double>(n - 1));
  }

  const auto df = static_cast<double>(n - d);
  return {std::move(beta), std::move(xtx_inv), rss / df, rss,
          DegreesOfFreedom(df), std::move(column_sd)};
}

TestReport regression_contrast_test(const RegressionFit& fit,
                                    const Eigen::VectorXd& contrast,
                                    const ErrorBudget& budget,
                                    const HypothesisSide& h0) {
  if (contrast.size() != fit.beta_hat.size()) {
    throw InvalidConfiguration("contrast length does not match coefficients");
  }
  if (!(fit.sigma2_hat > 0.0)) throw DegenerateData("residual variance is zero");
  const double variance =
      contrast.dot(fit.xtx_inverse * contrast) * fit.sigma2_hat;
  if (!(variance > 0.0)) throw DegenerateData("contrast has zero variance");
  const double v = (contrast.dot(fit.beta_hat) - h0.value) / std::sqrt(variance);
  const DegreesOfFreedom df = fit.df_resid;

  if (h0.kind == SideKind::LessEqual) {
    const CutRule rule = t_unilateral_rule(df, budget);
    return {v, student_t_sf(v, df).value(), rule, cut_decision(v, rule)};
  }
  const FourCut cuts = t_bilateral_rule(df, budget);
  return {v, two_sided_t_pvalue(v, df), cuts, four_cut_decision(v, cuts)};
}

TestReport glh_f_test(const RegressionFit& fit, const Eigen::MatrixXd& contrasts,
                      const Eigen::VectorXd& gamma0, const ErrorBudget& budget) {
  const Eigen::Index q = contrasts.rows();
  if (q < 1 || contrasts.cols() != fit.beta_hat.size() || gamma0.size() != q) {
    throw InvalidConfiguration("contrast matrix dimensions do not match");
  }
  if (q > fit.beta_hat.size()) {
    throw SingularMatrix("more contrasts than coefficients");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(contrasts);
  if (rank_check.rank() < q) throw SingularMatrix("contrast matrix is rank deficient");
  if (!(fit.sigma2_hat > 0.0)) throw DegenerateData("residual variance is zero");

  const Eigen::VectorXd diff = contrasts * fit.beta_hat - gamma0;
  const Eigen::MatrixXd middle =
      contrasts * fit.xtx_inverse * contrasts.transpose();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(middle);
  const double quad = diff.dot(ldlt.solve(diff));
  const double f = std::max(0.0, quad / (static_cast<double>(q) * fit.sigma2_hat));
  const Probability p =
      specfun::f_sf(f, DegreesOfFreedom(static_cast<double>(q)), fit.df_resid);
  return {f, p.value(), PValueRule{budget.alpha(), 1.0 - budget.beta()},
          pvalue_decision(p, budget)};
}

TestReport glh_f_test(const RegressionData& data,
                      const Eigen::MatrixXd& contrasts,
                      const Eigen::VectorXd& gamma0, const ErrorBudget& budget) {
  return glh_f_test(fit_regression(data), contrasts, gamma0, budget);
}

// Permutation test ------------------------------------------------------------

double permutation_tie_tolerance(std::span<const double> x,
                                 std::span<const double> y) noexcept {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::fabs(v));
  for (double v : y) scale = std::max(scale, std::fabs(v));
  return 1e-9 * (1.0 + scale);
}

TestReport permutation_test(std::span<const double> x,
                            std::span<const double> y,
                            const ErrorBudget& budget,
                            const PermutationMode& mode) {
  if (x.empty() || y.empty()) {
    throw DomainError("permutation test needs non-empty samples");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("sample values must be finite");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw DomainError("sample values must be finite");
  }
  budget.require_compatible();

  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::size_t total = pooled.size();
  const std::size_t n_y = y.size();
  const double tolerance = permutation_tie_tolerance(x, y);

  std::vector<char> in_y(total, 0);
  std::fill(in_y.begin() + static_cast<std::ptrdiff_t>(x.size()), in_y.end(), 1);
  const double observed = relabeled_statistic(pooled, in_y, n_y);
  const double threshold = observed - tolerance;

  double p = 1.0;
  if (std::holds_alternative<ExactEnumeration>(mode)) {
    const std::uint64_t count_all =
        capped_binomial(total, n_y, kExactPermutationCap);
    if (count_all > kExactPermutationCap) {
      throw CapacityError("exact permutation enumeration exceeds " +
                          std::to_string(kExactPermutationCap) + " relabelings");
    }
    // Lexicographic walk over n_y-subsets of {0, ..., total - 1}.
    std::vector<std::size_t> idx(n_y);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::uint64_t extreme = 0;
    std::uint64_t visited = 0;
    while (true) {
      std::fill(in_y.begin(), in_y.end(), 0);
      for (auto i : idx) in_y[i] = 1;
      if (relabeled_statistic(pooled, in_y, n_y) >= threshold) ++extreme;
      ++visited;
      std::size_t k = n_y;
      while (k > 0 && idx[k - 1] == total - n_y + (k - 1)) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t j = k; j < n_y; ++j) idx[j] = idx[j - 1] + 1;
    }
    p = static_cast<double>(extreme) / static_cast<double>(visited);
  } else {
    const auto& mc = std::get<MonteCarloPermutations>(mode);
    if (mc.replicates < 1) throw DomainError("need at least one permutation");
    std::vector<std::size_t> order(total);
    std::uint64_t extreme = 0;
    for (std::uint64_t b = 0; b < mc.replicates; ++b) {
      random::UniformStream rng(mc.seed, b, 0);
      std::iota(order.begin(), order.end(), std::size_t{0});
      // Partial Fisher-Yates: the first n_y slots become the y labels.
      for (std::size_t i = 0; i < n_y; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.next_below(total - i));
        std::swap(order[i], order[j]);
      }
      std::fill(in_y.begin(), in_y.end(), 0);
      for (std::size_t i = 0; i < n_y; ++i) in_y[order[i]] = 1;
      if (relabeled_statistic(pooled, in_y, n_y) >= threshold) ++extreme;
    }
    p = static_cast<double>(extreme + 1) / static_cast<double>(mc.replicates + 1);
  }
  return {observed, p, PValueRule{budget.alpha(), 1.0 - budget.beta()},
          pvalue_decision(Probability(p), budget)};
}

// Effect-size calibrated tests ------------------------------------------------

double effect_size_accept_cut(double d_star, double unscaled_variance,
                              DegreesOfFreedom df, double beta) {
  if (!(d_star >= 0.0) || !std::isfinite(d_star)) {
    throw DomainError("effect size must be non-negative and finite");
  }
  if (!(unscaled_variance > 0.0) || !std::isfinite(unscaled_variance)) {
    throw DomainError("unscaled variance must be positive and finite");
  }
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");

  const double delta = d_star / std::sqrt(unscaled_variance);
  if (!std::isfinite(delta)) throw NumericError("noncentrality is not finite");
  auto accept_prob_excess = [&](double c) {
    return noncentral_t_cdf(c, df, delta).value() -
           noncentral_t_cdf(-c, df, delta).value() - beta;
  };
  constexpr double kUpper = 1e3;
  if (accept_prob_excess(kUpper) < 0.0) {
    throw NumericError("effect size: beta unattainable with accept cut <= 1000");
  }
  return specfun::solve_increasing(accept_prob_excess, 0.0, kUpper, 1e-12);
}

CutRule effect_size_rule(const RegressionFit& fit, std::size_t j, double d_star,
                         const ErrorBudget& budget) {
  if (j >= static_cast<std::size_t>(fit.beta_hat.size())) {
    throw InvalidConfiguration("coefficient index out of range");
  }
  const auto jj = static_cast<Eigen::Index>(j);
  const double reject_cut =
      student_t_quantile(1.0 - 0.5 * budget.alpha(), fit.df_resid);
  const double sd = fit.column_sd(jj);
  if (!(sd > 0.0)) {
    // Constant column: any nonzero coefficient is an infinite standardized
    // effect, so the accept region extends up to the reject cut.
    return CutRule(reject_cut, reject_cut);
  }
  const double accept_cut = effect_size_accept_cut(
      d_star, fit.xtx_inverse(jj, jj) * sd * sd, fit.df_resid, budget.beta());
  return CutRule(std::min(accept_cut, reject_cut), reject_cut);
}

TestReport effect_size_regression_test(const RegressionFit& fit, std::size_t j,
                                       double d_star, const ErrorBudget& budget) {
  const CutRule rule = effect_size_rule(fit, j, d_star, budget);
  if (!(fit.sigma2_hat > 0.0)) throw DegenerateData("residual variance is zero");
  const auto jj = static_cast<Eigen::Index>(j);
  const double v =
      fit.beta_hat(jj) / std::sqrt(fit.xtx_inverse(jj, jj) * fit.sigma2_hat);
  const double t = std::fabs(v);
  return {t, two_sided_t_pvalue(v, fit.df_resid), rule, cut_decision(t, rule)};
}

DecisionProbs effect_size_decision_probs(const RegressionFit& fit, std::size_t j,
                                         double d_star,
                                         const ErrorBudget& budget,
                                         double effect) {
  const CutRule rule = effect_size_rule(fit, j, d_star, budget);
  const auto jj = static_cast<Eigen::Index>(j);
  const double sd = fit.column_sd(jj);
  const double scale = sd > 0.0 ? sd : 1.0;
  const double delta = effect / (scale * std::sqrt(fit.xtx_inverse(jj, jj)));
  const DegreesOfFreedom df = fit.df_resid;
  return decision_probs_from_four_cut(
      [&](double x) { return noncentral_t_cdf(x, df, delta).value(); },
      FourCut::symmetric(rule.c0(), rule.c1()));
}

}  // namespace agnostic::tests
