#pragma once

// Three-valued decisions, error budgets and the cut-rule combinators.

#include <functional>
#include <string_view>

#include "agnostic/specfun.hpp"

namespace agnostic {

using specfun::DegreesOfFreedom;
using specfun::Probability;

/// Outcome of an agnostic test. Ordered Accept < Agnostic < Reject.
enum class Decision { Accept, Agnostic, Reject };

/// Numeric code: 0, 0.5 or 1.
double decision_code(Decision d) noexcept;
/// "accept", "agnostic" or "reject".
std::string_view to_string(Decision d) noexcept;
/// "Accept", "Agnostic" or "Reject".
std::string_view display_name(Decision d) noexcept;

/// Type I / type II bounds. Both lie strictly inside (0, 1); whether
/// alpha + beta <= 1 is required is up to the consumer.
class ErrorBudget {
 public:
  ErrorBudget(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  /// Throws InvalidBudget when alpha + beta > 1.
  void require_compatible() const;

 private:
  double alpha_;
  double beta_;
};

/// Accept if T <= c0, reject if T > c1, agnostic in between.
class CutRule {
 public:
  CutRule(double c0, double c1);

  double c0() const noexcept { return c0_; }
  double c1() const noexcept { return c1_; }

 private:
  double c0_;
  double c1_;
};

/// Bilateral rule: reject outside [c1l, c1r], accept inside [c0l, c0r].
class FourCut {
 public:
  FourCut(double c1l, double c0l, double c0r, double c1r);

  /// (-outer, -inner, inner, outer).
  static FourCut symmetric(double inner, double outer);

  double c1l() const noexcept { return c1l_; }
  double c0l() const noexcept { return c0l_; }
  double c0r() const noexcept { return c0r_; }
  double c1r() const noexcept { return c1r_; }

 private:
  double c1l_;
  double c0l_;
  double c0r_;
  double c1r_;
};

struct DecisionProbs {
  double p_accept = 0.0;
  double p_agnostic = 0.0;
  double p_reject = 0.0;

  double of(Decision d) const noexcept;
};

Decision cut_decision(double t, const CutRule& rule) noexcept;
Decision four_cut_decision(double v, const FourCut& cuts) noexcept;

/// Accept iff p >= 1 - beta, reject iff p < alpha.
Decision pvalue_decision(Probability p, const ErrorBudget& budget);

using CdfFunction = std::function<double(double)>;

/// Decision probabilities of a cut rule applied to a statistic with the given
/// continuous CDF.
DecisionProbs decision_probs_from_cut(const CdfFunction& cdf_at,
                                      const CutRule& rule);
DecisionProbs decision_probs_from_four_cut(const CdfFunction& cdf_at,
                                           const FourCut& cuts);

}  // namespace agnostic
