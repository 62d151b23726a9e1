#include "agnostic/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agnostic/errors.hpp"

namespace agnostic {

namespace {

double checked_cdf(const CdfFunction& cdf_at, double x) {
  const double v = cdf_at(x);
  if (!(v >= 0.0 && v <= 1.0)) {
    throw NumericError("CDF value outside [0, 1] at " + std::to_string(x));
  }
  return v;
}

DecisionProbs from_accept_reject(double accept, double reject) {
  if (accept + reject > 1.0) {
    // Only reachable through rounding when the agnostic band is empty.
    reject = 1.0 - accept;
  }
  return {accept, 1.0 - accept - reject, reject};
}

}  // namespace

double decision_code(Decision d) noexcept {
  switch (d) {
    case Decision::Accept:
      return 0.0;
    case Decision::Agnostic:
      return 0.5;
    case Decision::Reject:
      return 1.0;
  }
  return 0.5;
}

std::string_view to_string(Decision d) noexcept {
  switch (d) {
    case Decision::Accept:
      return "accept";
    case Decision::Agnostic:
      return "agnostic";
    case Decision::Reject:
      return "reject";
  }
  return "agnostic";
}

std::string_view display_name(Decision d) noexcept {
  switch (d) {
    case Decision::Accept:
      return "Accept";
    case Decision::Agnostic:
      return "Agnostic";
    case Decision::Reject:
      return "Reject";
  }
  return "Agnostic";
}

ErrorBudget::ErrorBudget(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
    throw DomainError("error budget: alpha and beta must lie in (0, 1)");
  }
}

void ErrorBudget::require_compatible() const {
  if (alpha_ + beta_ > 1.0) {
    throw InvalidBudget("error budget: alpha + beta must not exceed 1");
  }
}

CutRule::CutRule(double c0, double c1) : c0_(c0), c1_(c1) {
  if (std::isnan(c0) || std::isnan(c1) || c0 > c1) {
    throw InvalidConfiguration("cut rule requires c0 <= c1");
  }
}

FourCut::FourCut(double c1l, double c0l, double c0r, double c1r)
    : c1l_(c1l), c0l_(c0l), c0r_(c0r), c1r_(c1r) {
  if (!(c1l <= c0l && c0l <= c0r && c0r <= c1r)) {
    throw InvalidConfiguration("four-cut rule requires c1l <= c0l <= c0r <= c1r");
  }
}

FourCut FourCut::symmetric(double inner, double outer) {
  return FourCut(-outer, -inner, inner, outer);
}

double DecisionProbs::of(Decision d) const noexcept {
  switch (d) {
    case Decision::Accept:
      return p_accept;
    case Decision::Agnostic:
      return p_agnostic;
    case Decision::Reject:
      return p_reject;
  }
  return 0.0;
}

Decision cut_decision(double t, const CutRule& rule) noexcept {
  if (t <= rule.c0()) return Decision::Accept;
  if (t > rule.c1()) return Decision::Reject;
  return Decision::Agnostic;
}

Decision four_cut_decision(double v, const FourCut& cuts) noexcept {
  if (v < cuts.c1l() || v > cuts.c1r()) return Decision::Reject;
  if (v >= cuts.c0l() && v <= cuts.c0r()) return Decision::Accept;
  return Decision::Agnostic;
}

Decision pvalue_decision(Probability p, const ErrorBudget& budget) {
  budget.require_compatible();
  if (p.value() < budget.alpha()) return Decision::Reject;
  if (p.value() >= 1.0 - budget.beta()) return Decision::Accept;
  return Decision::Agnostic;
}

DecisionProbs decision_probs_from_cut(const CdfFunction& cdf_at,
                                      const CutRule& rule) {
  const double accept = checked_cdf(cdf_at, rule.c0());
  const double below_c1 =
      rule.c1() == rule.c0() ? accept : checked_cdf(cdf_at, rule.c1());
  return from_accept_reject(accept, 1.0 - below_c1);
}

DecisionProbs decision_probs_from_four_cut(const CdfFunction& cdf_at,
                                           const FourCut& cuts) {
  const double at_c1l = checked_cdf(cdf_at, cuts.c1l());
  const double at_c0l =
      cuts.c0l() == cuts.c1l() ? at_c1l : checked_cdf(cdf_at, cuts.c0l());
  const double at_c0r = checked_cdf(cdf_at, cuts.c0r());
  const double at_c1r =
      cuts.c1r() == cuts.c0r() ? at_c0r : checked_cdf(cdf_at, cuts.c1r());
  const double accept = std::max(0.0, at_c0r - at_c0l);
  const double reject = at_c1l + (1.0 - at_c1r);
  return from_accept_reject(accept, reject);
}

}  // namespace agnostic
