#pragma once

// Agnostic tests built from region estimators of a scalar parameter, and a
// checker for the inclusion consequences of logical coherence.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "agnostic/core.hpp"
#include "agnostic/tests.hpp"

namespace agnostic::regions {

/// A (possibly unbounded) interval of the real line. Infinite endpoints are
/// always open.
struct Interval {
  double lo;
  double hi;
  bool lo_closed = true;
  bool hi_closed = true;

  static Interval closed(double lo, double hi);
  static Interval open(double lo, double hi);

  bool empty() const noexcept;
  bool contains(double x) const noexcept;
  bool contains(const Interval& other) const noexcept;
  bool intersects(const Interval& other) const noexcept;

  /// "lo,hi" with "-inf"/"inf" for infinite endpoints.
  std::string to_csv() const;
};

/// A null hypothesis for a scalar parameter: a finite union of intervals,
/// kept sorted and merged. Never empty and never the whole line.
class ScalarHypothesis {
 public:
  static ScalarHypothesis less_equal(double theta);
  static ScalarHypothesis equal(double theta);
  static ScalarHypothesis greater_than(double theta);
  static ScalarHypothesis interval_set(double lo, double hi);
  static ScalarHypothesis finite_union(std::span<const ScalarHypothesis> parts);
  static ScalarHypothesis from_intervals(std::vector<Interval> parts);

  const std::vector<Interval>& components() const noexcept { return parts_; }

  ScalarHypothesis complement() const;

  bool contains(double x) const noexcept;
  /// region is a subset of this set.
  bool contains(const Interval& region) const noexcept;
  bool disjoint_from(const Interval& region) const noexcept;
  /// this set is a subset of `region`.
  bool subset_of(const Interval& region) const noexcept;
  bool subset_of(const ScalarHypothesis& other) const noexcept;
  bool disjoint_from(const ScalarHypothesis& other) const noexcept;

  friend bool operator==(const ScalarHypothesis&, const ScalarHypothesis&);

 private:
  explicit ScalarHypothesis(std::vector<Interval> normalized);

  std::vector<Interval> parts_;
};

bool operator==(const Interval& a, const Interval& b) noexcept;

/// inner is a subset of outer.
class NestedRegions {
 public:
  NestedRegions(Interval inner, Interval outer);

  const Interval& inner() const noexcept { return inner_; }
  const Interval& outer() const noexcept { return outer_; }

 private:
  Interval inner_;
  Interval outer_;
};

/// Accept if the region lies inside H0, reject if it misses H0.
Decision region_decision(const Interval& region, const ScalarHypothesis& h0);

/// Accept if H0 lies inside the inner region, reject if the outer region
/// misses H0.
Decision nested_region_decision(const NestedRegions& regions,
                                const ScalarHypothesis& h0);

/// [mean - a1, mean - a2] with a1 = sigma n^-1/2 Phi^-1(1 - alpha) and
/// a2 = sigma n^-1/2 Phi^-1(alpha). Requires alpha <= 0.5.
Interval z_region(const tests::Sample& sample, double sigma, double alpha);

/// As z_region with S and t_{n-1} quantiles.
Interval t_region(const tests::Sample& sample, double alpha);

/// Inner radius t_{n-1}((1 + beta) / 2) S / sqrt(n), outer radius
/// t_{n-1}(1 - alpha / 2) S / sqrt(n).
NestedRegions t_nested_regions(const tests::Sample& sample,
                               const ErrorBudget& budget);

struct HypothesisDecision {
  ScalarHypothesis hypothesis;
  Decision decision;
};

enum class ViolationKind {
  /// H within H', H accepted, H' not accepted.
  AcceptNotMonotone,
  /// H within H', H' rejected, H not rejected.
  RejectNotMonotone,
  /// H accepted and H' disjoint from H not rejected.
  DisjointNotRejected,
};

struct CoherenceViolation {
  ViolationKind kind;
  std::size_t first;
  std::size_t second;
};

std::vector<CoherenceViolation> coherence_violations(
    std::span<const HypothesisDecision> decisions);

/// Decides every hypothesis with region_decision and checks the result.
std::vector<CoherenceViolation> coherence_check(
    const Interval& region, std::span<const ScalarHypothesis> hypotheses);

}  // namespace agnostic::regions
