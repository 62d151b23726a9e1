#include "agnostic/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "agnostic/errors.hpp"

namespace agnostic::regions {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Interval normalized(Interval i) {
  if (std::isinf(i.lo)) i.lo_closed = false;
  if (std::isinf(i.hi)) i.hi_closed = false;
  return i;
}

// Lower endpoint a starts no later than b.
bool starts_before(const Interval& a, const Interval& b) {
  if (a.lo != b.lo) return a.lo < b.lo;
  return a.lo_closed && !b.lo_closed;
}

// a and b overlap or touch with no gap point between them (a starts first).
bool mergeable(const Interval& a, const Interval& b) {
  if (a.intersects(b)) return true;
  return a.hi == b.lo && (a.hi_closed || b.lo_closed);
}

std::string format_endpoint(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

}  // namespace

// Interval --------------------------------------------------------------------

Interval Interval::closed(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw InvalidConfiguration("interval requires lo <= hi");
  }
  return normalized({lo, hi, true, true});
}

Interval Interval::open(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw InvalidConfiguration("interval requires lo <= hi");
  }
  return {lo, hi, false, false};
}

bool Interval::empty() const noexcept {
  return lo > hi || (lo == hi && !(lo_closed && hi_closed));
}

bool Interval::contains(double x) const noexcept {
  const bool above = lo_closed ? x >= lo : x > lo;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

bool Interval::contains(const Interval& other) const noexcept {
  if (other.empty()) return true;
  if (empty()) return false;
  const bool lo_ok =
      lo < other.lo || (lo == other.lo && (lo_closed || !other.lo_closed));
  const bool hi_ok =
      hi > other.hi || (hi == other.hi && (hi_closed || !other.hi_closed));
  return lo_ok && hi_ok;
}

bool Interval::intersects(const Interval& other) const noexcept {
  if (empty() || other.empty()) return false;
  double l = lo;
  bool l_closed = lo_closed;
  if (other.lo > lo) {
    l = other.lo;
    l_closed = other.lo_closed;
  } else if (other.lo == lo) {
    l_closed = lo_closed && other.lo_closed;
  }
  double h = hi;
  bool h_closed = hi_closed;
  if (other.hi < hi) {
    h = other.hi;
    h_closed = other.hi_closed;
  } else if (other.hi == hi) {
    h_closed = hi_closed && other.hi_closed;
  }
  return l < h || (l == h && l_closed && h_closed);
}

std::string Interval::to_csv() const {
  return format_endpoint(lo) + "," + format_endpoint(hi);
}

bool operator==(const Interval& a, const Interval& b) noexcept {
  return a.lo == b.lo && a.hi == b.hi && a.lo_closed == b.lo_closed &&
         a.hi_closed == b.hi_closed;
}

// ScalarHypothesis ------------------------------------------------------------

ScalarHypothesis::ScalarHypothesis(std::vector<Interval> normalized_parts)
    : parts_(std::move(normalized_parts)) {}

ScalarHypothesis ScalarHypothesis::from_intervals(std::vector<Interval> parts) {
  std::vector<Interval> kept;
  for (auto& p : parts) {
    if (std::isnan(p.lo) || std::isnan(p.hi)) {
      throw InvalidConfiguration("hypothesis endpoints must not be NaN");
    }
    p = normalized(p);
    if (!p.empty()) kept.push_back(p);
  }
  if (kept.empty()) throw InvalidConfiguration("hypothesis set is empty");
  std::sort(kept.begin(), kept.end(), starts_before);

  std::vector<Interval> merged{kept.front()};
  for (std::size_t i = 1; i < kept.size(); ++i) {
    Interval& last = merged.back();
    const Interval& next = kept[i];
    if (mergeable(last, next)) {
      if (next.hi > last.hi) {
        last.hi = next.hi;
        last.hi_closed = next.hi_closed;
      } else if (next.hi == last.hi) {
        last.hi_closed = last.hi_closed || next.hi_closed;
      }
    } else {
      merged.push_back(next);
    }
  }
  if (merged.size() == 1 && std::isinf(merged[0].lo) && merged[0].lo < 0 &&
      std::isinf(merged[0].hi) && merged[0].hi > 0) {
    throw InvalidConfiguration("hypothesis set is the whole real line");
  }
  return ScalarHypothesis(std::move(merged));
}

ScalarHypothesis ScalarHypothesis::less_equal(double theta) {
  return from_intervals({{-kInf, theta, false, true}});
}

ScalarHypothesis ScalarHypothesis::equal(double theta) {
  return from_intervals({{theta, theta, true, true}});
}

ScalarHypothesis ScalarHypothesis::greater_than(double theta) {
  return from_intervals({{theta, kInf, false, false}});
}

ScalarHypothesis ScalarHypothesis::interval_set(double lo, double hi) {
  return from_intervals({Interval::closed(lo, hi)});
}

ScalarHypothesis ScalarHypothesis::finite_union(
    std::span<const ScalarHypothesis> parts) {
  std::vector<Interval> all;
  for (const auto& h : parts) {
    all.insert(all.end(), h.parts_.begin(), h.parts_.end());
  }
  return from_intervals(std::move(all));
}

ScalarHypothesis ScalarHypothesis::complement() const {
  std::vector<Interval> gaps;
  double cursor = -kInf;
  bool cursor_closed = false;  // whether `cursor` itself belongs to the gap
  for (const auto& p : parts_) {
    Interval gap{cursor, p.lo, cursor_closed, !p.lo_closed};
    if (!gap.empty()) gaps.push_back(normalized(gap));
    cursor = p.hi;
    cursor_closed = !p.hi_closed;
  }
  Interval tail{cursor, kInf, cursor_closed, false};
  if (!tail.empty()) gaps.push_back(normalized(tail));
  return from_intervals(std::move(gaps));
}

bool ScalarHypothesis::contains(double x) const noexcept {
  return std::any_of(parts_.begin(), parts_.end(),
                     [&](const Interval& p) { return p.contains(x); });
}

bool ScalarHypothesis::contains(const Interval& region) const noexcept {
  if (region.empty()) return true;
  // Components are separated by gaps, so a connected region must fit in one.
  return std::any_of(parts_.begin(), parts_.end(),
                     [&](const Interval& p) { return p.contains(region); });
}

bool ScalarHypothesis::disjoint_from(const Interval& region) const noexcept {
  return std::none_of(parts_.begin(), parts_.end(),
                      [&](const Interval& p) { return p.intersects(region); });
}

bool ScalarHypothesis::subset_of(const Interval& region) const noexcept {
  return std::all_of(parts_.begin(), parts_.end(),
                     [&](const Interval& p) { return region.contains(p); });
}

bool ScalarHypothesis::subset_of(const ScalarHypothesis& other) const noexcept {
  return std::all_of(parts_.begin(), parts_.end(),
                     [&](const Interval& p) { return other.contains(p); });
}

bool ScalarHypothesis::disjoint_from(const ScalarHypothesis& other) const noexcept {
  return std::all_of(parts_.begin(), parts_.end(),
                     [&](const Interval& p) { return other.disjoint_from(p); });
}

bool operator==(const ScalarHypothesis& a, const ScalarHypothesis& b) {
  return a.parts_ == b.parts_;
}

// Region tests ----------------------------------------------------------------

NestedRegions::NestedRegions(Interval inner, Interval outer)
    : inner_(inner), outer_(outer) {
  if (!outer_.contains(inner_)) {
    throw InvalidConfiguration("nested regions require inner within outer");
  }
}

Decision region_decision(const Interval& region, const ScalarHypothesis& h0) {
  if (h0.contains(region)) return Decision::Accept;
  if (h0.disjoint_from(region)) return Decision::Reject;
  return Decision::Agnostic;
}

Decision nested_region_decision(const NestedRegions& regions,
                                const ScalarHypothesis& h0) {
  if (h0.subset_of(regions.inner())) return Decision::Accept;
  if (h0.disjoint_from(regions.outer())) return Decision::Reject;
  return Decision::Agnostic;
}

Interval z_region(const tests::Sample& sample, double sigma, double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw DomainError("z_region: alpha must lie in (0, 0.5]");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("z_region: sigma must be positive");
  }
  const double scale = sigma / std::sqrt(static_cast<double>(sample.size()));
  const double a1 = scale * specfun::std_normal_quantile(1.0 - alpha);
  const double a2 = scale * specfun::std_normal_quantile(alpha);
  const double mean = sample.mean();
  return Interval::closed(mean - a1, mean - a2);
}

Interval t_region(const tests::Sample& sample, double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw DomainError("t_region: alpha must lie in (0, 0.5]");
  }
  const double var = sample.variance();
  if (!(var > 0.0)) throw DegenerateData("sample variance is zero");
  const DegreesOfFreedom df(static_cast<double>(sample.size() - 1));
  const double scale = std::sqrt(var / static_cast<double>(sample.size()));
  const double a1 = scale * specfun::student_t_quantile(1.0 - alpha, df);
  const double a2 = scale * specfun::student_t_quantile(alpha, df);
  const double mean = sample.mean();
  return Interval::closed(mean - a1, mean - a2);
}

NestedRegions t_nested_regions(const tests::Sample& sample,
                               const ErrorBudget& budget) {
  budget.require_compatible();
  const double var = sample.variance();
  if (!(var > 0.0)) throw DegenerateData("sample variance is zero");
  const DegreesOfFreedom df(static_cast<double>(sample.size() - 1));
  const double scale = std::sqrt(var / static_cast<double>(sample.size()));
  const double inner =
      scale * specfun::student_t_quantile(0.5 * (1.0 + budget.beta()), df);
  const double outer =
      scale * specfun::student_t_quantile(1.0 - 0.5 * budget.alpha(), df);
  const double mean = sample.mean();
  return NestedRegions(Interval::closed(mean - inner, mean + inner),
                       Interval::closed(mean - outer, mean + outer));
}

// Coherence -------------------------------------------------------------------

std::vector<CoherenceViolation> coherence_violations(
    std::span<const HypothesisDecision> decisions) {
  std::vector<CoherenceViolation> out;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    for (std::size_t j = 0; j < decisions.size(); ++j) {
      if (i == j) continue;
      const auto& h = decisions[i];
      const auto& h_prime = decisions[j];
      if (h.hypothesis.subset_of(h_prime.hypothesis)) {
        if (h.decision == Decision::Accept && h_prime.decision != Decision::Accept) {
          out.push_back({ViolationKind::AcceptNotMonotone, i, j});
        }
        if (h_prime.decision == Decision::Reject && h.decision != Decision::Reject) {
          out.push_back({ViolationKind::RejectNotMonotone, i, j});
        }
      }
      if (h.decision == Decision::Accept &&
          h.hypothesis.disjoint_from(h_prime.hypothesis) &&
          h_prime.decision != Decision::Reject) {
        out.push_back({ViolationKind::DisjointNotRejected, i, j});
      }
    }
  }
  return out;
}

std::vector<CoherenceViolation> coherence_check(
    const Interval& region, std::span<const ScalarHypothesis> hypotheses) {
  std::vector<HypothesisDecision> decided;
  decided.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    decided.push_back({h, region_decision(region, h)});
  }
  return coherence_violations(decided);
}

}  // namespace agnostic::regions
