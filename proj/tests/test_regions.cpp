#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "agnostic/errors.hpp"
#include "agnostic/regions.hpp"

using namespace agnostic;
using namespace agnostic::regions;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> normal_sample(std::mt19937_64& gen, int n, double mu) {
  std::normal_distribution<double> z(mu, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = z(gen);
  return v;
}

}  // namespace

TEST(Interval, Basics) {
  const auto c = Interval::closed(0.0, 1.0);
  EXPECT_TRUE(c.contains(0.0));
  EXPECT_TRUE(c.contains(1.0));
  EXPECT_FALSE(Interval::open(0.0, 1.0).contains(1.0));
  EXPECT_TRUE(Interval::open(0.0, 0.0).empty());
  EXPECT_FALSE(Interval::closed(2.0, 2.0).empty());
  EXPECT_TRUE(c.intersects(Interval::closed(1.0, 3.0)));
  EXPECT_FALSE(c.intersects(Interval::open(1.0, 3.0)));
  EXPECT_TRUE(c.contains(Interval::open(0.0, 1.0)));
  EXPECT_FALSE(Interval::open(0.0, 1.0).contains(c));
  EXPECT_THROW(Interval::closed(1.0, 0.0), InvalidConfiguration);
  EXPECT_EQ(Interval::closed(-kInf, 2.5).to_csv(), "-inf,2.5");
  EXPECT_FALSE(Interval::closed(-kInf, 0.0).lo_closed);
}

TEST(ScalarHypothesis, NormalizationAndComplement) {
  const auto h = ScalarHypothesis::from_intervals(
      {Interval::closed(3.0, 4.0), Interval::closed(0.0, 1.0), Interval::open(1.0, 2.0)});
  ASSERT_EQ(h.components().size(), 2u);
  EXPECT_EQ(h.components()[0], (Interval{0.0, 2.0, true, false}));

  const auto le = ScalarHypothesis::less_equal(0.0);
  EXPECT_EQ(le.complement(), ScalarHypothesis::greater_than(0.0));
  EXPECT_EQ(le.complement().complement(), le);
  const auto point = ScalarHypothesis::equal(1.0);
  const auto punctured = point.complement();
  EXPECT_EQ(punctured.components().size(), 2u);
  EXPECT_FALSE(punctured.contains(1.0));
  EXPECT_TRUE(punctured.contains(1.0 + 1e-12));
  EXPECT_THROW(ScalarHypothesis::from_intervals({}), InvalidConfiguration);
  EXPECT_THROW(ScalarHypothesis::from_intervals({{-kInf, kInf, false, false}}),
               InvalidConfiguration);
  EXPECT_THROW(ScalarHypothesis::from_intervals(
                   {Interval::closed(-kInf, 0.0), Interval{0.0, kInf, false, false}}),
               InvalidConfiguration);
}

TEST(ScalarHypothesis, SubsetAndDisjoint) {
  const auto a = ScalarHypothesis::interval_set(0.0, 1.0);
  const auto b = ScalarHypothesis::less_equal(1.0);
  EXPECT_TRUE(a.subset_of(b));
  EXPECT_FALSE(b.subset_of(a));
  EXPECT_TRUE(a.disjoint_from(ScalarHypothesis::greater_than(1.0)));
  EXPECT_FALSE(a.disjoint_from(ScalarHypothesis::equal(1.0)));
  const std::vector<ScalarHypothesis> parts{ScalarHypothesis::equal(5.0), a};
  const auto u = ScalarHypothesis::finite_union(parts);
  EXPECT_TRUE(u.contains(5.0));
  EXPECT_FALSE(u.contains(3.0));
  EXPECT_TRUE(a.subset_of(u));
}

TEST(RegionDecision, ThreeOutcomes) {
  const auto h0 = ScalarHypothesis::less_equal(0.0);
  EXPECT_EQ(region_decision(Interval::closed(-2.0, -1.0), h0), Decision::Accept);
  EXPECT_EQ(region_decision(Interval::closed(-1.0, 1.0), h0), Decision::Agnostic);
  EXPECT_EQ(region_decision(Interval::closed(0.5, 1.0), h0), Decision::Reject);
  // A point null can never be accepted by a non-degenerate region.
  EXPECT_EQ(region_decision(Interval::closed(-1.0, 1.0), ScalarHypothesis::equal(0.0)),
            Decision::Agnostic);
  EXPECT_EQ(region_decision(Interval::closed(0.0, 0.0), ScalarHypothesis::equal(0.0)),
            Decision::Accept);
}

TEST(NestedRegions, Decisions) {
  const NestedRegions r(Interval::closed(-1.0, 1.0), Interval::closed(-2.0, 2.0));
  EXPECT_EQ(nested_region_decision(r, ScalarHypothesis::equal(0.5)), Decision::Accept);
  EXPECT_EQ(nested_region_decision(r, ScalarHypothesis::equal(1.5)), Decision::Agnostic);
  EXPECT_EQ(nested_region_decision(r, ScalarHypothesis::equal(2.5)), Decision::Reject);
  EXPECT_THROW(NestedRegions(Interval::closed(-3.0, 1.0), Interval::closed(-2.0, 2.0)),
               InvalidConfiguration);
}

TEST(Regions, ZRegionEndpoints) {
  const tests::Sample s({0.0, 1.0, 2.0, 3.0});
  const auto r = z_region(s, 2.0, 0.05);
  EXPECT_NEAR(r.lo, 1.5 - 1.6448536269514727, 1e-12);
  EXPECT_NEAR(r.hi, 1.5 + 1.6448536269514727, 1e-12);
  EXPECT_THROW(z_region(s, 2.0, 0.6), DomainError);
  EXPECT_EQ(z_region(s, 1.0, 0.5).lo, z_region(s, 1.0, 0.5).hi);
}

TEST(Regions, DualityWithZAndTTests) {
  std::mt19937_64 gen(17);
  const double alpha = 0.05;
  const ErrorBudget budget(alpha, alpha);
  for (int rep = 0; rep < 100; ++rep) {
    const tests::Sample s(normal_sample(gen, 8, 0.3));
    const auto zr = z_region(s, 1.0, alpha);
    const auto tr = t_region(s, alpha);
    for (int g = 0; g < 100; ++g) {
      const double theta = -1.5 + 3.0 * g / 99.0;
      const auto h0 = ScalarHypothesis::less_equal(theta);
      EXPECT_EQ(region_decision(zr, h0), tests::z_test(s, theta, 1.0, budget).decision);
      EXPECT_EQ(region_decision(tr, h0),
                tests::t_test_unilateral(s, theta, budget).decision);
    }
  }
}

TEST(Regions, NestedDualityWithBilateralT) {
  std::mt19937_64 gen(23);
  const ErrorBudget budget(0.05, 0.2);
  for (int rep = 0; rep < 50; ++rep) {
    const tests::Sample s(normal_sample(gen, 12, 0.0));
    const auto nested = t_nested_regions(s, budget);
    for (int g = 0; g < 60; ++g) {
      const double theta = -1.2 + 2.4 * g / 59.0;
      EXPECT_EQ(nested_region_decision(nested, ScalarHypothesis::equal(theta)),
                tests::t_test_bilateral(s, theta, budget).decision);
    }
  }
}

TEST(Coherence, RegionTestsAreCoherent) {
  std::mt19937_64 gen(31);
  std::vector<ScalarHypothesis> hs;
  for (double t = -1.0; t <= 1.0; t += 0.25) {
    hs.push_back(ScalarHypothesis::less_equal(t));
    hs.push_back(ScalarHypothesis::greater_than(t));
    hs.push_back(ScalarHypothesis::equal(t));
    hs.push_back(ScalarHypothesis::interval_set(t, t + 0.5));
  }
  for (int rep = 0; rep < 20; ++rep) {
    const tests::Sample s(normal_sample(gen, 6, 0.0));
    EXPECT_TRUE(coherence_check(z_region(s, 1.0, 0.1), hs).empty());
  }
}

TEST(Coherence, DetectsViolations) {
  const auto small = ScalarHypothesis::interval_set(0.0, 1.0);
  const auto big = ScalarHypothesis::less_equal(2.0);
  const auto other = ScalarHypothesis::greater_than(5.0);
  const std::vector<HypothesisDecision> bad{{small, Decision::Accept},
                                            {big, Decision::Reject},
                                            {other, Decision::Agnostic}};
  const auto v = coherence_violations(bad);
  auto has = [&](ViolationKind k, std::size_t a, std::size_t b) {
    for (const auto& x : v) {
      if (x.kind == k && x.first == a && x.second == b) return true;
    }
    return false;
  };
  EXPECT_TRUE(has(ViolationKind::AcceptNotMonotone, 0, 1));
  EXPECT_TRUE(has(ViolationKind::RejectNotMonotone, 0, 1));
  EXPECT_TRUE(has(ViolationKind::DisjointNotRejected, 0, 2));
}
