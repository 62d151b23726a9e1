#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "agnostic/errors.hpp"
#include "agnostic/sim.hpp"

using namespace agnostic;
using namespace agnostic::sim;

namespace {

DecisionProcedure z_procedure(const CutRule& rule) {
  return [rule](std::span<const double> x, random::UniformStream&) {
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    return cut_decision(m, rule);
  };
}

}  // namespace

TEST(Estimate, DeterministicAcrossThreadCounts) {
  const ErrorBudget budget(0.05, 0.05);
  const auto test = z_procedure(tests::z_cut_rule(0.0, 1.0, 10, budget));
  SimConfig config;
  config.replicates = 5000;
  config.seed = 99;
  config.threads = 1;
  const auto one = estimate_decision_probs(test, {0.1, 1.0, 10}, config, 3);
  for (unsigned t : {2u, 3u, 8u}) {
    config.threads = t;
    const auto many = estimate_decision_probs(test, {0.1, 1.0, 10}, config, 3);
    EXPECT_EQ(one.probs.p_accept, many.probs.p_accept);
    EXPECT_EQ(one.probs.p_reject, many.probs.p_reject);
  }
  config.seed = 100;
  const auto other = estimate_decision_probs(test, {0.1, 1.0, 10}, config, 3);
  EXPECT_NE(one.probs.p_reject, other.probs.p_reject);
}

TEST(Estimate, AgreesWithAnalyticWithinBand) {
  const ErrorBudget budget(0.05, 0.1);
  const auto test = z_procedure(tests::z_cut_rule(0.0, 1.0, 10, budget));
  SimConfig config;
  config.replicates = 20000;
  config.seed = 4;
  for (double theta : {-0.5, 0.0, 0.3, 0.8}) {
    const auto est = estimate_decision_probs(test, {theta, 1.0, 10}, config);
    const auto exact = tests::z_decision_probs(theta, 0.0, 1.0, 10, budget);
    for (Decision d : {Decision::Accept, Decision::Agnostic, Decision::Reject}) {
      const double se = std::sqrt(exact.of(d) * (1 - exact.of(d)) / 20000.0);
      EXPECT_NEAR(est.probs.of(d), exact.of(d), 4.0 * se + 1e-12) << theta;
    }
    EXPECT_NEAR(est.probs.p_accept + est.probs.p_agnostic + est.probs.p_reject, 1.0,
                1e-12);
  }
}

TEST(Estimate, RejectsTooFewReplicates) {
  SimConfig config;
  config.replicates = 10;
  EXPECT_THROW(estimate_decision_probs(trivial_procedure(ErrorBudget(0.1, 0.1)),
                                       {0.0, 1.0, 5}, config),
               DomainError);
}

TEST(Trivial, HitsItsBudget) {
  SimConfig config;
  config.replicates = 40000;
  config.seed = 8;
  const auto est = estimate_decision_probs(trivial_procedure(ErrorBudget(0.1, 0.3)),
                                           {0.0, 1.0, 3}, config);
  EXPECT_NEAR(est.probs.p_reject, 0.1, 0.006);
  EXPECT_NEAR(est.probs.p_accept, 0.3, 0.009);
}

TEST(Dominance, UmpTestBeatsTrivialTest) {
  const ErrorBudget budget(0.05, 0.05);
  SimConfig config;
  config.replicates = 4000;
  config.seed = 12;
  for (int g = 0; g < 11; ++g) config.grid.push_back(-1.0 + 0.2 * g);
  const auto report = dominance_check(z_procedure(tests::z_cut_rule(0.0, 1.0, 10, budget)),
                                      budget, tests::HypothesisSide::less_equal(0.0),
                                      1.0, 10, config);
  EXPECT_TRUE(report.holds);
  EXPECT_EQ(report.rows.size(), 11u);
  // An always-agnostic procedure is dominated.
  const auto lazy = dominance_check(
      [](std::span<const double>, random::UniformStream&) { return Decision::Agnostic; },
      budget, tests::HypothesisSide::less_equal(0.0), 1.0, 10, config);
  EXPECT_FALSE(lazy.holds);
}

TEST(Consistency, ScheduleOracle) {
  const std::vector<int> ns{25, 100, 400, 1600, 6400};
  const auto schedule = build_consistency_schedule(1.0, ns);
  const double a[] = {0.54190515462835832, 0.40781271877814207, 0.2996456409521272,
                      0.21679839337591543, 0.15537027847903493};
  const double b[] = {0.44721359549995794, 0.31622776601683793, 0.22360679774997897,
                      0.15811388300841897, 0.11180339887498948};
  const double gamma[] = {1.0186021824910057, 0.74239818889471263, 0.53248429342419709,
                          0.37913724565023147, 0.26900655313206392};
  const double pi0[] = {0.974652681323, 0.998434597742, 0.999992255784, 0.999999999746,
                        1.0};
  const double pi1[] = {0.989003079519, 0.999999998409, 1.0, 1.0, 1.0};
  ASSERT_EQ(schedule.entries.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& e = schedule.entries[i];
    EXPECT_NEAR(e.a_n, a[i], 1e-12);
    EXPECT_NEAR(e.b_n, b[i], 1e-14);
    EXPECT_NEAR(e.gamma_n, gamma[i], 1e-12);
    EXPECT_NEAR(schedule_decision_probs(schedule, e, 0.0).p_accept, pi0[i], 1e-11);
    EXPECT_NEAR(schedule_decision_probs(schedule, e, 1.0).p_reject, pi1[i], 1e-11);
  }
  EXPECT_THROW(build_consistency_schedule(1.0, std::vector<int>{10, 5}), DomainError);
  EXPECT_THROW(build_consistency_schedule(1.0, std::vector<int>{10},
                                          [](int) { return 0.9; }),
               DomainError);
}

TEST(Consistency, SimulatedPowerTracksAnalytic) {
  const std::vector<int> ns{25, 100};
  const auto schedule = build_consistency_schedule(1.0, ns);
  SimConfig config;
  config.replicates = 4000;
  config.seed = 1;
  const std::vector<double> mus{0.0, 1.0};
  const auto rows = consistency_run(schedule, mus, config);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.power, r.analytic_power, 4.0 * r.se + 2e-3);
  }
}

TEST(Boundary, FixedBudgetStaysBounded) {
  SimConfig config;
  config.replicates = 4000;
  config.seed = 6;
  const std::vector<int> ns{10, 100, 1000};
  const auto demo = boundary_nonconsistency_demo(ErrorBudget(0.05, 0.05), ns, config);
  EXPECT_TRUE(demo.bound_holds);
  ASSERT_EQ(demo.rows.size(), 6u);
  for (const auto& r : demo.rows) {
    if (r.theta == 0.0) EXPECT_NEAR(r.analytic_power, 0.05, 1e-12);
  }
  EXPECT_GT(demo.rows.back().power, 0.99);

  const auto agnostic_rows = boundary_agnostic_run(ns, config);
  EXPECT_GT(agnostic_rows.back().probs.p_agnostic, 0.99);
}

TEST(Format, SimCsvHeader) {
  const std::vector<SimRow> rows{{10, 0.5, {0.25, 0.5, 0.25}, 0.25, 0.01, 0.25}};
  EXPECT_EQ(format_sim_csv(rows),
            "n,theta,p_accept,p_agnostic,p_reject,se\n10,0.5,0.25,0.5,0.25,0.01\n");
}
