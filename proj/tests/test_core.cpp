#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "agnostic/core.hpp"
#include "agnostic/errors.hpp"
#include "agnostic/random.hpp"

using namespace agnostic;

TEST(Decision, CodesAndNames) {
  EXPECT_EQ(decision_code(Decision::Accept), 0.0);
  EXPECT_EQ(decision_code(Decision::Agnostic), 0.5);
  EXPECT_EQ(decision_code(Decision::Reject), 1.0);
  EXPECT_EQ(to_string(Decision::Agnostic), "agnostic");
  EXPECT_EQ(display_name(Decision::Reject), "Reject");
}

TEST(ErrorBudget, Validation) {
  EXPECT_THROW(ErrorBudget(0.0, 0.5), DomainError);
  EXPECT_THROW(ErrorBudget(0.5, 1.0), DomainError);
  EXPECT_NO_THROW(ErrorBudget(0.6, 0.6));
  EXPECT_THROW(ErrorBudget(0.6, 0.6).require_compatible(), InvalidBudget);
  EXPECT_NO_THROW(ErrorBudget(0.5, 0.5).require_compatible());
}

TEST(CutRule, Decisions) {
  const CutRule rule(-1.0, 2.0);
  EXPECT_EQ(cut_decision(-1.0, rule), Decision::Accept);
  EXPECT_EQ(cut_decision(0.0, rule), Decision::Agnostic);
  EXPECT_EQ(cut_decision(2.0, rule), Decision::Agnostic);
  EXPECT_EQ(cut_decision(2.0000001, rule), Decision::Reject);
  EXPECT_THROW(CutRule(1.0, 0.0), InvalidConfiguration);
  // Degenerate c0 = c1 is a standard test.
  const CutRule sharp(0.5, 0.5);
  EXPECT_EQ(cut_decision(0.5, sharp), Decision::Accept);
  EXPECT_EQ(cut_decision(0.6, sharp), Decision::Reject);
}

TEST(FourCut, Decisions) {
  const auto cuts = FourCut::symmetric(1.0, 2.0);
  EXPECT_EQ(four_cut_decision(0.0, cuts), Decision::Accept);
  EXPECT_EQ(four_cut_decision(-1.0, cuts), Decision::Accept);
  EXPECT_EQ(four_cut_decision(1.5, cuts), Decision::Agnostic);
  EXPECT_EQ(four_cut_decision(-2.0, cuts), Decision::Agnostic);
  EXPECT_EQ(four_cut_decision(-2.5, cuts), Decision::Reject);
  EXPECT_EQ(four_cut_decision(2.5, cuts), Decision::Reject);
  EXPECT_THROW(FourCut(0.0, -1.0, 1.0, 2.0), InvalidConfiguration);
  EXPECT_THROW(FourCut::symmetric(3.0, 2.0), InvalidConfiguration);
}

TEST(PValueRule, Decisions) {
  const ErrorBudget budget(0.05, 0.2);
  EXPECT_EQ(pvalue_decision(Probability(0.01), budget), Decision::Reject);
  EXPECT_EQ(pvalue_decision(Probability(0.05), budget), Decision::Agnostic);
  EXPECT_EQ(pvalue_decision(Probability(0.5), budget), Decision::Agnostic);
  EXPECT_EQ(pvalue_decision(Probability(0.8), budget), Decision::Accept);
  EXPECT_THROW(pvalue_decision(Probability(0.5), ErrorBudget(0.7, 0.7)), InvalidBudget);
}

TEST(PValueRule, AlphaPlusBetaOneIsStandardTest) {
  const ErrorBudget budget(0.05, 0.95);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = unif(gen);
    EXPECT_NE(pvalue_decision(Probability(p), budget), Decision::Agnostic);
  }
}

TEST(DecisionProbs, SumToOne) {
  const auto cdf = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  const auto a = decision_probs_from_cut(cdf, CutRule(-0.5, 1.0));
  EXPECT_NEAR(a.p_accept + a.p_agnostic + a.p_reject, 1.0, 1e-15);
  EXPECT_NEAR(a.p_accept, cdf(-0.5), 1e-15);
  EXPECT_NEAR(a.p_reject, 1.0 - cdf(1.0), 1e-15);
  const auto b = decision_probs_from_four_cut(cdf, FourCut(-2.0, -1.0, 1.0, 2.0));
  EXPECT_NEAR(b.p_accept + b.p_agnostic + b.p_reject, 1.0, 1e-15);
  EXPECT_NEAR(b.of(Decision::Accept), cdf(1.0) - cdf(-1.0), 1e-15);
  EXPECT_THROW(decision_probs_from_cut([](double) { return 1.5; }, CutRule(0, 1)),
               NumericError);
}

// Philox4x32-10 known-answer vectors.
TEST(Philox, KnownAnswers) {
  using random::philox4x32;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
            (random::PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                       {0xffffffff, 0xffffffff}),
            (random::PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                       {0xa4093822, 0x299f31d0}),
            (random::PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(UniformStream, ReproducibleAndIndependentOfOrder) {
  random::UniformStream a(7, 3, 1);
  random::UniformStream b(7, 3, 1);
  random::UniformStream other(7, 4, 1);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double u = a.next();
    EXPECT_EQ(u, b.next());
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    differs = differs || u != other.next();
  }
  EXPECT_TRUE(differs);
}

TEST(UniformStream, MomentsAndBoundedIntegers) {
  random::UniformStream s(42, 0, 0);
  double sum = 0.0;
  double sq = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next();
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.003);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);

  std::array<int, 7> hist{};
  for (int i = 0; i < 70000; ++i) ++hist[s.next_below(7)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(NormalStream, Moments) {
  random::NormalStream s(1, 2, 3);
  double sum = 0.0;
  double sq = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = s.next();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}
