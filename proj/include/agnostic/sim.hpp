#pragma once

// Deterministic Monte Carlo harness for decision probabilities.
//
// Replicate r of grid point g draws its data from the counter-based stream
// (seed, r, 2g) and any auxiliary randomness from (seed, r, 2g + 1). Results
// therefore do not depend on how replicates are scheduled across threads.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "agnostic/core.hpp"
#include "agnostic/random.hpp"
#include "agnostic/tests.hpp"

namespace agnostic::sim {

inline constexpr std::uint64_t kDefaultSizeReplicates = 100'000;
inline constexpr std::uint64_t kDefaultCurveReplicates = 10'000;

struct SimConfig {
  std::uint64_t replicates = kDefaultSizeReplicates;
  std::uint64_t seed = 0;
  std::vector<double> grid;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

/// N(theta, sigma^2) samples of size n.
struct DataModel {
  double theta;
  double sigma;
  int n;
};

/// A test applied to one simulated sample. `aux` is an independent uniform
/// stream for randomized procedures; deterministic tests ignore it.
using DecisionProcedure =
    std::function<Decision(std::span<const double> sample,
                           random::UniformStream& aux)>;

struct DecisionEstimate {
  DecisionProbs probs;
  double se_accept = 0.0;
  double se_agnostic = 0.0;
  double se_reject = 0.0;
  std::uint64_t replicates = 0;

  double se(Decision d) const noexcept;
};

DecisionEstimate estimate_decision_probs(const DecisionProcedure& test,
                                         const DataModel& model,
                                         const SimConfig& config,
                                         std::uint32_t grid_index = 0);

/// Power: probability of accepting on H0, of rejecting on H1.
bool in_null(const tests::HypothesisSide& h0, double theta) noexcept;
double power_of(const DecisionProbs& probs, bool null_holds) noexcept;

struct DominanceRow {
  double theta;
  bool null_holds;
  double power;
  double se;
  double trivial_power;
  bool ok;
};

struct DominanceReport {
  std::vector<DominanceRow> rows;
  bool holds = true;
};

/// Compares the test's power with that of the data-free (alpha, beta) test
/// (beta on H0, alpha on H1) at every point of `config.grid`, allowing three
/// Monte Carlo standard errors.
DominanceReport dominance_check(const DecisionProcedure& test,
                                const ErrorBudget& budget,
                                const tests::HypothesisSide& h0, double sigma,
                                int n, const SimConfig& config);

/// Rejects with probability alpha and accepts with probability beta,
/// ignoring the data.
DecisionProcedure trivial_procedure(const ErrorBudget& budget);

// Consistency ---------------------------------------------------------------

using RateFunction = std::function<double(int n)>;

/// exp(-sqrt(n)).
double default_rate(int n);

struct ScheduleEntry {
  int n;
  double alpha_n;
  double beta_n;
  double a_n;
  double b_n;
  double gamma_n;
  FourCut cuts;
};

struct ConsistencySchedule {
  double sigma;
  std::vector<ScheduleEntry> entries;
};

/// Bilateral z-test schedule for H0: mu = 0 with alpha_n = beta_n = rate(n),
/// a_n = -Phi^-1(alpha_n / 2) sigma / sqrt(n), b_n = min(a_n, n^-1/4) and
/// gamma_n = b_n + sqrt(-2 log(sqrt(2 pi) beta_n) / n).
ConsistencySchedule build_consistency_schedule(double sigma,
                                               std::span<const int> n_values,
                                               const RateFunction& rate = default_rate);

/// One row of a simulation table.
struct SimRow {
  int n;
  double theta;
  DecisionProbs probs;
  /// Power and its Monte Carlo standard error.
  double power;
  double se;
  /// Exact power of the same test, for comparison.
  double analytic_power;
};

/// Exact decision probabilities of the schedule's test at mean mu.
DecisionProbs schedule_decision_probs(const ConsistencySchedule& schedule,
                                      const ScheduleEntry& entry, double mu);

std::vector<SimRow> consistency_run(const ConsistencySchedule& schedule,
                                    std::span<const double> mu_values,
                                    const SimConfig& config);

struct BoundaryDemo {
  std::vector<SimRow> rows;
  /// Power at the boundary stayed within max(alpha, beta) + 3 s.e. for all n.
  bool bound_holds = true;
};

/// Unilateral z test of H0: mu <= mu0 with a fixed budget: power at the
/// boundary mu0 (bounded by max(alpha, beta) for every n) and at the
/// interior alternative mu0 + 0.5 sigma.
BoundaryDemo boundary_nonconsistency_demo(const ErrorBudget& budget,
                                          std::span<const int> n_values,
                                          const SimConfig& config,
                                          double mu0 = 0.0, double sigma = 1.0);

/// Same family with alpha_n = beta_n = rate(n) at the boundary mu0; the
/// agnostic probability tends to one.
std::vector<SimRow> boundary_agnostic_run(std::span<const int> n_values,
                                          const SimConfig& config,
                                          const RateFunction& rate = default_rate,
                                          double mu0 = 0.0, double sigma = 1.0);

/// CSV with header "n,theta,p_accept,p_agnostic,p_reject,se".
std::string format_sim_csv(std::span<const SimRow> rows);

}  // namespace agnostic::sim
