#include "agnostic/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "agnostic/errors.hpp"

namespace agnostic::sim {

namespace {

using Counts = std::array<std::uint64_t, 3>;

std::size_t slot(Decision d) {
  switch (d) {
    case Decision::Accept:
      return 0;
    case Decision::Agnostic:
      return 1;
    case Decision::Reject:
      return 2;
  }
  return 1;
}

double binomial_se(double p, std::uint64_t reps) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

unsigned worker_count(const SimConfig& config) {
  unsigned threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(
      std::min<std::uint64_t>(threads, std::max<std::uint64_t>(1, config.replicates / 64)));
}

void check_replicates(const SimConfig& config) {
  if (config.replicates < 100) {
    throw DomainError("simulation needs at least 100 replicates");
  }
}

DecisionProcedure mean_four_cut(const FourCut& cuts) {
  return [cuts](std::span<const double> x, random::UniformStream&) {
    const double mean =
        std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    return four_cut_decision(mean, cuts);
  };
}

DecisionProcedure mean_cut(const CutRule& rule) {
  return [rule](std::span<const double> x, random::UniformStream&) {
    const double mean =
        std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    return cut_decision(mean, rule);
  };
}

SimRow make_row(int n, double theta, const DecisionEstimate& est,
                bool null_holds, double analytic_power) {
  const double power = power_of(est.probs, null_holds);
  const double se = est.se(null_holds ? Decision::Accept : Decision::Reject);
  return {n, theta, est.probs, power, se, analytic_power};
}

}  // namespace

double DecisionEstimate::se(Decision d) const noexcept {
  switch (d) {
    case Decision::Accept:
      return se_accept;
    case Decision::Agnostic:
      return se_agnostic;
    case Decision::Reject:
      return se_reject;
  }
  return 0.0;
}

DecisionEstimate estimate_decision_probs(const DecisionProcedure& test,
                                         const DataModel& model,
                                         const SimConfig& config,
                                         std::uint32_t grid_index) {
  check_replicates(config);
  if (model.n < 1) throw DomainError("sample size must be at least 1");
  if (!(model.sigma > 0.0)) throw DomainError("sigma must be positive");

  const unsigned workers = worker_count(config);
  std::vector<Counts> partial(workers, Counts{0, 0, 0});
  const std::uint32_t data_stream = 2 * grid_index;
  const std::uint32_t aux_stream = 2 * grid_index + 1;

  auto run_range = [&](unsigned worker, std::uint64_t begin, std::uint64_t end) {
    std::vector<double> sample(static_cast<std::size_t>(model.n));
    Counts& counts = partial[worker];
    for (std::uint64_t r = begin; r < end; ++r) {
      random::NormalStream normals(config.seed, r, data_stream);
      for (double& v : sample) v = model.theta + model.sigma * normals.next();
      random::UniformStream aux(config.seed, r, aux_stream);
      ++counts[slot(test(sample, aux))];
    }
  };

  const std::uint64_t reps = config.replicates;
  if (workers == 1) {
    run_range(0, 0, reps);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = reps * w / workers;
      const std::uint64_t end = reps * (w + 1) / workers;
      pool.emplace_back(run_range, w, begin, end);
    }
  }

  Counts total{0, 0, 0};
  for (const auto& c : partial) {
    for (std::size_t i = 0; i < 3; ++i) total[i] += c[i];
  }
  const auto r = static_cast<double>(reps);
  DecisionEstimate est;
  est.replicates = reps;
  est.probs = {static_cast<double>(total[0]) / r, static_cast<double>(total[1]) / r,
               static_cast<double>(total[2]) / r};
  est.se_accept = binomial_se(est.probs.p_accept, reps);
  est.se_agnostic = binomial_se(est.probs.p_agnostic, reps);
  est.se_reject = binomial_se(est.probs.p_reject, reps);
  return est;
}

bool in_null(const tests::HypothesisSide& h0, double theta) noexcept {
  return h0.kind == tests::SideKind::LessEqual ? theta <= h0.value
                                               : theta == h0.value;
}

double power_of(const DecisionProbs& probs, bool null_holds) noexcept {
  return null_holds ? probs.p_accept : probs.p_reject;
}

DecisionProcedure trivial_procedure(const ErrorBudget& budget) {
  const double alpha = budget.alpha();
  const double beta = budget.beta();
  budget.require_compatible();
  return [alpha, beta](std::span<const double>, random::UniformStream& aux) {
    const double u = aux.next();
    if (u < alpha) return Decision::Reject;
    if (u < alpha + beta) return Decision::Accept;
    return Decision::Agnostic;
  };
}

DominanceReport dominance_check(const DecisionProcedure& test,
                                const ErrorBudget& budget,
                                const tests::HypothesisSide& h0, double sigma,
                                int n, const SimConfig& config) {
  DominanceReport report;
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const double theta = config.grid[g];
    const auto est = estimate_decision_probs(test, {theta, sigma, n}, config,
                                             static_cast<std::uint32_t>(g));
    const bool null_holds = in_null(h0, theta);
    const double power = power_of(est.probs, null_holds);
    const double se = est.se(null_holds ? Decision::Accept : Decision::Reject);
    const double trivial = null_holds ? budget.beta() : budget.alpha();
    const bool ok = power >= trivial - 3.0 * se;
    report.rows.push_back({theta, null_holds, power, se, trivial, ok});
    report.holds = report.holds && ok;
  }
  return report;
}

double default_rate(int n) { return std::exp(-std::sqrt(static_cast<double>(n))); }

ConsistencySchedule build_consistency_schedule(double sigma,
                                               std::span<const int> n_values,
                                               const RateFunction& rate) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  ConsistencySchedule schedule{sigma, {}};
  int previous = 0;
  for (int n : n_values) {
    if (n <= previous) {
      throw DomainError("schedule sample sizes must be positive and increasing");
    }
    previous = n;
    const double alpha_n = rate(n);
    if (!(alpha_n > 0.0 && alpha_n < 1.0)) {
      throw DomainError("rate must lie in (0, 1)");
    }
    const double beta_n = alpha_n;
    const double root_n = std::sqrt(static_cast<double>(n));
    const double a_n = -specfun::std_normal_quantile(0.5 * alpha_n) * sigma / root_n;
    const double b_n = std::min(a_n, std::pow(static_cast<double>(n), -0.25));
    const double log_term = -2.0 * std::log(std::sqrt(2.0 * std::numbers::pi) * beta_n);
    if (!(log_term >= 0.0)) {
      throw DomainError("rate too large for the type II bound (sqrt(2 pi) beta_n >= 1)");
    }
    const double gamma_n = b_n + std::sqrt(log_term / static_cast<double>(n));
    schedule.entries.push_back(
        {n, alpha_n, beta_n, a_n, b_n, gamma_n, FourCut(-a_n, -b_n, b_n, a_n)});
  }
  return schedule;
}

DecisionProbs schedule_decision_probs(const ConsistencySchedule& schedule,
                                      const ScheduleEntry& entry, double mu) {
  const double scale = schedule.sigma / std::sqrt(static_cast<double>(entry.n));
  return decision_probs_from_four_cut(
      [&](double x) { return specfun::std_normal_cdf((x - mu) / scale).value(); },
      entry.cuts);
}

std::vector<SimRow> consistency_run(const ConsistencySchedule& schedule,
                                    std::span<const double> mu_values,
                                    const SimConfig& config) {
  std::vector<SimRow> rows;
  std::uint32_t grid_index = 0;
  for (const auto& entry : schedule.entries) {
    const DecisionProcedure test = mean_four_cut(entry.cuts);
    for (double mu : mu_values) {
      const auto est = estimate_decision_probs(
          test, {mu, schedule.sigma, entry.n}, config, grid_index++);
      const bool null_holds = mu == 0.0;
      const double analytic =
          power_of(schedule_decision_probs(schedule, entry, mu), null_holds);
      rows.push_back(make_row(entry.n, mu, est, null_holds, analytic));
    }
  }
  return rows;
}

BoundaryDemo boundary_nonconsistency_demo(const ErrorBudget& budget,
                                          std::span<const int> n_values,
                                          const SimConfig& config, double mu0,
                                          double sigma) {
  if (!(std::max(budget.alpha(), budget.beta()) < 1.0)) {
    throw DomainError("boundary demo needs max(alpha, beta) < 1");
  }
  BoundaryDemo demo;
  const double bound = std::max(budget.alpha(), budget.beta());
  const std::array<double, 2> thetas{mu0, mu0 + 0.5 * sigma};
  std::uint32_t grid_index = 0;
  for (int n : n_values) {
    const CutRule rule = tests::z_cut_rule(mu0, sigma, n, budget);
    const DecisionProcedure test = mean_cut(rule);
    for (double theta : thetas) {
      const auto est =
          estimate_decision_probs(test, {theta, sigma, n}, config, grid_index++);
      const bool null_holds = theta <= mu0;
      const double analytic = power_of(
          tests::z_decision_probs(theta, mu0, sigma, n, budget), null_holds);
      SimRow row = make_row(n, theta, est, null_holds, analytic);
      if (theta == mu0 && row.power > bound + 3.0 * row.se) demo.bound_holds = false;
      demo.rows.push_back(row);
    }
  }
  return demo;
}

std::vector<SimRow> boundary_agnostic_run(std::span<const int> n_values,
                                          const SimConfig& config,
                                          const RateFunction& rate, double mu0,
                                          double sigma) {
  std::vector<SimRow> rows;
  std::uint32_t grid_index = 0;
  for (int n : n_values) {
    const double r = rate(n);
    const ErrorBudget budget(r, r);
    const CutRule rule = tests::z_cut_rule(mu0, sigma, n, budget);
    const auto est = estimate_decision_probs(mean_cut(rule), {mu0, sigma, n},
                                             config, grid_index++);
    const double analytic =
        power_of(tests::z_decision_probs(mu0, mu0, sigma, n, budget), true);
    rows.push_back(make_row(n, mu0, est, true, analytic));
  }
  return rows;
}

std::string format_sim_csv(std::span<const SimRow> rows) {
  std::string out = "n,theta,p_accept,p_agnostic,p_reject,se\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.n, r.theta, r.probs.p_accept,
                       r.probs.p_agnostic, r.probs.p_reject, r.se);
  }
  return out;
}

}  // namespace agnostic::sim
