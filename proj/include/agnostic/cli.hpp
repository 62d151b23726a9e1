#pragma once

// Command implementations behind the `agnostic` executable. Each command
// returns plain data; formatting to CSV or a human table is separate so the
// CSV surface can be tested directly.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "agnostic/core.hpp"
#include "agnostic/sim.hpp"
#include "agnostic/tests.hpp"

namespace agnostic::cli {

/// Rectangular numeric table with named columns.
struct Dataset {
  std::vector<std::string> names;
  Eigen::MatrixXd values;
};

/// RFC-4180 style CSV with a header row. A column whose header is empty is
/// treated as row labels and dropped. Throws ParseError with the offending
/// 1-based row and column.
Dataset read_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);

struct LoadedRegression {
  tests::RegressionData data;
  /// "(Intercept)" followed by the covariate names, in design column order.
  std::vector<std::string> names;
};

/// Intercept column prepended to every non-response column.
LoadedRegression regression_from_dataset(const Dataset& dataset,
                                         const std::string& response);
LoadedRegression load_csv(const std::filesystem::path& path,
                          const std::string& response);

// regress ---------------------------------------------------------------------

struct RegressOptions {
  std::filesystem::path csv;
  std::string response;
  double alpha = 0.05;
  double beta = 0.2;
  double effect_size = 0.25;
};

struct ReportRow {
  std::string name;
  double estimate;
  double std_error;
  double t_value;
  double p_value;
  Decision decision;
};

std::vector<ReportRow> regress_report(const LoadedRegression& loaded,
                                      const RegressOptions& options);
std::vector<ReportRow> cmd_regress(const RegressOptions& options);

/// Round to `decimals` places, ties to even.
double round_half_even(double x, int decimals);

/// Header "name,estimate,std_error,t_value,p_value,decision"; numbers at three
/// decimals.
std::string format_regress_csv(const std::vector<ReportRow>& rows);
std::string format_regress_table(const std::vector<ReportRow>& rows);

// power -------------------------------------------------------------------------

struct GridSpec {
  double lo;
  double hi;
  int steps;

  /// "lo:hi:steps" with steps >= 1 points (1 means just lo).
  static GridSpec parse(const std::string& text);
  std::vector<double> points() const;
};

enum class PowerTest { Z, TOne, TTwo, Effect };

PowerTest parse_power_test(const std::string& name);

struct PowerOptions {
  PowerTest test = PowerTest::Z;
  double mu0 = 0.0;
  double sigma = 1.0;
  int n = 10;
  double alpha = 0.05;
  double beta = 0.2;
  GridSpec grid{-2.0, 2.0, 41};
  /// Effect-size curves only.
  std::filesystem::path csv;
  std::string response;
  std::string coefficient;
  double effect_size = 0.25;
};

struct PowerRow {
  double theta;
  DecisionProbs probs;
  double power;
};

/// Exact decision probabilities over the grid. For the effect-size curve the
/// grid is Cohen's d of the chosen coefficient.
std::vector<PowerRow> cmd_power(const PowerOptions& options);

/// Header "theta,p_accept,p_agnostic,p_reject,power".
std::string format_power_csv(const std::vector<PowerRow>& rows);
std::string format_power_table(const std::vector<PowerRow>& rows);

// simulate ----------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultSeed = 20180501;

struct SimulateOptions {
  std::string scenario;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::uint64_t> replicates;
  unsigned threads = 0;
};

struct SimulateResult {
  std::vector<sim::SimRow> rows;
  bool all_in_band = true;
};

/// Scenarios: size, coverage, dominance, consistency, boundary. The `se`
/// column is the standard error of the probability each scenario tracks.
SimulateResult cmd_simulate(const SimulateOptions& options);

std::string format_sim_table(const std::vector<sim::SimRow>& rows);

}  // namespace agnostic::cli
