#include "agnostic/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "agnostic/errors.hpp"
#include "agnostic/regions.hpp"

namespace agnostic::cli {

namespace {

using Record = std::vector<std::string>;

// Splits CSV text into records. Quoted fields may contain commas, doubled
// quotes and line breaks. CR before LF is dropped.
std::vector<Record> split_records(const std::string& text) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    current.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(current));
    current.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw ParseError(fmt::format("unexpected quote on line {}", line),
                           records.size() + 1, current.size() + 1);
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        field.push_back(c);
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw ParseError("unterminated quoted field", records.size() + 1,
                     current.size() + 1);
  }
  if (!field.empty() || !current.empty()) end_record();

  // Drop trailing blank lines.
  while (!records.empty() && records.back().size() == 1 &&
         records.back()[0].empty()) {
    records.pop_back();
  }
  return records;
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t column,
                  const std::string& column_name) {
  const std::string cell = trimmed(raw);
  if (cell.empty()) {
    throw ParseError(fmt::format("blank cell at row {}, column {} ('{}')", row,
                                 column, column_name),
                     row, column);
  }
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError(fmt::format("non-numeric cell '{}' at row {}, column {} ('{}')",
                                 cell, row, column, column_name),
                     row, column);
  }
  return value;
}

std::string fixed3(double x) {
  double r = round_half_even(x, 3);
  if (r == 0.0) r = 0.0;  // no "-0.000"
  return fmt::format("{:.3f}", r);
}

std::string number(double x) { return fmt::format("{}", x); }

}  // namespace

// Datasets ----------------------------------------------------------------------

Dataset read_dataset(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  auto records = split_records(text);
  if (records.empty()) throw ParseError("missing header row", 1, 0);

  const Record& header = records.front();
  std::vector<std::size_t> kept;
  Dataset ds;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trimmed(header[c]);
    if (name.empty()) continue;  // row-label column
    if (std::find(ds.names.begin(), ds.names.end(), name) != ds.names.end()) {
      throw ParseError(fmt::format("duplicate column '{}'", name), 1, c + 1);
    }
    kept.push_back(c);
    ds.names.push_back(name);
  }
  if (kept.empty()) throw ParseError("header has no named columns", 1, 0);

  const std::size_t n_rows = records.size() - 1;
  ds.values.resize(static_cast<Eigen::Index>(n_rows),
                   static_cast<Eigen::Index>(kept.size()));
  for (std::size_t r = 0; r < n_rows; ++r) {
    const Record& rec = records[r + 1];
    const std::size_t file_row = r + 2;
    if (rec.size() != header.size()) {
      throw ParseError(fmt::format("row {} has {} fields, header has {}", file_row,
                                   rec.size(), header.size()),
                       file_row, 0);
    }
    for (std::size_t k = 0; k < kept.size(); ++k) {
      ds.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
          parse_cell(rec[kept[k]], file_row, kept[k] + 1, ds.names[k]);
    }
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(fmt::format("cannot open '{}'", path.string()), 0, 0);
  }
  return read_dataset(in);
}

LoadedRegression regression_from_dataset(const Dataset& dataset,
                                         const std::string& response) {
  const auto it = std::find(dataset.names.begin(), dataset.names.end(), response);
  if (it == dataset.names.end()) {
    throw ParseError(fmt::format("response column '{}' not found", response), 1, 0);
  }
  const auto n = dataset.values.rows();
  if (n < 2) throw ParseError("need at least two data rows", 0, 0);
  const auto response_col = static_cast<Eigen::Index>(it - dataset.names.begin());
  const auto m = dataset.values.cols();

  Eigen::MatrixXd design(n, m);
  design.col(0).setOnes();
  std::vector<std::string> names{"(Intercept)"};
  Eigen::Index out = 1;
  for (Eigen::Index c = 0; c < m; ++c) {
    if (c == response_col) continue;
    design.col(out++) = dataset.values.col(c);
    names.push_back(dataset.names[static_cast<std::size_t>(c)]);
  }
  return {tests::RegressionData(std::move(design), dataset.values.col(response_col)),
          std::move(names)};
}

LoadedRegression load_csv(const std::filesystem::path& path,
                          const std::string& response) {
  return regression_from_dataset(load_dataset(path), response);
}

// regress -----------------------------------------------------------------------

std::vector<ReportRow> regress_report(const LoadedRegression& loaded,
                                      const RegressOptions& options) {
  if (!(options.effect_size >= 0.0)) {
    throw DomainError("effect size must be non-negative");
  }
  const ErrorBudget budget(options.alpha, options.beta);
  const tests::RegressionFit fit = tests::fit_regression(loaded.data);
  const Eigen::VectorXd se = fit.std_errors();

  std::vector<ReportRow> rows;
  for (std::size_t j = 0; j < loaded.names.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    Decision decision;
    double p_value;
    if (options.effect_size > 0.0) {
      const auto report =
          tests::effect_size_regression_test(fit, j, options.effect_size, budget);
      decision = report.decision;
      p_value = *report.p_value;
    } else {
      Eigen::VectorXd k = Eigen::VectorXd::Zero(fit.beta_hat.size());
      k(jj) = 1.0;
      const auto report = tests::regression_contrast_test(
          fit, k, budget, tests::HypothesisSide::equal(0.0));
      decision = report.decision;
      p_value = *report.p_value;
    }
    rows.push_back({loaded.names[j], fit.beta_hat(jj), se(jj),
                    fit.beta_hat(jj) / se(jj), p_value, decision});
  }
  return rows;
}

std::vector<ReportRow> cmd_regress(const RegressOptions& options) {
  return regress_report(load_csv(options.csv, options.response), options);
}

double round_half_even(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // nearbyint honours the default round-to-nearest-even mode.
  return std::nearbyint(x * scale) / scale;
}

std::string format_regress_csv(const std::vector<ReportRow>& rows) {
  std::string out = "name,estimate,std_error,t_value,p_value,decision\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.name, fixed3(r.estimate),
                       fixed3(r.std_error), fixed3(r.t_value), fixed3(r.p_value),
                       to_string(r.decision));
  }
  return out;
}

std::string format_regress_table(const std::vector<ReportRow>& rows) {
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::string out = fmt::format("{:>{}}  {:>9}  {:>10}  {:>8}  {:>8}  {}\n", "",
                                width, "Estimate", "Std. Error", "t-value",
                                "p-value", "Decision");
  for (const auto& r : rows) {
    out += fmt::format("{:>{}}  {:>9}  {:>10}  {:>8}  {:>8}  {}\n", r.name, width,
                       fixed3(r.estimate), fixed3(r.std_error), fixed3(r.t_value),
                       fixed3(r.p_value), display_name(r.decision));
  }
  return out;
}

// power -------------------------------------------------------------------------

GridSpec GridSpec::parse(const std::string& text) {
  std::stringstream ss(text);
  std::string lo, hi, steps;
  if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') ||
      !std::getline(ss, steps) || ss.rdbuf()->in_avail() != 0) {
    throw std::invalid_argument("grid must look like lo:hi:steps");
  }
  GridSpec g{};
  try {
    std::size_t used = 0;
    g.lo = std::stod(lo, &used);
    if (used != lo.size()) throw std::invalid_argument("lo");
    g.hi = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument("hi");
    g.steps = std::stoi(steps, &used);
    if (used != steps.size()) throw std::invalid_argument("steps");
  } catch (const std::exception&) {
    throw std::invalid_argument("grid must look like lo:hi:steps");
  }
  if (g.steps < 1 || !(g.lo <= g.hi) || !std::isfinite(g.lo) || !std::isfinite(g.hi)) {
    throw std::invalid_argument("grid needs lo <= hi and steps >= 1");
  }
  return g;
}

std::vector<double> GridSpec::points() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) return {lo};
  for (int i = 0; i < steps; ++i) {
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / (steps - 1));
  }
  return out;
}

PowerTest parse_power_test(const std::string& name) {
  if (name == "z") return PowerTest::Z;
  if (name == "t_one") return PowerTest::TOne;
  if (name == "t_two") return PowerTest::TTwo;
  if (name == "effect") return PowerTest::Effect;
  throw std::invalid_argument("unknown test '" + name +
                              "' (expected z, t_one, t_two or effect)");
}

std::vector<PowerRow> cmd_power(const PowerOptions& o) {
  const ErrorBudget budget(o.alpha, o.beta);
  std::vector<PowerRow> rows;
  const auto grid = o.grid.points();

  if (o.test == PowerTest::Effect) {
    const auto loaded = load_csv(o.csv, o.response);
    const auto it =
        std::find(loaded.names.begin(), loaded.names.end(), o.coefficient);
    if (it == loaded.names.end()) {
      throw std::invalid_argument("unknown coefficient '" + o.coefficient + "'");
    }
    const auto j = static_cast<std::size_t>(it - loaded.names.begin());
    const auto fit = tests::fit_regression(loaded.data);
    for (double d : grid) {
      const auto probs =
          tests::effect_size_decision_probs(fit, j, o.effect_size, budget, d);
      rows.push_back({d, probs, sim::power_of(probs, d == 0.0)});
    }
    return rows;
  }

  for (double theta : grid) {
    DecisionProbs probs;
    bool null_holds = false;
    switch (o.test) {
      case PowerTest::Z:
        probs = tests::z_decision_probs(theta, o.mu0, o.sigma, o.n, budget);
        null_holds = theta <= o.mu0;
        break;
      case PowerTest::TOne:
        probs = tests::t_decision_probs(theta, o.sigma, o.n,
                                        tests::HypothesisSide::less_equal(o.mu0),
                                        budget);
        null_holds = theta <= o.mu0;
        break;
      case PowerTest::TTwo:
        probs = tests::t_decision_probs(theta, o.sigma, o.n,
                                        tests::HypothesisSide::equal(o.mu0), budget);
        null_holds = theta == o.mu0;
        break;
      case PowerTest::Effect:
        break;
    }
    rows.push_back({theta, probs, sim::power_of(probs, null_holds)});
  }
  return rows;
}

std::string format_power_csv(const std::vector<PowerRow>& rows) {
  std::string out = "theta,p_accept,p_agnostic,p_reject,power\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", number(r.theta), number(r.probs.p_accept),
                       number(r.probs.p_agnostic), number(r.probs.p_reject),
                       number(r.power));
  }
  return out;
}

std::string format_power_table(const std::vector<PowerRow>& rows) {
  std::string out = fmt::format("{:>10}  {:>10}  {:>10}  {:>10}  {:>10}\n", "theta",
                                "accept", "agnostic", "reject", "power");
  for (const auto& r : rows) {
    out += fmt::format("{:>10.4f}  {:>10.6f}  {:>10.6f}  {:>10.6f}  {:>10.6f}\n",
                       r.theta, r.probs.p_accept, r.probs.p_agnostic,
                       r.probs.p_reject, r.power);
  }
  return out;
}

// simulate ----------------------------------------------------------------------

namespace {

sim::SimConfig config_for(const SimulateOptions& o, std::uint64_t default_reps) {
  sim::SimConfig config;
  config.replicates = o.replicates.value_or(default_reps);
  config.seed = o.seed;
  config.threads = o.threads;
  return config;
}

double sample_mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

SimulateResult run_size(const SimulateOptions& o) {
  constexpr int n = 10;
  const ErrorBudget budget(0.05, 0.05);
  const CutRule rule = tests::z_cut_rule(0.0, 1.0, n, budget);
  const auto config = config_for(o, sim::kDefaultSizeReplicates);
  const auto est = sim::estimate_decision_probs(
      [rule](std::span<const double> x, random::UniformStream&) {
        return cut_decision(sample_mean(x), rule);
      },
      {0.0, 1.0, n}, config);
  const double band = 3.0 * std::sqrt(budget.alpha() * (1.0 - budget.alpha()) /
                                       static_cast<double>(config.replicates));
  SimulateResult result;
  result.rows.push_back({n, 0.0, est.probs, est.probs.p_reject, est.se_reject,
                         budget.alpha()});
  result.all_in_band = std::fabs(est.probs.p_reject - budget.alpha()) <= band;
  return result;
}

SimulateResult run_coverage(const SimulateOptions& o) {
  constexpr int n = 10;
  constexpr double alpha = 0.05;
  const auto config = config_for(o, sim::kDefaultSizeReplicates);
  // Against H0: mu = true mean the region test can only be agnostic (mean
  // covered) or reject (mean missed), so p_agnostic is the coverage.
  const auto truth = regions::ScalarHypothesis::equal(0.0);
  const auto est = sim::estimate_decision_probs(
      [&truth](std::span<const double> x, random::UniformStream&) {
        const tests::Sample sample(std::vector<double>(x.begin(), x.end()));
        return regions::region_decision(regions::z_region(sample, 1.0, alpha), truth);
      },
      {0.0, 1.0, n}, config);
  const double target = 1.0 - 2.0 * alpha;
  const double band = 3.0 * std::sqrt(target * (1.0 - target) /
                                       static_cast<double>(config.replicates));
  SimulateResult result;
  result.rows.push_back({n, 0.0, est.probs, est.probs.p_agnostic, est.se_agnostic,
                         target});
  result.all_in_band = std::fabs(est.probs.p_agnostic - target) <= band;
  return result;
}

SimulateResult run_dominance(const SimulateOptions& o) {
  constexpr int n = 10;
  const ErrorBudget budget(0.05, 0.05);
  const CutRule rule = tests::z_cut_rule(0.0, 1.0, n, budget);
  auto config = config_for(o, sim::kDefaultCurveReplicates);
  const double half_width = 3.0 / std::sqrt(static_cast<double>(n));
  config.grid = GridSpec{-half_width, half_width, 25}.points();
  const auto h0 = tests::HypothesisSide::less_equal(0.0);
  const sim::DecisionProcedure test =
      [rule](std::span<const double> x, random::UniformStream&) {
        return cut_decision(sample_mean(x), rule);
      };
  const auto report = sim::dominance_check(test, budget, h0, 1.0, n, config);
  SimulateResult result;
  result.all_in_band = report.holds;
  for (std::size_t g = 0; g < report.rows.size(); ++g) {
    const auto& row = report.rows[g];
    const auto exact = tests::z_decision_probs(row.theta, 0.0, 1.0, n, budget);
    // Re-derive the full decision split for the table.
    const auto est = sim::estimate_decision_probs(test, {row.theta, 1.0, n}, config,
                                                  static_cast<std::uint32_t>(g));
    result.rows.push_back({n, row.theta, est.probs, row.power, row.se,
                           sim::power_of(exact, row.null_holds)});
  }
  return result;
}

SimulateResult run_consistency(const SimulateOptions& o) {
  const std::vector<int> ns{25, 100, 400, 1600, 6400};
  const std::vector<double> mus{0.0, 1.0};
  const auto schedule = sim::build_consistency_schedule(1.0, ns);
  const auto config = config_for(o, sim::kDefaultCurveReplicates);
  SimulateResult result;
  result.rows = sim::consistency_run(schedule, mus, config);
  for (std::size_t m = 0; m < mus.size(); ++m) {
    const sim::SimRow* previous = nullptr;
    for (std::size_t i = m; i < result.rows.size(); i += mus.size()) {
      const auto& row = result.rows[i];
      if (previous != nullptr) {
        const double noise =
            3.0 * std::sqrt(previous->se * previous->se + row.se * row.se);
        if (row.power < previous->power - noise) result.all_in_band = false;
      }
      previous = &row;
    }
    if (previous == nullptr || previous->power < 0.99) result.all_in_band = false;
  }
  return result;
}

SimulateResult run_boundary(const SimulateOptions& o) {
  const std::vector<int> ns{10, 40, 160, 640, 2560};
  const auto config = config_for(o, sim::kDefaultCurveReplicates);
  const auto demo =
      sim::boundary_nonconsistency_demo(ErrorBudget(0.05, 0.05), ns, config);
  return {demo.rows, demo.bound_holds};
}

}  // namespace

SimulateResult cmd_simulate(const SimulateOptions& options) {
  if (options.scenario == "size") return run_size(options);
  if (options.scenario == "coverage") return run_coverage(options);
  if (options.scenario == "dominance") return run_dominance(options);
  if (options.scenario == "consistency") return run_consistency(options);
  if (options.scenario == "boundary") return run_boundary(options);
  throw std::invalid_argument(
      "unknown scenario '" + options.scenario +
      "' (expected size, coverage, dominance, consistency or boundary)");
}

std::string format_sim_table(const std::vector<sim::SimRow>& rows) {
  std::string out = fmt::format("{:>6}  {:>9}  {:>9}  {:>9}  {:>9}  {:>9}  {:>9}\n",
                                "n", "theta", "accept", "agnostic", "reject",
                                "tracked", "se");
  for (const auto& r : rows) {
    out += fmt::format(
        "{:>6}  {:>9.4f}  {:>9.5f}  {:>9.5f}  {:>9.5f}  {:>9.5f}  {:>9.5f}\n", r.n,
        r.theta, r.probs.p_accept, r.probs.p_agnostic, r.probs.p_reject, r.power,
        r.se);
  }
  return out;
}

}  // namespace agnostic::cli
