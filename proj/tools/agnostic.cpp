// agnostic: three-decision hypothesis tests from the command line.
//
//   agnostic regress swiss.csv --response Infant.Mortality
//   agnostic power --test t_two --n 10 --alpha 0.05 --beta 0.05 --grid -2:2:41
//   agnostic simulate consistency --seed 7

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "agnostic/cli.hpp"
#include "agnostic/errors.hpp"
#include "agnostic/sim.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kOutOfBand = 1 };

void add_budget(CLI::App* cmd, double& alpha, double& beta) {
  cmd->add_option("--alpha", alpha, "type I error bound")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--beta", beta, "type II error bound")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
}

void add_format(CLI::App* cmd, std::string& format) {
  cmd->add_option("--format", format, "output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "table"}));
}

}  // namespace

int main(int argc, char** argv) {
  using namespace agnostic;

  CLI::App app{"Agnostic (accept / agnostic / reject) hypothesis tests"};
  app.require_subcommand(1);

  std::string format = "csv";

  cli::RegressOptions regress;
  auto* regress_cmd = app.add_subcommand("regress", "linear regression report");
  regress_cmd->add_option("csv", regress.csv, "input CSV with a header row")
      ->required();
  regress_cmd->add_option("--response", regress.response, "response column")
      ->required();
  add_budget(regress_cmd, regress.alpha, regress.beta);
  regress_cmd
      ->add_option("--effect-size", regress.effect_size,
                   "smallest relevant Cohen's d; 0 uses the plain contrast test")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  add_format(regress_cmd, format);

  cli::PowerOptions power;
  std::string test_name = "z";
  std::string grid_text = "-2:2:41";
  auto* power_cmd = app.add_subcommand("power", "exact decision probabilities");
  power_cmd->add_option("--test", test_name, "z, t_one, t_two or effect")
      ->capture_default_str();
  power_cmd->add_option("--mu0", power.mu0)->capture_default_str();
  power_cmd->add_option("--sigma", power.sigma)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  power_cmd->add_option("--n", power.n)->capture_default_str()->check(
      CLI::Range(2, 1 << 30));
  add_budget(power_cmd, power.alpha, power.beta);
  power_cmd->add_option("--grid", grid_text, "lo:hi:steps")->capture_default_str();
  power_cmd->add_option("csv", power.csv, "input CSV (effect test)");
  power_cmd->add_option("--response", power.response, "response column (effect test)");
  power_cmd->add_option("--coef", power.coefficient, "coefficient name (effect test)");
  power_cmd->add_option("--effect-size", power.effect_size)
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  add_format(power_cmd, format);

  cli::SimulateOptions simulate;
  std::uint64_t reps = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo checks");
  sim_cmd
      ->add_option("scenario", simulate.scenario,
                   "size, coverage, dominance, consistency or boundary")
      ->required();
  sim_cmd->add_option("--seed", simulate.seed)->capture_default_str();
  sim_cmd->add_option("--reps", reps, "replicates (default depends on scenario)")
      ->check(CLI::Range(std::uint64_t{100}, std::uint64_t{1'000'000'000}));
  sim_cmd->add_option("--threads", simulate.threads, "0 = all cores")
      ->capture_default_str();
  add_format(sim_cmd, format);

  CLI11_PARSE(app, argc, argv);

  const bool csv = format == "csv";
  try {
    if (*regress_cmd) {
      const auto rows = cli::cmd_regress(regress);
      std::cout << (csv ? cli::format_regress_csv(rows) : cli::format_regress_table(rows));
      return kOk;
    }
    if (*power_cmd) {
      power.test = cli::parse_power_test(test_name);
      power.grid = cli::GridSpec::parse(grid_text);
      if (power.test == cli::PowerTest::Effect &&
          (power.csv.empty() || power.response.empty() || power.coefficient.empty())) {
        std::cerr << "error: --test effect needs a csv, --response and --coef\n";
        return kUsage;
      }
      const auto rows = cli::cmd_power(power);
      std::cout << (csv ? cli::format_power_csv(rows) : cli::format_power_table(rows));
      return kOk;
    }
    if (*sim_cmd) {
      if (sim_cmd->count("--reps") > 0) simulate.replicates = reps;
      const auto result = cli::cmd_simulate(simulate);
      std::cout << (csv ? sim::format_sim_csv(result.rows)
                        : cli::format_sim_table(result.rows));
      if (!result.all_in_band) {
        std::cerr << "simulate: some rows fell outside the Monte Carlo band\n";
        return kOutOfBand;
      }
      return kOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const DegenerateData& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const SingularMatrix& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
