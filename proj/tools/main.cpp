#include <CLI11.hpp>
#include <iostream>

#include "edcrowd/error.hpp"
#include "edcrowd_cli/commands.hpp"
#include "edcrowd_cli/csv.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

}  // namespace

int main(int argc, char** argv) {
  using namespace edcrowd::cli;
  RunConfig cfg;
  CLI::App app{"Emergency department crowding forecasts: synthetic data, backtests, explanations"};
  app.name("edcrowd");
  bind_options(app, cfg);
  app.fallthrough();
  auto* synth = app.add_subcommand("synth", "Generate a calibrated synthetic dataset");
  auto* backtest = app.add_subcommand("backtest", "Expanding-window backtest and reports");
  auto* explain = app.add_subcommand("explain", "Group-level Shapley importance of a saved model");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  cfg.resolved_config = "# format_version=" + std::to_string(kFormatVersion) + "\n" +
                        app.config_to_str(true, false);
  const Logger log = [&](const std::string& msg) {
    if (!cfg.quiet) std::cerr << msg << '\n';
  };

  try {
    if (synth->parsed()) {
      const auto report = cmd_synth(cfg, log);
      if (!report.passed()) log("warning: calibration bands failed; see calibration_report.csv");
    } else if (backtest->parsed()) {
      cmd_backtest(cfg, log);
    } else if (explain->parsed()) {
      cmd_explain(cfg, log);
    }
  } catch (const edcrowd::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
