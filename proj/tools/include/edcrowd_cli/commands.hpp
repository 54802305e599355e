#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "edcrowd/backtest.hpp"
#include "edcrowd/gbdt.hpp"
#include "edcrowd/synthgen.hpp"
#include "edcrowd_cli/report.hpp"

namespace CLI {
class App;
}

namespace edcrowd::cli {

struct RunConfig {
  std::filesystem::path edor_csv = "edor.csv";
  std::filesystem::path weather_csv = "weather.csv";
  std::filesystem::path holidays_csv = "holidays.csv";
  std::filesystem::path output_dir = "out";
  std::filesystem::path model_path;  // empty: <output_dir>/model.json

  CrowdingConfig crowding;
  int history_hours = 168;
  int weekly_lags = 8;
  gbdt::TrainConfig train;

  std::string train_start = "2018-01-01";
  std::string train_end = "2018-12-31";
  std::string test_start = "2019-01-01";
  std::string test_end = "2020-03-01";
  int retrain_every = 1;

  std::size_t bootstrap = 200;
  std::uint64_t bootstrap_seed = 0;
  double decision_threshold = 0.5;
  int report_origin = 11;
  int metrics_decimals = 2;
  CalendarColors colors;

  int explain_origin = 0;  // 0: all origins

  int synth_days = 791;
  std::uint64_t synth_seed = 2018;
  std::string synth_start = "2018-01-01";
  double synth_weather_coupling = 0.0;

  int threads = 1;
  bool quiet = false;
  // Resolved settings written beside the outputs; filled by the option parser.
  std::string resolved_config;

  FeatureLayout layout() const;
  SplitPlan split_plan() const;              // throws std::invalid_argument
  std::filesystem::path resolved_model_path() const;
  SynthConfig synth_config() const;
};

// Registers every RunConfig field as a long option (usable as a config-file
// key) on `app`, plus --config.
void bind_options(CLI::App& app, RunConfig& cfg);

using Logger = std::function<void(const std::string&)>;

// Each writes its files into cfg.output_dir along with run_config.ini.
CalibrationReport cmd_synth(const RunConfig& cfg, const Logger& log = {});
EvalReport cmd_backtest(const RunConfig& cfg, const Logger& log = {});
std::vector<explain::GroupScore> cmd_explain(const RunConfig& cfg, const Logger& log = {});

// Loads the three input files named by cfg.
Dataset load_dataset(const RunConfig& cfg, const Logger& log = {});

}  // namespace edcrowd::cli
