#include "edcrowd_cli/commands.hpp"

#include <stdexcept>

#include "edcrowd/error.hpp"
#include "edcrowd/explain.hpp"
#include "edcrowd_cli/csv.hpp"
#include "edcrowd_cli/ingest.hpp"

namespace edcrowd::cli {
namespace {

Date config_date(const std::string& text, const char* key) {
  const auto d = parse_date(text);
  if (!d) throw std::invalid_argument(std::string(key) + ": bad date '" + text + "'");
  return *d;
}

void emit(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

void prepare_output(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  if (!cfg.resolved_config.empty()) {
    write_text_file(cfg.output_dir / "run_config.ini", cfg.resolved_config);
  }
}

gbdt::TrainConfig train_config(const RunConfig& cfg) {
  gbdt::TrainConfig t = cfg.train;
  t.num_threads = cfg.threads;
  return t;
}

}  // namespace

FeatureLayout RunConfig::layout() const {
  if (history_hours < 1 || weekly_lags < 0) {
    throw std::invalid_argument("history_hours must be >= 1 and weekly_lags >= 0");
  }
  return FeatureLayout(static_cast<std::size_t>(history_hours), static_cast<std::size_t>(weekly_lags));
}

SplitPlan RunConfig::split_plan() const {
  SplitPlan plan{{config_date(train_start, "train-start"), config_date(train_end, "train-end")},
                 {config_date(test_start, "test-start"), config_date(test_end, "test-end")},
                 retrain_every};
  plan.validate();
  return plan;
}

std::filesystem::path RunConfig::resolved_model_path() const {
  return model_path.empty() ? output_dir / "model.json" : model_path;
}

SynthConfig RunConfig::synth_config() const {
  SynthConfig s = SynthConfig::defaults();
  s.n_days = synth_days;
  s.seed = synth_seed;
  s.start = config_date(synth_start, "synth-start");
  s.weather.edor_coupling = synth_weather_coupling;
  return s;
}

Dataset load_dataset(const RunConfig& cfg, const Logger& log) {
  cfg.crowding.validate();
  auto series = ingest_edor(cfg.edor_csv);
  auto weather = ingest_weather(cfg.weather_csv);
  auto holidays = ingest_holidays(cfg.holidays_csv);
  emit(log, "loaded " + std::to_string(series[0].size()) + " hours of EDOR, " +
                std::to_string(weather.size()) + " weather days, " +
                std::to_string(holidays.dates().size()) + " holidays");
  return Dataset::from_series(std::move(series), std::move(weather), std::move(holidays),
                              cfg.crowding, cfg.layout());
}

CalibrationReport cmd_synth(const RunConfig& cfg, const Logger& log) {
  const SynthConfig sc = cfg.synth_config();
  const SynthData data = generate(sc);
  prepare_output(cfg);
  write_edor(cfg.output_dir / "edor.csv", data.series);
  write_weather(cfg.output_dir / "weather.csv", data.weather);
  write_holidays(cfg.output_dir / "holidays.csv", data.holiday_names);
  const auto report = calibration_report(data.series, cfg.crowding);
  write_calibration_csv(cfg.output_dir / "calibration_report.csv", report);
  for (const auto& s : report.sections) {
    emit(log, std::string(section_code(s.section)) + ": prevalence " + format_fixed(s.prevalence, 3) +
                  ", peak hour " + std::to_string(s.peak_hour) +
                  (s.passed() ? "" : "  [calibration band failed]"));
  }
  return report;
}

EvalReport cmd_backtest(const RunConfig& cfg, const Logger& log) {
  const SplitPlan plan = cfg.split_plan();
  const Dataset data = load_dataset(cfg, log);
  BacktestHooks hooks;
  hooks.log = log;
  hooks.on_fit = [&](const FitInfo& f) {
    emit(log, "fit for " + format_date(f.test_day) + " on " + std::to_string(f.training_rows) + " rows");
  };
  const BacktestResult result = run_backtest(data, plan, train_config(cfg), hooks);
  const EvalReport report = assemble_report(result.records, cfg.bootstrap, cfg.bootstrap_seed,
                                            cfg.report_origin, cfg.decision_threshold, cfg.threads);
  prepare_output(cfg);
  const auto& out = cfg.output_dir;
  write_metrics_csv(out / "metrics.csv", report, cfg.metrics_decimals);
  write_predictions_csv(out / "predictions.csv", result.records);
  write_outcomes_csv(out / ("outcomes_origin" + std::to_string(cfg.report_origin) + ".csv"), report);
  write_roc_pr_points(out / "roc_pr_points.csv", result.records);
  write_fits_csv(out / "fits.csv", result.fits);
  for (Section s : kTargetSections) {
    write_text_file(out / ("calendar_map_" + std::string(section_code(s)) + ".svg"),
                    render_calendar_svg(s, plan.test, report.outcomes, cfg.report_origin, cfg.colors));
  }
  gbdt::save_model(result.last_model, cfg.resolved_model_path().string());
  emit(log, "wrote reports to " + out.string());
  return report;
}

std::vector<explain::GroupScore> cmd_explain(const RunConfig& cfg, const Logger& log) {
  const SplitPlan plan = cfg.split_plan();
  if (cfg.explain_origin != 0 &&
      std::find(kForecastOrigins.begin(), kForecastOrigins.end(), cfg.explain_origin) ==
          kForecastOrigins.end()) {
    throw std::invalid_argument("explain-origin must be 0 (all) or one of 8..13");
  }
  const gbdt::Ensemble model = gbdt::load_model(cfg.resolved_model_path().string());
  const Dataset data = load_dataset(cfg, log);
  if (model.num_features() != data.layout.model_width()) {
    throw DataError("model/layout mismatch: model has " + std::to_string(model.num_features()) +
                    " features, layout has " + std::to_string(data.layout.model_width()));
  }
  const auto first = first_buildable_date(data.series, data.layout);
  std::vector<DayMatrix> matrices;
  for (Date d = plan.test.first; d <= plan.test.last; d += std::chrono::days{1}) {
    const auto labels = data.labels.find(d);
    if (!first || d < *first || labels == data.labels.end()) continue;
    matrices.push_back(build_day_matrix(d, data.series, labels->second, data.weather,
                                        data.holidays, data.layout, data.crowding));
  }
  if (matrices.empty()) throw DataError("no explainable days in the test range");
  const TrainingRows rows =
      stack_training_rows(matrices, std::span<const Section>(kTargetSections), data.layout);
  std::vector<double> selected;
  std::size_t n = 0;
  for (std::size_t i = 0; i < rows.meta.size(); ++i) {
    if (!rows.eval_eligible[i]) continue;
    if (cfg.explain_origin != 0 && rows.meta[i].origin_hour != cfg.explain_origin) continue;
    const auto r = rows.features.row(i);
    selected.insert(selected.end(), r.begin(), r.end());
    ++n;
  }
  if (n == 0) throw DataError("no rows match the origin filter");
  const MatrixView view(selected, n, rows.features.cols);
  const auto attributions = explain::tree_shap(model, view, cfg.threads);
  const auto scores = explain::group_importance(attributions, data.layout);
  prepare_output(cfg);
  write_shap_groups_csv(cfg.output_dir / "shap_groups.csv", scores);
  emit(log, "explained " + std::to_string(n) + " rows; top group: " + scores.front().group);
  return scores;
}

}  // namespace edcrowd::cli
