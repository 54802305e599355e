#include <CLI11.hpp>

#include "edcrowd_cli/commands.hpp"

namespace edcrowd::cli {

void bind_options(CLI::App& app, RunConfig& cfg) {
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Key-value config file; flags override its entries");

  app.add_option("--edor-csv", cfg.edor_csv, "Hourly EDOR file (timestamp,section,edor)")->group("Inputs");
  app.add_option("--weather-csv", cfg.weather_csv, "Daily weather file")->group("Inputs");
  app.add_option("--holidays-csv", cfg.holidays_csv, "Holiday file (date,name)")->group("Inputs");
  app.add_option("--output-dir", cfg.output_dir, "Directory for all outputs")->group("Inputs");
  app.add_option("--model", cfg.model_path, "Model JSON (default <output-dir>/model.json)")->group("Inputs");

  app.add_option("--crowding-threshold", cfg.crowding.edor_threshold, "EDOR level counted as crowded")
      ->group("Labels");
  app.add_option("--crowding-min-hours", cfg.crowding.min_hours, "Crowded hours that make a crowded day")
      ->group("Labels");
  app.add_option("--history-hours", cfg.history_hours, "Hourly history per section")->group("Features");
  app.add_option("--weekly-lags", cfg.weekly_lags, "Same-hour lags at multiples of 168 h")->group("Features");

  auto& t = cfg.train;
  app.add_option("--num-trees", t.num_trees)->group("Model");
  app.add_option("--num-leaves", t.num_leaves)->group("Model");
  app.add_option("--learning-rate", t.learning_rate)->group("Model");
  app.add_option("--max-bins", t.max_bins)->group("Model");
  app.add_option("--min-data-in-leaf", t.min_data_in_leaf)->group("Model");
  app.add_option("--min-sum-hessian", t.min_sum_hessian_in_leaf)->group("Model");
  app.add_option("--lambda-l2", t.lambda_l2)->group("Model");
  app.add_option("--goss-top-rate", t.goss_top_rate, "1 disables GOSS")->group("Model");
  app.add_option("--goss-other-rate", t.goss_other_rate)->group("Model");
  app.add_option("--positive-weight", t.positive_weight, "Loss weight of crowded rows")->group("Model");
  app.add_option("--train-seed", t.seed)->group("Model");

  app.add_option("--train-start", cfg.train_start)->group("Split");
  app.add_option("--train-end", cfg.train_end)->group("Split");
  app.add_option("--test-start", cfg.test_start)->group("Split");
  app.add_option("--test-end", cfg.test_end)->group("Split");
  app.add_option("--retrain-every", cfg.retrain_every, "Days between refits")->group("Split");

  app.add_option("--bootstrap", cfg.bootstrap, "Bootstrap resamples for AUROC/PRAUC intervals")
      ->group("Report");
  app.add_option("--bootstrap-seed", cfg.bootstrap_seed)->group("Report");
  app.add_option("--threshold", cfg.decision_threshold, "Probability at or above which a day is flagged")
      ->group("Report");
  app.add_option("--report-origin", cfg.report_origin, "Origin for outcomes and calendar maps")
      ->check(CLI::Range(8, 13))
      ->group("Report");
  app.add_option("--metrics-decimals", cfg.metrics_decimals)->check(CLI::Range(0, 17))->group("Report");
  app.add_option("--color-tp", cfg.colors.true_positive)->group("Report");
  app.add_option("--color-fp", cfg.colors.false_positive)->group("Report");
  app.add_option("--color-tn", cfg.colors.true_negative)->group("Report");
  app.add_option("--color-fn", cfg.colors.false_negative)->group("Report");
  app.add_option("--color-missing", cfg.colors.missing)->group("Report");
  app.add_option("--explain-origin", cfg.explain_origin, "Restrict explanations to one origin (0 = all)")
      ->group("Report");

  app.add_option("--synth-days", cfg.synth_days)->group("Synthetic data");
  app.add_option("--synth-seed", cfg.synth_seed)->group("Synthetic data");
  app.add_option("--synth-start", cfg.synth_start)->group("Synthetic data");
  app.add_option("--weather-coupling", cfg.synth_weather_coupling,
                 "EDOR response to temperature anomalies")
      ->group("Synthetic data");

  app.add_option("--threads", cfg.threads, "Worker thread cap")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", cfg.quiet, "Suppress progress messages");
}

}  // namespace edcrowd::cli
