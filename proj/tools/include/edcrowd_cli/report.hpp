#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "edcrowd/backtest.hpp"
#include "edcrowd/explain.hpp"
#include "edcrowd/synthgen.hpp"

namespace edcrowd::cli {

// Table-2 layout: one row per target section and origin.
inline const std::vector<std::string> kMetricsHeader = {"Target", "Origin", "F1",  "TPR",
                                                        "TNR",    "PPV",    "NPV", "FPR",
                                                        "FNR",    "ACC",    "AUROC", "PRAUC"};

// Point estimates with `decimals` digits; AUROC and PRAUC cells read
// "x (lo-hi)". Undefined values are written as NA.
void write_metrics_csv(const std::filesystem::path& path, const EvalReport& report, int decimals = 2);
void write_predictions_csv(const std::filesystem::path& path, const std::vector<PredictionRecord>& records);
void write_outcomes_csv(const std::filesystem::path& path, const EvalReport& report);
// Threshold sweep per section and origin.
void write_roc_pr_points(const std::filesystem::path& path, const std::vector<PredictionRecord>& records);
void write_fits_csv(const std::filesystem::path& path, const std::vector<FitInfo>& fits);
void write_calibration_csv(const std::filesystem::path& path, const CalibrationReport& report);
void write_shap_groups_csv(const std::filesystem::path& path, const std::vector<explain::GroupScore>& scores);

struct CalendarColors {
  std::string true_positive = "#1a7f37";
  std::string false_positive = "#a50f15";
  std::string true_negative = "#a1d99b";
  std::string false_negative = "#fcae91";
  std::string missing = "#e0e0e0";
};

// Year rows of week columns (Monday on top); one rect per day of `days`,
// colored by that day's outcome for `section`.
std::string render_calendar_svg(Section section, const DateRange& days,
                                const std::vector<DayOutcome>& outcomes, int origin,
                                const CalendarColors& colors = {});

}  // namespace edcrowd::cli
