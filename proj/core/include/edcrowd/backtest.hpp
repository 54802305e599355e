#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edcrowd/features.hpp"
#include "edcrowd/gbdt.hpp"
#include "edcrowd/metrics.hpp"

namespace edcrowd {

// Inclusive calendar range.
struct DateRange {
  Date first;
  Date last;

  bool empty() const { return last < first; }
  bool contains(Date d) const { return d >= first && d <= last; }
  std::size_t days() const { return empty() ? 0 : static_cast<std::size_t>((last - first).count() + 1); }
};

struct SplitPlan {
  DateRange initial_train;
  DateRange test;
  int retrain_every = 1;  // days between refits

  void validate() const;  // throws std::invalid_argument
};

// All inputs of a run. `labels` is derived from `series` by default but held
// separately so it can be inspected or overridden.
struct Dataset {
  SectionSeries series;
  DayLabels labels;
  WeatherTable weather;
  HolidayCalendar holidays;
  CrowdingConfig crowding;
  FeatureLayout layout = FeatureLayout::canonical();

  static Dataset from_series(SectionSeries series, WeatherTable weather, HolidayCalendar holidays,
                             CrowdingConfig crowding = {},
                             FeatureLayout layout = FeatureLayout::canonical());
};

struct FitInfo {
  Date test_day;               // first day scored by this model
  std::size_t scored_days = 0;
  std::size_t training_rows = 0;
  Date last_training_day;
};

struct BacktestResult {
  std::vector<PredictionRecord> records;  // ordered by date, section, origin
  std::vector<FitInfo> fits;
  std::vector<Date> dropped_days;         // no computable day label
  Date first_training_day;
  gbdt::Ensemble last_model;
};

struct BacktestHooks {
  std::function<void(const FitInfo&)> on_fit;
  std::function<void(const std::string&)> log;
};

// Expanding window: before each block of `retrain_every` test days, refit
// from scratch on every row dated strictly before the block's first day (all
// four sections, all origins pooled), then score the block's target-section
// rows. Training starts at the later of the plan's train start and the first
// day with a full warmup.
// Errors: "warmup not satisfied" when a test day cannot be built,
// "empty training window" when no row precedes a refit day.
BacktestResult run_backtest(const Dataset& data, const SplitPlan& plan,
                            const gbdt::TrainConfig& train, const BacktestHooks& hooks = {});

enum class Outcome : std::uint8_t { TruePositive, FalsePositive, TrueNegative, FalseNegative };
std::string_view outcome_code(Outcome o);  // "TP", "FP", "TN", "FN"
Outcome classify(const PredictionRecord& r, double threshold = 0.5);

struct CellReport {
  Section section = Section::Bedoccupying;
  int origin = 0;
  std::size_t n = 0;
  std::size_t positives = 0;
  metrics::ConfusionCounts counts;
  metrics::Rates rates;
  std::optional<metrics::MetricWithCI> auroc;  // nullopt on single-class cells
  std::optional<metrics::MetricWithCI> auprc;  // nullopt without positives
};

struct DayOutcome {
  Date date;
  Section section;
  Outcome outcome;
  double probability;
  bool label;
};

struct EvalReport {
  std::vector<CellReport> cells;  // section-major, then origin
  int outcome_origin = 11;
  std::vector<DayOutcome> outcomes;
};

EvalReport assemble_report(const std::vector<PredictionRecord>& records,
                           std::size_t bootstrap_resamples = 200, std::uint64_t seed = 0,
                           int outcome_origin = 11, double threshold = 0.5, int threads = 1);

}  // namespace edcrowd
