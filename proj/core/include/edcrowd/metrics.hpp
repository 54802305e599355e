#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "edcrowd/timeseries.hpp"

namespace edcrowd {

struct PredictionRecord {
  Date date{};
  Section section = Section::Bedoccupying;
  int origin_hour = 0;
  double probability = 0.0;
  bool true_label = false;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

}  // namespace edcrowd

namespace edcrowd::metrics {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Predicted positive <=> probability >= threshold.
ConfusionCounts confusion(std::span<const PredictionRecord> records, double threshold = 0.5);

// Ratios with a zero denominator are nullopt (undefined). F1 is
// 2TP / (2TP + FP + FN), and 0 when TP = 0.
struct Rates {
  std::optional<double> tpr, tnr, ppv, npv, fpr, fnr;
  double acc = 0.0;
  double f1 = 0.0;
};

Rates rates(const ConfusionCounts& counts);

// Mann-Whitney statistic, ties credited 0.5. Throws "AUROC undefined" on
// single-class input.
double auroc(std::span<const PredictionRecord> records);

// Average precision: sum over distinct thresholds (descending) of
// (R_i - R_{i-1}) * P_i. Throws when there are no positives.
double auprc(std::span<const PredictionRecord> records);

struct CurvePoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// One point per distinct score, thresholds descending. fpr is 0 when there
// are no negatives.
std::vector<CurvePoint> threshold_curve(std::span<const PredictionRecord> records);

struct MetricWithCI {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_bootstrap = 0;
};

// A metric returns nullopt where it is undefined for a sample.
using Metric = std::function<std::optional<double>(std::span<const PredictionRecord>)>;

std::optional<double> auroc_metric(std::span<const PredictionRecord> records);
std::optional<double> auprc_metric(std::span<const PredictionRecord> records);
std::optional<double> accuracy_metric(std::span<const PredictionRecord> records);

// Percentile bootstrap (2.5 / 97.5, linear interpolation between order
// statistics). Undefined resamples are redrawn; more than 10*B redraws
// throws "metric unstable under resampling".
MetricWithCI bootstrap_ci(std::span<const PredictionRecord> records, const Metric& metric,
                          std::size_t resamples = 200, std::uint64_t seed = 0);

// Linear-interpolation quantile of sorted values, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace edcrowd::metrics
