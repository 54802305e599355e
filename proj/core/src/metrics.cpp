#include "edcrowd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "edcrowd/error.hpp"

namespace edcrowd::metrics {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

// Records sorted by descending probability.
std::vector<const PredictionRecord*> by_score_desc(std::span<const PredictionRecord> records) {
  std::vector<const PredictionRecord*> order(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) order[i] = &records[i];
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->probability > b->probability;
  });
  return order;
}

std::size_t count_positives(std::span<const PredictionRecord> records) {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(),
                                                [](const auto& r) { return r.true_label; }));
}

}  // namespace

ConfusionCounts confusion(std::span<const PredictionRecord> records, double threshold) {
  ConfusionCounts c;
  for (const auto& r : records) {
    const bool predicted = r.probability >= threshold;
    if (predicted && r.true_label) ++c.tp;
    else if (predicted) ++c.fp;
    else if (r.true_label) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Rates rates(const ConfusionCounts& c) {
  if (c.total() == 0) throw DataError("no records to rate");
  Rates r;
  r.tpr = ratio(c.tp, c.tp + c.fn);
  r.tnr = ratio(c.tn, c.tn + c.fp);
  r.ppv = ratio(c.tp, c.tp + c.fp);
  r.npv = ratio(c.tn, c.tn + c.fn);
  r.fpr = ratio(c.fp, c.fp + c.tn);
  r.fnr = ratio(c.fn, c.fn + c.tp);
  r.acc = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  // Harmonic mean of precision and recall, written over counts.
  r.f1 = c.tp == 0 ? 0.0
                   : 2.0 * static_cast<double>(c.tp) /
                         static_cast<double>(2 * c.tp + c.fp + c.fn);
  return r;
}

double auroc(std::span<const PredictionRecord> records) {
  const std::size_t pos = count_positives(records);
  const std::size_t neg = records.size() - pos;
  if (pos == 0 || neg == 0) throw DataError("AUROC undefined");
  const auto order = by_score_desc(records);
  // Walk tie groups from the lowest score upward.
  double credit = 0.0;
  std::size_t neg_below = 0;
  for (std::size_t hi = order.size(); hi > 0;) {
    std::size_t lo = hi - 1;
    while (lo > 0 && order[lo - 1]->probability == order[hi - 1]->probability) --lo;
    std::size_t p = 0, n = 0;
    for (std::size_t i = lo; i < hi; ++i) (order[i]->true_label ? p : n)++;
    credit += static_cast<double>(p) * (static_cast<double>(neg_below) + 0.5 * static_cast<double>(n));
    neg_below += n;
    hi = lo;
  }
  return credit / (static_cast<double>(pos) * static_cast<double>(neg));
}

std::vector<CurvePoint> threshold_curve(std::span<const PredictionRecord> records) {
  const std::size_t pos = count_positives(records);
  const std::size_t neg = records.size() - pos;
  const auto order = by_score_desc(records);
  std::vector<CurvePoint> out;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = order[i]->probability;
    while (i < order.size() && order[i]->probability == t) {
      (order[i]->true_label ? tp : fp)++;
      ++i;
    }
    CurvePoint pt;
    pt.threshold = t;
    pt.tpr = pos == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(pos);
    pt.fpr = neg == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(neg);
    pt.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    pt.recall = pt.tpr;
    out.push_back(pt);
  }
  return out;
}

double auprc(std::span<const PredictionRecord> records) {
  const std::size_t pos = count_positives(records);
  if (pos == 0) throw DataError("AUPRC undefined without positives");
  double ap = 0.0;
  double prev_recall = 0.0;
  for (const auto& pt : threshold_curve(records)) {
    ap += (pt.recall - prev_recall) * pt.precision;
    prev_recall = pt.recall;
  }
  return ap;
}

std::optional<double> auroc_metric(std::span<const PredictionRecord> records) {
  const std::size_t pos = count_positives(records);
  if (pos == 0 || pos == records.size()) return std::nullopt;
  return auroc(records);
}

std::optional<double> auprc_metric(std::span<const PredictionRecord> records) {
  if (count_positives(records) == 0) return std::nullopt;
  return auprc(records);
}

std::optional<double> accuracy_metric(std::span<const PredictionRecord> records) {
  if (records.empty()) return std::nullopt;
  return rates(confusion(records)).acc;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

MetricWithCI bootstrap_ci(std::span<const PredictionRecord> records, const Metric& metric,
                          std::size_t resamples, std::uint64_t seed) {
  if (resamples == 0) throw std::invalid_argument("bootstrap needs at least one resample");
  const auto point = metric(records);
  if (!point) throw DataError("metric undefined on the full sample");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, records.size() - 1);
  std::vector<PredictionRecord> sample(records.size());
  std::vector<double> stats;
  stats.reserve(resamples);
  const std::size_t redraw_cap = 10 * resamples;
  std::size_t redraws = 0;
  while (stats.size() < resamples) {
    for (auto& s : sample) s = records[pick(rng)];
    if (const auto v = metric(sample)) {
      stats.push_back(*v);
    } else if (++redraws > redraw_cap) {
      throw DataError("metric unstable under resampling");
    }
  }
  std::sort(stats.begin(), stats.end());
  return MetricWithCI{*point, quantile_sorted(stats, 0.025), quantile_sorted(stats, 0.975),
                      resamples};
}

}  // namespace edcrowd::metrics
