#include "edcrowd/backtest.hpp"

#include <algorithm>
#include <stdexcept>

#include "edcrowd/error.hpp"
#include "parallel.hpp"

namespace edcrowd {

void SplitPlan::validate() const {
  if (initial_train.empty() || test.empty()) {
    throw std::invalid_argument("empty train or test range");
  }
  if (!(initial_train.last < test.first)) {
    throw std::invalid_argument("train range must end before test range");
  }
  if (retrain_every < 1) throw std::invalid_argument("retrain_every must be >= 1");
}

Dataset Dataset::from_series(SectionSeries series, WeatherTable weather, HolidayCalendar holidays,
                             CrowdingConfig crowding, FeatureLayout layout) {
  Dataset d{std::move(series), {}, std::move(weather), std::move(holidays), crowding, layout};
  d.labels = label_all_days(d.series, crowding);
  return d;
}

BacktestResult run_backtest(const Dataset& data, const SplitPlan& plan,
                            const gbdt::TrainConfig& train, const BacktestHooks& hooks) {
  plan.validate();
  const auto log = [&](const std::string& msg) {
    if (hooks.log) hooks.log(msg);
  };
  const auto first = first_buildable_date(data.series, data.layout);
  if (!first || plan.test.first < *first) throw DataError("warmup not satisfied");

  BacktestResult result;
  result.first_training_day = std::max(plan.initial_train.first, *first);
  if (result.first_training_day > plan.initial_train.first) {
    log("training starts " + format_date(result.first_training_day) + " (warmup)");
  }
  std::vector<DayMatrix> matrices;
  std::vector<Date> test_days;
  for (Date d = result.first_training_day; d <= plan.test.last; d += std::chrono::days{1}) {
    const auto labels = data.labels.find(d);
    if (labels == data.labels.end()) {
      result.dropped_days.push_back(d);
      log("dropping " + format_date(d) + ": day label not computable");
      continue;
    }
    if (d > plan.initial_train.last && d < plan.test.first) continue;
    matrices.push_back(build_day_matrix(d, data.series, labels->second, data.weather,
                                        data.holidays, data.layout, data.crowding));
    if (plan.test.contains(d)) test_days.push_back(d);
  }
  if (test_days.empty()) throw DataError("no scorable test days");

  const TrainingRows rows =
      stack_training_rows(matrices, std::span<const Section>(kTargetSections), data.layout);
  matrices.clear();
  matrices.shrink_to_fit();

  gbdt::TrainConfig cfg = train;
  for (auto c : data.layout.model_categorical_columns()) {
    if (!cfg.is_categorical(c)) cfg.categorical_features.push_back(c);
  }
  const auto view = rows.features.view();
  auto rows_before = [&](Date d) {
    return static_cast<std::size_t>(
        std::lower_bound(rows.meta.begin(), rows.meta.end(), d,
                         [](const StackedRowMeta& m, Date x) { return m.date < x; }) -
        rows.meta.begin());
  };

  const auto step = static_cast<std::size_t>(plan.retrain_every);
  for (std::size_t block = 0; block < test_days.size(); block += step) {
    const Date refit_day = test_days[block];
    const std::size_t n_train = rows_before(refit_day);
    if (n_train == 0) throw DataError("empty training window");
    gbdt::Ensemble model =
        gbdt::fit(view.head(n_train), std::span<const std::uint8_t>(rows.labels).first(n_train), cfg);

    const std::size_t block_end = std::min(block + step, test_days.size());
    const std::size_t lo = n_train;
    const std::size_t hi = block_end < test_days.size() ? rows_before(test_days[block_end])
                                                        : rows.meta.size();
    for (std::size_t i = lo; i < hi; ++i) {
      if (!rows.eval_eligible[i] || !plan.test.contains(rows.meta[i].date)) continue;
      const auto& m = rows.meta[i];
      result.records.push_back({m.date, m.section, m.origin_hour,
                                model.predict_proba(rows.features.row(i)), rows.labels[i] != 0});
    }
    FitInfo info{refit_day, block_end - block, n_train, rows.meta[n_train - 1].date};
    result.fits.push_back(info);
    if (hooks.on_fit) hooks.on_fit(info);
    if (block_end >= test_days.size()) result.last_model = std::move(model);
  }
  return result;
}

std::string_view outcome_code(Outcome o) {
  switch (o) {
    case Outcome::TruePositive: return "TP";
    case Outcome::FalsePositive: return "FP";
    case Outcome::TrueNegative: return "TN";
    case Outcome::FalseNegative: return "FN";
  }
  return "?";
}

Outcome classify(const PredictionRecord& r, double threshold) {
  const bool predicted = r.probability >= threshold;
  if (predicted) return r.true_label ? Outcome::TruePositive : Outcome::FalsePositive;
  return r.true_label ? Outcome::FalseNegative : Outcome::TrueNegative;
}

EvalReport assemble_report(const std::vector<PredictionRecord>& records,
                           std::size_t bootstrap_resamples, std::uint64_t seed, int outcome_origin,
                           double threshold, int threads) {
  if (records.empty()) throw DataError("no prediction records");
  EvalReport report;
  report.outcome_origin = outcome_origin;
  struct Pending {
    CellReport cell;
    std::vector<PredictionRecord> records;
    std::uint64_t seed;
  };
  std::vector<Pending> pending;
  std::uint64_t cell_index = 0;
  for (Section s : kTargetSections) {
    for (int origin : kForecastOrigins) {
      ++cell_index;
      std::vector<PredictionRecord> cell;
      for (const auto& r : records) {
        if (r.section == s && r.origin_hour == origin) cell.push_back(r);
      }
      if (cell.empty()) continue;
      CellReport c;
      c.section = s;
      c.origin = origin;
      pending.push_back({std::move(c), std::move(cell), seed * 1000003ULL + cell_index});
    }
  }
  detail::parallel_for(pending.size(), threads, [&](std::size_t i) {
    auto& [c, cell, cell_seed] = pending[i];
    c.n = cell.size();
    c.positives = static_cast<std::size_t>(
        std::count_if(cell.begin(), cell.end(), [](const auto& r) { return r.true_label; }));
    c.counts = metrics::confusion(cell, threshold);
    c.rates = metrics::rates(c.counts);
    try {
      if (c.positives > 0 && c.positives < c.n) {
        c.auroc = metrics::bootstrap_ci(cell, metrics::auroc_metric, bootstrap_resamples, cell_seed);
      }
      if (c.positives > 0) {
        c.auprc = metrics::bootstrap_ci(cell, metrics::auprc_metric, bootstrap_resamples,
                                        cell_seed ^ 0x5bd1e995ULL);
      }
    } catch (const DataError&) {
      // Too few of one class for the bootstrap; leave the intervals out.
    }
  });
  for (auto& p : pending) report.cells.push_back(std::move(p.cell));
  for (const auto& r : records) {
    if (r.origin_hour != outcome_origin) continue;
    report.outcomes.push_back({r.date, r.section, classify(r, threshold), r.probability, r.true_label});
  }
  std::stable_sort(report.outcomes.begin(), report.outcomes.end(),
                   [](const DayOutcome& a, const DayOutcome& b) {
                     return std::tie(a.section, a.date) < std::tie(b.section, b.date);
                   });
  return report;
}

}  // namespace edcrowd
