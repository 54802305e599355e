#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "edcrowd/backtest.hpp"
#include "edcrowd/error.hpp"
#include "fixtures.hpp"

namespace edcrowd {
namespace {

using testing::ymd;

// One-week histories, one weekly lag: a 7-day warmup.
const FeatureLayout kSmallLayout(24, 1);
const Date kStart = ymd(2018, 1, 1);

const Dataset& small_dataset() {
  static const Dataset data = testing::synthetic_dataset(120, 2018, kSmallLayout, kStart);
  return data;
}

gbdt::TrainConfig quick_train() {
  gbdt::TrainConfig cfg;
  cfg.num_trees = 12;
  cfg.num_leaves = 7;
  cfg.min_data_in_leaf = 10;
  return cfg;
}

Date day(int i) { return kStart + std::chrono::days{i}; }

SplitPlan plan(int train_first, int train_last, int test_first, int test_last, int every = 1) {
  return {{day(train_first), day(train_last)}, {day(test_first), day(test_last)}, every};
}

TEST(SplitPlan, Validation) {
  EXPECT_NO_THROW(plan(0, 9, 10, 20).validate());
  EXPECT_THROW(plan(0, 10, 10, 20).validate(), std::invalid_argument);
  EXPECT_THROW(plan(0, 9, 30, 20).validate(), std::invalid_argument);
  EXPECT_THROW(plan(0, 9, 10, 20, 0).validate(), std::invalid_argument);
}

TEST(RunBacktest, OneTestDayGivesEighteenRecords) {
  const auto r = run_backtest(small_dataset(), plan(0, 59, 60, 60), quick_train());
  ASSERT_EQ(r.records.size(), 18u);
  ASSERT_EQ(r.fits.size(), 1u);
  EXPECT_EQ(r.first_training_day, day(7));
  EXPECT_EQ(r.fits[0].training_rows, 53u * 24u);
  EXPECT_EQ(r.fits[0].last_training_day, day(59));
  std::size_t i = 0;
  for (Section s : kTargetSections) {
    for (int o : kForecastOrigins) {
      EXPECT_EQ(r.records[i].date, day(60));
      EXPECT_EQ(r.records[i].section, s);
      EXPECT_EQ(r.records[i].origin_hour, o);
      EXPECT_EQ(r.records[i].true_label, small_dataset().labels.at(day(60))[index_of(s)].crowded);
      EXPECT_GE(r.records[i].probability, 0.0);
      EXPECT_LE(r.records[i].probability, 1.0);
      ++i;
    }
  }
  const auto report = assemble_report(r.records, 50, 1);
  ASSERT_EQ(report.cells.size(), 18u);
  for (const auto& c : report.cells) {
    EXPECT_EQ(c.n, 1u);
    EXPECT_FALSE(c.auroc);
  }
}

TEST(RunBacktest, CadenceChangesFitsNotRecords) {
  const auto daily = run_backtest(small_dataset(), plan(0, 79, 80, 89, 1), quick_train());
  const auto weekly = run_backtest(small_dataset(), plan(0, 79, 80, 89, 4), quick_train());
  const auto once = run_backtest(small_dataset(), plan(0, 79, 80, 89, 10), quick_train());
  EXPECT_EQ(daily.fits.size(), 10u);
  EXPECT_EQ(weekly.fits.size(), 3u);
  EXPECT_EQ(once.fits.size(), 1u);
  EXPECT_EQ(daily.records.size(), 180u);
  EXPECT_EQ(weekly.records.size(), 180u);
  EXPECT_EQ(once.records.size(), 180u);
  for (std::size_t i = 0; i < daily.records.size(); ++i) {
    EXPECT_EQ(daily.records[i].date, once.records[i].date);
    EXPECT_EQ(daily.records[i].true_label, once.records[i].true_label);
  }
  // The first block is scored by the same model under every cadence.
  for (std::size_t i = 0; i < 18; ++i) {
    EXPECT_EQ(daily.records[i].probability, once.records[i].probability);
  }
  EXPECT_EQ(weekly.fits[1].test_day, day(84));
  EXPECT_EQ(weekly.fits[2].scored_days, 2u);
}

TEST(RunBacktest, ExpandingWindow) {
  std::vector<FitInfo> seen;
  BacktestHooks hooks;
  hooks.on_fit = [&](const FitInfo& f) { seen.push_back(f); };
  const auto r = run_backtest(small_dataset(), plan(0, 69, 70, 81, 3), quick_train(), hooks);
  ASSERT_EQ(seen.size(), 4u);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    EXPECT_LT(seen[i].last_training_day, seen[i].test_day);
    EXPECT_EQ(seen[i].training_rows, static_cast<std::size_t>((seen[i].test_day - day(7)).count()) * 24);
    if (i > 0) {
      EXPECT_GT(seen[i].training_rows, seen[i - 1].training_rows);
    }
  }
  EXPECT_EQ(r.fits.size(), seen.size());
}

TEST(RunBacktest, GapBetweenTrainAndTestIsSkipped) {
  const auto r = run_backtest(small_dataset(), plan(0, 49, 60, 60), quick_train());
  EXPECT_EQ(r.fits[0].training_rows, 43u * 24u);
  EXPECT_EQ(r.fits[0].last_training_day, day(49));
}

// Labels and future EDOR of the scored day never reach its predictions.
TEST(RunBacktest, FutureDataDoesNotLeak) {
  const auto& base = small_dataset();
  const Date d = day(70);
  const auto p = plan(0, 69, 70, 70);
  const auto ref = run_backtest(base, p, quick_train());
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    Dataset data = base;
    for (auto it = data.labels.lower_bound(d); it != data.labels.end(); ++it) {
      for (auto& l : it->second) l.crowded = (rng() & 1u) != 0;
    }
    const Hour t = at_hour(d, 8 + trial);
    for (auto& s : data.series) {
      for (Hour h = t; h < s.end(); h += std::chrono::hours{5}) s = s.with_value(h, 2.5);
    }
    const auto out = run_backtest(data, p, quick_train());
    ASSERT_EQ(out.records.size(), ref.records.size());
    for (std::size_t i = 0; i < out.records.size(); ++i) {
      if (at_hour(d, out.records[i].origin_hour) > t) continue;
      EXPECT_EQ(out.records[i].probability, ref.records[i].probability) << trial << "/" << i;
    }
  }
}

TEST(RunBacktest, DropsDaysWithoutLabels) {
  Dataset data = small_dataset();
  data.labels.erase(day(30));
  data.labels.erase(day(75));
  std::vector<std::string> logs;
  BacktestHooks hooks;
  hooks.log = [&](const std::string& m) { logs.push_back(m); };
  const auto r = run_backtest(data, plan(0, 69, 70, 79, 10), quick_train(), hooks);
  EXPECT_EQ(r.dropped_days, (std::vector<Date>{day(30), day(75)}));
  EXPECT_EQ(r.records.size(), 9u * 18u);
  EXPECT_EQ(r.fits[0].training_rows, 62u * 24u);
  for (const auto& rec : r.records) EXPECT_NE(rec.date, day(75));
  EXPECT_GE(logs.size(), 3u);
}

TEST(RunBacktest, Errors) {
  try {
    run_backtest(small_dataset(), plan(0, 2, 3, 10), quick_train());
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("warmup not satisfied"), std::string::npos);
  }
  try {
    run_backtest(small_dataset(), plan(0, 6, 7, 10), quick_train());
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("empty training window"), std::string::npos);
  }
  EXPECT_THROW(run_backtest(small_dataset(), plan(0, 59, 200, 210), quick_train()), DataError);
}

TEST(RunBacktest, Deterministic) {
  const auto a = run_backtest(small_dataset(), plan(0, 79, 80, 85, 2), quick_train());
  const auto b = run_backtest(small_dataset(), plan(0, 79, 80, 85, 2), quick_train());
  EXPECT_EQ(a.records, b.records);
}

std::vector<PredictionRecord> synthetic_records(std::uint64_t seed, int days) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PredictionRecord> out;
  for (int d = 0; d < days; ++d) {
    for (Section s : kTargetSections) {
      for (int o : kForecastOrigins) {
        const bool y = u(rng) < 0.3;
        const double p = std::clamp((y ? 0.6 : 0.35) + (u(rng) - 0.5) * 0.6, 0.0, 1.0);
        out.push_back({day(d), s, o, p, y});
      }
    }
  }
  return out;
}

TEST(AssembleReport, PerfectPredictions) {
  auto recs = synthetic_records(1, 40);
  for (auto& r : recs) r.probability = r.true_label ? 0.95 : 0.05;
  const auto report = assemble_report(recs, 100, 3);
  ASSERT_EQ(report.cells.size(), 18u);
  for (const auto& c : report.cells) {
    EXPECT_EQ(c.rates.acc, 1.0);
    EXPECT_EQ(c.rates.f1, 1.0);
    ASSERT_TRUE(c.auroc);
    EXPECT_EQ(c.auroc->point, 1.0);
    EXPECT_EQ(c.auroc->ci_low, 1.0);
  }
}

TEST(AssembleReport, CellLayoutAndOutcomes) {
  const auto recs = synthetic_records(2, 30);
  const auto report = assemble_report(recs, 60, 5, 11);
  std::size_t i = 0;
  for (Section s : kTargetSections) {
    for (int o : kForecastOrigins) {
      const auto& c = report.cells[i++];
      EXPECT_EQ(c.section, s);
      EXPECT_EQ(c.origin, o);
      EXPECT_EQ(c.n, 30u);
      EXPECT_EQ(c.counts.total(), 30u);
    }
  }
  ASSERT_EQ(report.outcomes.size(), 90u);
  metrics::ConfusionCounts from_outcomes;
  for (const auto& d : report.outcomes) {
    if (d.section != Section::Medical) continue;
    switch (d.outcome) {
      case Outcome::TruePositive: ++from_outcomes.tp; break;
      case Outcome::FalsePositive: ++from_outcomes.fp; break;
      case Outcome::TrueNegative: ++from_outcomes.tn; break;
      case Outcome::FalseNegative: ++from_outcomes.fn; break;
    }
  }
  EXPECT_EQ(from_outcomes, report.cells[6 + 3].counts);  // Medical, origin 11
  EXPECT_TRUE(std::is_sorted(report.outcomes.begin(), report.outcomes.end(), [](auto& a, auto& b) {
    return std::pair{a.section, a.date} < std::pair{b.section, b.date};
  }));
}

TEST(AssembleReport, SingleClassCellStillReportsRates) {
  auto recs = synthetic_records(3, 20);
  for (auto& r : recs) {
    if (r.section == Section::Surgical) r.true_label = false;
  }
  const auto report = assemble_report(recs, 50, 0);
  for (const auto& c : report.cells) {
    if (c.section == Section::Surgical) {
      EXPECT_FALSE(c.auroc);
      EXPECT_FALSE(c.auprc);
      EXPECT_EQ(c.positives, 0u);
      EXPECT_GT(c.rates.acc, 0.0);
    } else {
      EXPECT_TRUE(c.auroc);
    }
  }
}

TEST(AssembleReport, DeterministicAcrossThreads) {
  const auto recs = synthetic_records(4, 50);
  const auto a = assemble_report(recs, 80, 11, 11, 0.5, 1);
  const auto b = assemble_report(recs, 80, 11, 11, 0.5, 3);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].auroc->ci_low, b.cells[i].auroc->ci_low);
    EXPECT_EQ(a.cells[i].auroc->ci_high, b.cells[i].auroc->ci_high);
    EXPECT_EQ(a.cells[i].auprc->ci_high, b.cells[i].auprc->ci_high);
  }
  EXPECT_THROW(assemble_report({}, 10, 0), DataError);
}

TEST(Classify, Boundaries) {
  EXPECT_EQ(classify({Date{}, Section::Medical, 8, 0.5, true}), Outcome::TruePositive);
  EXPECT_EQ(classify({Date{}, Section::Medical, 8, 0.5, false}), Outcome::FalsePositive);
  EXPECT_EQ(classify({Date{}, Section::Medical, 8, 0.49, false}), Outcome::TrueNegative);
  EXPECT_EQ(classify({Date{}, Section::Medical, 8, 0.49, true}), Outcome::FalseNegative);
  EXPECT_EQ(outcome_code(Outcome::FalseNegative), "FN");
}

}  // namespace
}  // namespace edcrowd
