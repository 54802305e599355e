#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "edcrowd/error.hpp"
#include "edcrowd/timeseries.hpp"
#include "fixtures.hpp"

namespace edcrowd {
namespace {

using testing::ymd;

HourlySeries day_series(std::vector<double> v, Date d = ymd(2019, 3, 4)) {
  return HourlySeries(Section::Medical, Hour{d}, std::move(v));
}

std::vector<double> day_with(int hot_hours, double hot, double rest = 0.5) {
  std::vector<double> v(24, rest);
  for (int h = 0; h < hot_hours; ++h) v[static_cast<std::size_t>(14 + h)] = hot;
  return v;
}

TEST(HourlyCrowding, ThresholdIsInclusive) {
  const auto flags = hourly_crowding(day_series({0.90}), {});
  ASSERT_EQ(flags.size(), 1u);
  EXPECT_TRUE(flags[0]);
}

TEST(HourlyCrowding, PointwiseComparison) {
  const auto flags = hourly_crowding(day_series({0.89, 0.91, 1.49}), {});
  EXPECT_EQ(flags, (std::vector<bool>{false, true, true}));
}

TEST(LabelDay, ThreeHoursAboveThresholdIsCrowded) {
  const auto l = label_day(day_series(day_with(3, 0.91)), {});
  EXPECT_TRUE(l.crowded);
  EXPECT_EQ(l.crowded_hour_count, 3);
}

TEST(LabelDay, TwoHoursIsNotCrowded) {
  const auto l = label_day(day_series(day_with(2, 0.95)), {});
  EXPECT_FALSE(l.crowded);
  EXPECT_EQ(l.crowded_hour_count, 2);
}

TEST(LabelDay, AllHoursAtThreshold) {
  const auto l = label_day(day_series(std::vector<double>(24, 0.90)), {});
  EXPECT_TRUE(l.crowded);
  EXPECT_EQ(l.crowded_hour_count, 24);
}

TEST(LabelDay, RejectsIncompleteDay) {
  try {
    label_day(day_series(std::vector<double>(23, 0.5)), {});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("incomplete day"), std::string::npos);
  }
}

TEST(LabelDay, RecordsDateAndSection) {
  const Date d = ymd(2019, 6, 1);
  const auto l = label_day(day_series(std::vector<double>(24, 0.2), d), {});
  EXPECT_EQ(l.date, d);
  EXPECT_EQ(l.section, Section::Medical);
}

std::vector<DayLabel> labels_with(int crowded, int total) {
  std::vector<DayLabel> out;
  for (int i = 0; i < total; ++i) {
    out.push_back({ymd(2018, 1, 1) + std::chrono::days{i}, Section::Bedoccupying, i < crowded, 0});
  }
  return out;
}

TEST(DailyPrevalence, Fractions) {
  EXPECT_DOUBLE_EQ(daily_prevalence(labels_with(218, 791)).at(Section::Bedoccupying), 218.0 / 791.0);
  EXPECT_DOUBLE_EQ(daily_prevalence(labels_with(288, 791)).at(Section::Bedoccupying), 288.0 / 791.0);
  EXPECT_EQ(daily_prevalence(labels_with(0, 40)).at(Section::Bedoccupying), 0.0);
}

TEST(DailyPrevalence, PerSection) {
  auto labels = labels_with(1, 4);
  labels.push_back({ymd(2018, 1, 1), Section::Surgical, true, 5});
  const auto p = daily_prevalence(labels);
  EXPECT_EQ(p.size(), 2u);
  EXPECT_DOUBLE_EQ(p.at(Section::Bedoccupying), 0.25);
  EXPECT_DOUBLE_EQ(p.at(Section::Surgical), 1.0);
}

TEST(DailyPrevalence, EmptyInputThrows) {
  EXPECT_THROW(daily_prevalence(std::vector<DayLabel>{}), DataError);
}

TEST(CrowdingConfig, Validation) {
  EXPECT_NO_THROW(CrowdingConfig{}.validate());
  EXPECT_ANY_THROW((CrowdingConfig{0.9, 0}).validate());
  EXPECT_ANY_THROW((CrowdingConfig{0.9, 25}).validate());
  EXPECT_ANY_THROW((CrowdingConfig{-0.1, 3}).validate());
}

TEST(HourlySeries, RejectsNegativeValues) {
  EXPECT_THROW(day_series({0.5, -0.01}), DataError);
}

TEST(HourlySeries, DayExtraction) {
  std::vector<double> v(72);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  const HourlySeries s(Section::Surgical, Hour{ymd(2019, 1, 1)} + std::chrono::hours{12}, v);
  EXPECT_THROW(s.day(ymd(2019, 1, 1)), DataError);
  const auto d = s.day(ymd(2019, 1, 2));
  ASSERT_EQ(d.size(), 24u);
  EXPECT_EQ(d.values()[0], 12.0);
  EXPECT_EQ(d.values()[23], 35.0);
}

TEST(Calendar, ParseAndFormat) {
  EXPECT_EQ(parse_date("2020-02-29"), ymd(2020, 2, 29));
  EXPECT_FALSE(parse_date("2019-02-29"));
  EXPECT_FALSE(parse_date("2019-1-01"));
  EXPECT_EQ(format_hour(*parse_hour("2019-03-04T13:00:00")), "2019-03-04T13:00");
  EXPECT_EQ(parse_hour("2019-03-04 07"), at_hour(ymd(2019, 3, 4), 7));
  EXPECT_FALSE(parse_hour("2019-03-04T13:30"));
  EXPECT_EQ(weekday_index(ymd(2018, 1, 1)), 0);  // a Monday
  EXPECT_EQ(weekday_index(ymd(2018, 1, 7)), 6);
}

TEST(SectionCodes, RoundTrip) {
  for (Section s : kAllSections) EXPECT_EQ(parse_section_code(section_code(s)), s);
  EXPECT_FALSE(parse_section_code("icu"));
}

// Property checks on random days.
class LabelProperties : public ::testing::TestWithParam<int> {};

TEST_P(LabelProperties, MonotoneInThreshold) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  std::uniform_real_distribution<double> u(0.5, 1.3);
  std::vector<double> v(24);
  for (auto& x : v) x = u(rng);
  const auto series = day_series(v);
  int prev = 25;
  for (double t = 0.5; t <= 1.3; t += 0.01) {
    const int c = label_day(series, {t, 3}).crowded_hour_count;
    EXPECT_LE(c, prev);
    prev = c;
  }
}

TEST_P(LabelProperties, PermutationInvariant) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 1000);
  std::uniform_real_distribution<double> u(0.6, 1.1);
  std::vector<double> v(24);
  for (auto& x : v) x = u(rng);
  const auto before = label_day(day_series(v), {});
  std::shuffle(v.begin(), v.end(), rng);
  const auto after = label_day(day_series(v), {});
  EXPECT_EQ(before.crowded_hour_count, after.crowded_hour_count);
  EXPECT_EQ(before.crowded, after.crowded);
}

TEST_P(LabelProperties, CountMatchesHourlyFlags) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 2000);
  std::uniform_real_distribution<double> u(0.6, 1.1);
  std::vector<double> v(24 * 3);
  for (auto& x : v) x = u(rng);
  const HourlySeries s(Section::Critical, Hour{ymd(2019, 5, 1)}, v);
  const auto flags = hourly_crowding(s, {});
  for (int d = 0; d < 3; ++d) {
    const auto l = label_day(s.day(ymd(2019, 5, 1) + std::chrono::days{d}), {});
    const auto first = flags.begin() + d * 24;
    EXPECT_EQ(l.crowded_hour_count, std::count(first, first + 24, true));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, LabelProperties, ::testing::Range(0, 20));

TEST(LabelAllDays, CoversCommonFullDaysOnly) {
  const Hour start = at_hour(ymd(2019, 1, 1), 5);
  const auto series = testing::series_from(start, 24 * 4, [](Section, Hour) { return 0.95; });
  const auto labels = label_all_days(series, {});
  ASSERT_EQ(labels.size(), 3u);
  EXPECT_EQ(labels.begin()->first, ymd(2019, 1, 2));
  for (const auto& [d, arr] : labels) {
    for (Section s : kAllSections) {
      EXPECT_EQ(arr[index_of(s)].section, s);
      EXPECT_TRUE(arr[index_of(s)].crowded);
    }
  }
}

}  // namespace
}  // namespace edcrowd
