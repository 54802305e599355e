#include <gtest/gtest.h>

#include <cmath>

#include "edcrowd/error.hpp"
#include "edcrowd/synthgen.hpp"
#include "fixtures.hpp"

namespace edcrowd {
namespace {

using testing::ymd;

SynthConfig quiet_config(int days) {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.n_days = days;
  for (auto& s : cfg.sections) {
    s.surge_probability = 0.0;
    s.ar_scale = 0.0;
  }
  return cfg;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

const SynthData& default_data() {
  static const SynthData data = generate(SynthConfig::defaults());
  return data;
}

TEST(Generate, ShapeAndInvariants) {
  const auto& data = default_data();
  const auto cfg = SynthConfig::defaults();
  for (Section s : kAllSections) {
    const auto& series = data.series[index_of(s)];
    EXPECT_EQ(series.section(), s);
    EXPECT_EQ(series.start(), Hour{cfg.start});
    EXPECT_EQ(series.size(), 791u * 24u);
    for (double v : series.values()) ASSERT_TRUE(v >= 0.0 && std::isfinite(v));
  }
  ASSERT_EQ(data.weather.size(), 791u);
  for (const auto& w : data.weather) EXPECT_NO_THROW(w.validate());
  EXPECT_EQ(data.weather_table().size(), 791u);
  EXPECT_EQ(data.holidays.dates().size(), data.holiday_names.size());
}

TEST(Generate, SeedDeterminism) {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.n_days = 120;
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  EXPECT_EQ(a.series, b.series);
  EXPECT_EQ(a.weather, b.weather);
  cfg.seed += 1;
  EXPECT_NE(generate(cfg).series, a.series);
}

TEST(Generate, NoSurgeNoNoiseMeansNoCrowding) {
  const auto data = generate(quiet_config(200));
  const auto labels = label_all_days(data.series, {});
  for (const auto& [d, day] : labels) {
    for (const auto& l : day) EXPECT_FALSE(l.crowded) << format_date(d);
  }
  const auto report = calibration_report(data.series);
  EXPECT_FALSE(report.passed());
  for (Section s : kTargetSections) {
    EXPECT_EQ(report.sections[index_of(s)].prevalence, 0.0);
    EXPECT_FALSE(report.sections[index_of(s)].prevalence_ok);
  }
}

TEST(Generate, ConfigValidation) {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.n_days = 10;
  try {
    generate(cfg);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("warmup viability"), std::string::npos);
  }
  cfg = SynthConfig::defaults();
  cfg.sections[1].ar_coefficient = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SynthConfig::defaults();
  cfg.sections[0].weekday_multipliers[3] = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Calibration, DefaultFixturePasses) {
  const auto report = calibration_report(default_data().series);
  ASSERT_EQ(report.sections.size(), 4u);
  for (Section s : kTargetSections) {
    const auto& c = report.sections[index_of(s)];
    ASSERT_TRUE(c.target);
    EXPECT_EQ(*c.target, kTargetPrevalence[index_of(s)]);
    EXPECT_NEAR(c.prevalence, *c.target, 0.05) << section_name(s);
    for (int h = 8; h <= 10; ++h) EXPECT_EQ(c.hourly_incidence[static_cast<std::size_t>(h)], 0.0);
    EXPECT_GE(c.peak_hour, 14);
    EXPECT_LE(c.peak_hour, 18);
    EXPECT_LT(c.weekend_prevalence, c.weekday_prevalence);
  }
  EXPECT_FALSE(report.sections[index_of(Section::Critical)].target);
  EXPECT_TRUE(report.passed());
}

TEST(Calibration, MatchesDirectLabelCount) {
  const auto& data = default_data();
  const auto labels = label_all_days(data.series, {});
  const auto report = calibration_report(data.series);
  for (Section s : kAllSections) {
    double crowded = 0;
    for (const auto& [d, day] : labels) crowded += day[index_of(s)].crowded;
    EXPECT_DOUBLE_EQ(report.sections[index_of(s)].prevalence, crowded / static_cast<double>(labels.size()));
    EXPECT_EQ(report.sections[index_of(s)].days, labels.size());
  }
}

TEST(Calibration, WeekendDampingLowersWeekendPrevalence) {
  SynthConfig cfg = SynthConfig::defaults();
  cfg.seed = 5;
  for (auto& s : cfg.sections) s.weekend_damping = 0.8;
  const auto report = calibration_report(generate(cfg).series);
  for (Section s : kTargetSections) {
    const auto& c = report.sections[index_of(s)];
    EXPECT_LT(c.weekend_prevalence, c.weekday_prevalence);
    EXPECT_TRUE(c.weekend_ok);
  }
}

TEST(Calibration, TooShort) {
  const auto s = testing::series_from(Hour{ymd(2019, 1, 1)}, 24 * 30, [](Section, Hour) { return 0.5; });
  EXPECT_THROW(calibration_report(s), DataError);
}

TEST(Generate, MedicalAndBedSurgesCorrelate) {
  const auto labels = label_all_days(default_data().series, {});
  std::vector<double> bed, med;
  for (const auto& [d, day] : labels) {
    bed.push_back(day[index_of(Section::Bedoccupying)].crowded);
    med.push_back(day[index_of(Section::Medical)].crowded);
  }
  EXPECT_GT(correlation(bed, med), 0.3);
}

TEST(Generate, WeatherCouplingInjectsSignal) {
  auto daily_corr = [](double coupling) {
    SynthConfig cfg = SynthConfig::defaults();
    cfg.weather.edor_coupling = coupling;
    const auto data = generate(cfg);
    std::vector<double> temp, edor;
    const auto values = data.series[index_of(Section::Bedoccupying)].values();
    for (std::size_t d = 0; d < data.weather.size(); ++d) {
      double sum = 0;
      for (std::size_t h = 0; h < 24; ++h) sum += values[d * 24 + h];
      temp.push_back(data.weather[d].temp_mean);
      edor.push_back(sum / 24.0);
    }
    return correlation(temp, edor);
  };
  const double off = daily_corr(0.0);
  const double on = daily_corr(0.15);
  EXPECT_LT(std::abs(off), 0.15);
  EXPECT_GT(on, off + 0.2);
}

TEST(Holidays, EasterDependentDates) {
  const auto h = finnish_holidays(2018, 2020);
  auto has = [&](Date d, std::string_view name) {
    return std::any_of(h.begin(), h.end(), [&](const NamedHoliday& x) { return x.date == d && x.name == name; });
  };
  // Western Easter Sundays: 2018-04-01, 2019-04-21, 2020-04-12.
  EXPECT_TRUE(has(ymd(2018, 4, 1), "Easter Sunday"));
  EXPECT_TRUE(has(ymd(2019, 4, 19), "Good Friday"));
  EXPECT_TRUE(has(ymd(2019, 4, 22), "Easter Monday"));
  EXPECT_TRUE(has(ymd(2020, 5, 21), "Ascension Day"));
  EXPECT_TRUE(has(ymd(2019, 6, 21), "Midsummer Eve"));
  EXPECT_TRUE(has(ymd(2019, 12, 6), "Independence Day"));
  EXPECT_TRUE(std::is_sorted(h.begin(), h.end(), [](auto& a, auto& b) { return a.date < b.date; }));
  for (const auto& x : h) {
    const auto y = static_cast<int>(std::chrono::year_month_day{x.date}.year());
    EXPECT_TRUE(y >= 2018 && y <= 2020);
  }
}

}  // namespace
}  // namespace edcrowd
