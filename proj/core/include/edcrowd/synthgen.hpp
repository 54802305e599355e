#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edcrowd/features.hpp"

namespace edcrowd {

struct SectionProfile {
  std::array<double, 24> base_curve{};         // EDOR by hour of day before effects
  std::array<double, 7> weekday_multipliers{};  // Monday first
  double weekend_damping = 1.0;                 // extra multiplier on Sat/Sun
  double surge_probability = 0.0;               // per day
  // Surge amplitude is lognormal with this median and log-sd, clipped.
  double surge_amplitude_median = 0.3;
  double surge_amplitude_log_sd = 0.3;
  double surge_amplitude_max = 1.0;
  double surge_peak_hour = 16.0;
  double surge_rise_hours = 3.5;   // sd of the bump before the peak
  double surge_decay_hours = 4.5;  // sd after the peak; spills past midnight
  // Loading on the daily driver shared by all sections, in [0, 1].
  double driver_loading = 0.0;
  double ar_coefficient = 0.9;  // hourly log-noise AR(1)
  double ar_scale = 0.025;      // innovation sd
};

struct WeatherModel {
  double temp_annual_mean = 5.5;   // degrees C
  double temp_amplitude = 11.0;    // seasonal sinusoid, peak mid-July
  double temp_noise_sd = 3.0;
  double temp_persistence = 0.7;   // daily AR(1) of the anomaly
  double diurnal_range = 7.0;
  double wet_day_probability = 0.45;
  double mean_wet_precipitation = 3.5;  // mm, exponential
  double snow_melt_per_degree = 1.5;    // cm per day per degree above 0
  // EDOR multiplier exp(coupling * standardized temperature anomaly).
  double edor_coupling = 0.0;
};

struct SynthConfig {
  int n_days = 791;
  std::uint64_t seed = 2018;
  Date start = Date{std::chrono::year{2018} / 1 / 1};
  std::array<SectionProfile, kNumSections> sections;  // Section enum order
  double driver_persistence = 0.6;  // daily AR(1) of the shared surge driver
  double holiday_multiplier = 0.88;
  bool generate_holidays = true;
  WeatherModel weather;

  static SynthConfig defaults();
  void validate() const;  // throws std::invalid_argument
};

struct NamedHoliday {
  Date date;
  std::string name;
};

struct SynthData {
  SectionSeries series;
  std::vector<WeatherDay> weather;
  HolidayCalendar holidays;
  std::vector<NamedHoliday> holiday_names;  // same dates as `holidays`

  WeatherTable weather_table() const;
};

SynthData generate(const SynthConfig& cfg);

// Public holidays observed in Finland for the given years, including the
// Easter-dependent ones.
std::vector<NamedHoliday> finnish_holidays(int first_year, int last_year);

struct SectionCalibration {
  Section section = Section::Bedoccupying;
  std::size_t days = 0;
  double prevalence = 0.0;
  std::optional<double> target;  // none for Critical
  double weekday_prevalence = 0.0;
  double weekend_prevalence = 0.0;
  std::array<double, 24> hourly_incidence{};  // share of days crowded at each hour
  int peak_hour = 0;
  bool prevalence_ok = true;
  bool morning_ok = true;  // no crowded hour 8-10
  bool peak_ok = true;     // peak within 14-18
  bool weekend_ok = true;  // weekend prevalence below weekday

  bool passed() const { return prevalence_ok && morning_ok && peak_ok && weekend_ok; }
};

struct CalibrationReport {
  std::vector<SectionCalibration> sections;
  double prevalence_tolerance = 0.05;

  bool passed() const;
};

inline constexpr std::array<double, 3> kTargetPrevalence = {0.28, 0.36, 0.25};

// Critical is summarized but only the three target sections carry bands.
CalibrationReport calibration_report(const SectionSeries& series, const CrowdingConfig& cfg = {});

}  // namespace edcrowd
