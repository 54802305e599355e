#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace edcrowd {

// Local civil time without timezone arithmetic.
using Date = std::chrono::sys_days;
using Hour = std::chrono::sys_time<std::chrono::hours>;

enum class Section : std::uint8_t { Bedoccupying = 0, Medical = 1, Surgical = 2, Critical = 3 };

inline constexpr std::size_t kNumSections = 4;
inline constexpr std::array<Section, kNumSections> kAllSections = {
    Section::Bedoccupying, Section::Medical, Section::Surgical, Section::Critical};
// Critical is an explanatory series only; it is never scored.
inline constexpr std::array<Section, 3> kTargetSections = {
    Section::Bedoccupying, Section::Medical, Section::Surgical};

constexpr std::size_t index_of(Section s) { return static_cast<std::size_t>(s); }
constexpr bool is_target(Section s) { return s != Section::Critical; }

std::string_view section_code(Section s);  // "bed", "med", "sur", "cri"
std::string_view section_name(Section s);  // "Bedoccupying", ...
std::optional<Section> parse_section_code(std::string_view code);

std::string format_date(Date d);  // YYYY-MM-DD
std::string format_hour(Hour h);  // YYYY-MM-DDTHH:00
std::optional<Date> parse_date(std::string_view text);
// Accepts YYYY-MM-DDTHH[:MM[:SS]] (or a space separator); minutes and seconds
// must be zero.
std::optional<Hour> parse_hour(std::string_view text);

inline Date date_of(Hour h) { return std::chrono::floor<std::chrono::days>(h); }
inline int hour_of_day(Hour h) { return static_cast<int>((h - date_of(h)).count()); }
inline Hour at_hour(Date d, int hour) { return Hour{d} + std::chrono::hours{hour}; }
// Monday = 0 ... Sunday = 6.
inline int weekday_index(Date d) {
  return static_cast<int>(std::chrono::weekday{d}.iso_encoding()) - 1;
}

// Contiguous hourly occupancy ratios (occupancy / capacity) for one section.
// Values are >= 0 and may exceed 1.0.
class HourlySeries {
 public:
  HourlySeries(Section section, Hour start, std::vector<double> values);

  Section section() const { return section_; }
  Hour start() const { return start_; }
  // One past the last sample.
  Hour end() const { return start_ + std::chrono::hours{static_cast<long>(values_.size())}; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  bool covers(Hour t) const { return t >= start_ && t < end(); }
  bool covers_day(Date d) const { return covers(at_hour(d, 0)) && covers(at_hour(d, 23)); }
  double at(Hour t) const;

  // 24-hour sub-series for a calendar day; throws DataError("incomplete day").
  HourlySeries day(Date d) const;
  HourlySeries with_value(Hour t, double value) const;

  friend bool operator==(const HourlySeries&, const HourlySeries&) = default;

 private:
  Section section_;
  Hour start_;
  std::vector<double> values_;
};

struct CrowdingConfig {
  double edor_threshold = 0.90;
  int min_hours = 3;

  void validate() const;
};

struct DayLabel {
  Date date;
  Section section;
  bool crowded = false;
  int crowded_hour_count = 0;

  friend bool operator==(const DayLabel&, const DayLabel&) = default;
};

// output[i] = values[i] >= threshold (inclusive).
std::vector<bool> hourly_crowding(const HourlySeries& series, const CrowdingConfig& cfg);

// Counts threshold hours over the full 24-hour calendar day.
DayLabel label_day(const HourlySeries& series_for_day, const CrowdingConfig& cfg);

// Fraction of crowded days, per section present in `labels`.
std::map<Section, double> daily_prevalence(std::span<const DayLabel> labels);

// Labels for every calendar day fully covered by all four series.
using DayLabels = std::map<Date, std::array<DayLabel, kNumSections>>;
DayLabels label_all_days(const std::array<HourlySeries, kNumSections>& series,
                         const CrowdingConfig& cfg);

}  // namespace edcrowd
