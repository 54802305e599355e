#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "edcrowd/table.hpp"
#include "edcrowd/timeseries.hpp"

namespace edcrowd {

inline constexpr std::array<int, 6> kForecastOrigins = {8, 9, 10, 11, 12, 13};
inline constexpr std::size_t kRowsPerDay = kNumSections * kForecastOrigins.size();

// History blocks follow the explanatory-variable table's section order.
inline constexpr std::array<Section, kNumSections> kHistorySectionOrder = {
    Section::Medical, Section::Bedoccupying, Section::Surgical, Section::Critical};

struct ColumnRange {
  std::size_t first = 0;
  std::size_t count = 0;

  std::size_t end() const { return first + count; }
  bool contains(std::size_t c) const { return c >= first && c < end(); }
  friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

struct FeatureGroupSpan {
  std::string name;
  ColumnRange range;
};

// Column map of the per-day matrix, in group order:
//   edor_history[4 sections] | calendar(5) | crowding_history[4 sections] |
//   weekly_lags | weather(5) | subgroup | crowding_label | origin
// The canonical layout (168 history hours, 8 weekly lags) is 1365 wide.
class FeatureLayout {
 public:
  static constexpr std::size_t kCalendarWidth = 5;
  static constexpr std::size_t kWeatherWidth = 5;

  // Calendar offsets within the calendar block.
  static constexpr std::size_t kWeekday = 0;
  static constexpr std::size_t kDayOfMonth = 1;
  static constexpr std::size_t kMonth = 2;
  static constexpr std::size_t kIsHoliday = 3;
  static constexpr std::size_t kDayOfYear = 4;

  FeatureLayout(int history_hours, int weekly_lags);
  static FeatureLayout canonical() { return FeatureLayout(168, 8); }

  int history_hours() const { return history_hours_; }
  int weekly_lags() const { return weekly_lags_; }
  std::size_t width() const { return width_; }

  ColumnRange edor_history(Section s) const;
  ColumnRange calendar() const { return calendar_; }
  ColumnRange crowding_history(Section s) const;
  ColumnRange weekly_lag_columns() const { return weekly_lags_range_; }
  ColumnRange weather() const { return weather_; }
  std::size_t subgroup_column() const { return subgroup_; }
  std::size_t crowding_label_column() const { return crowding_label_; }
  std::size_t origin_column() const { return origin_; }

  // Hours of data needed before the earliest origin of a day.
  int warmup_hours() const;

  // Ordered partition of [0, width()).
  const std::vector<FeatureGroupSpan>& groups() const { return groups_; }

  // Model-input space: the crowding_label column removed.
  std::size_t model_width() const { return width_ - 1; }
  std::size_t to_model_column(std::size_t layout_column) const;
  // Groups re-indexed into model-input space (crowding_label omitted).
  std::vector<FeatureGroupSpan> model_groups() const;
  // Model columns with categorical semantics (the subgroup code).
  std::vector<std::size_t> model_categorical_columns() const;

  friend bool operator==(const FeatureLayout& a, const FeatureLayout& b) {
    return a.history_hours_ == b.history_hours_ && a.weekly_lags_ == b.weekly_lags_;
  }

 private:
  int history_hours_;
  int weekly_lags_;
  std::size_t width_ = 0;
  std::array<ColumnRange, kNumSections> edor_history_{};
  ColumnRange calendar_;
  std::array<ColumnRange, kNumSections> crowding_history_{};
  ColumnRange weekly_lags_range_;
  ColumnRange weather_;
  std::size_t subgroup_ = 0;
  std::size_t crowding_label_ = 0;
  std::size_t origin_ = 0;
  std::vector<FeatureGroupSpan> groups_;
};

struct WeatherDay {
  Date date;
  double precipitation = 0.0;  // mm
  double snow_depth = 0.0;     // cm
  double temp_max = 0.0;       // degrees C
  double temp_min = 0.0;
  double temp_mean = 0.0;

  void validate() const;
  friend bool operator==(const WeatherDay&, const WeatherDay&) = default;
};

using WeatherTable = std::map<Date, WeatherDay>;

class HolidayCalendar {
 public:
  HolidayCalendar() = default;
  // Throws DataError on duplicate dates.
  explicit HolidayCalendar(std::span<const Date> dates);

  bool contains(Date d) const { return dates_.contains(d); }
  const std::set<Date>& dates() const { return dates_; }
  friend bool operator==(const HolidayCalendar&, const HolidayCalendar&) = default;

 private:
  std::set<Date> dates_;
};

struct RowMeta {
  Section section;
  int origin_hour;
  bool target_label;
  friend bool operator==(const RowMeta&, const RowMeta&) = default;
};

// One day's features: rows ordered section-major (Section enum order), then
// by ascending origin.
struct DayMatrix {
  Date date;
  std::size_t width = 0;
  std::vector<double> values;  // row-major, rows() x width
  std::vector<RowMeta> meta;

  std::size_t rows() const { return meta.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * width, width);
  }
};

using SectionSeries = std::array<HourlySeries, kNumSections>;

// History columns for origin o cover [o - history_hours, o - 1h], most recent
// first; weekly lag k is the target section's EDOR at o - k*168h.
// Errors: "warmup not satisfied", "missing covariate".
DayMatrix build_day_matrix(Date date, const SectionSeries& series,
                           const std::array<DayLabel, kNumSections>& labels,
                           const WeatherTable& weather, const HolidayCalendar& holidays,
                           const FeatureLayout& layout, const CrowdingConfig& cfg = {});

// First date whose rows can be built from `series` under `layout`, or nullopt.
std::optional<Date> first_buildable_date(const SectionSeries& series, const FeatureLayout& layout);

struct StackedRowMeta {
  Date date;
  Section section;
  int origin_hour;
};

struct TrainingRows {
  FeatureTable features;              // model_width() columns
  std::vector<std::uint8_t> labels;   // split out of the crowding_label column
  std::vector<StackedRowMeta> meta;
  std::vector<bool> eval_eligible;    // row section is in targets_only
  FeatureLayout layout = FeatureLayout::canonical();
};

// Pools rows of all sections (cross-learning); the crowding_label column
// becomes the label vector and is dropped from the features.
TrainingRows stack_training_rows(std::span<const DayMatrix> matrices,
                                 std::span<const Section> targets_only,
                                 const FeatureLayout& layout);

}  // namespace edcrowd
