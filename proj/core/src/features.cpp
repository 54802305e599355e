#include "edcrowd/features.hpp"

#include <algorithm>
#include <cmath>

#include "edcrowd/error.hpp"

namespace edcrowd {

namespace {

constexpr int kHoursPerWeek = 168;

std::string lower_name(Section s) {
  std::string name(section_name(s));
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return name;
}

std::size_t history_slot(Section s) {
  const auto it = std::find(kHistorySectionOrder.begin(), kHistorySectionOrder.end(), s);
  return static_cast<std::size_t>(it - kHistorySectionOrder.begin());
}

}  // namespace

FeatureLayout::FeatureLayout(int history_hours, int weekly_lags)
    : history_hours_(history_hours), weekly_lags_(weekly_lags) {
  if (history_hours < 1) throw DataError("history_hours must be >= 1");
  if (weekly_lags < 0) throw DataError("weekly_lags must be >= 0");
  const auto h = static_cast<std::size_t>(history_hours);
  std::size_t next = 0;
  auto take = [&next](std::size_t n) {
    ColumnRange r{next, n};
    next += n;
    return r;
  };
  for (std::size_t slot = 0; slot < kNumSections; ++slot) {
    edor_history_[slot] = take(h);
    groups_.push_back({"edor_history_" + lower_name(kHistorySectionOrder[slot]), edor_history_[slot]});
  }
  calendar_ = take(kCalendarWidth);
  groups_.push_back({"calendar", calendar_});
  for (std::size_t slot = 0; slot < kNumSections; ++slot) {
    crowding_history_[slot] = take(h);
    groups_.push_back(
        {"crowding_history_" + lower_name(kHistorySectionOrder[slot]), crowding_history_[slot]});
  }
  weekly_lags_range_ = take(static_cast<std::size_t>(weekly_lags));
  if (weekly_lags > 0) groups_.push_back({"weekly_lags", weekly_lags_range_});
  weather_ = take(kWeatherWidth);
  groups_.push_back({"weather", weather_});
  subgroup_ = take(1).first;
  groups_.push_back({"subgroup", {subgroup_, 1}});
  crowding_label_ = take(1).first;
  groups_.push_back({"crowding_label", {crowding_label_, 1}});
  origin_ = take(1).first;
  groups_.push_back({"origin", {origin_, 1}});
  width_ = next;
}

ColumnRange FeatureLayout::edor_history(Section s) const { return edor_history_[history_slot(s)]; }

ColumnRange FeatureLayout::crowding_history(Section s) const {
  return crowding_history_[history_slot(s)];
}

int FeatureLayout::warmup_hours() const {
  return std::max(history_hours_, weekly_lags_ * kHoursPerWeek);
}

std::size_t FeatureLayout::to_model_column(std::size_t layout_column) const {
  if (layout_column == crowding_label_ || layout_column >= width_) {
    throw std::out_of_range("column has no model-input counterpart");
  }
  return layout_column < crowding_label_ ? layout_column : layout_column - 1;
}

std::vector<FeatureGroupSpan> FeatureLayout::model_groups() const {
  std::vector<FeatureGroupSpan> out;
  for (const auto& g : groups_) {
    if (g.range.first == crowding_label_) continue;
    out.push_back({g.name, {to_model_column(g.range.first), g.range.count}});
  }
  return out;
}

std::vector<std::size_t> FeatureLayout::model_categorical_columns() const {
  return {to_model_column(subgroup_)};
}

void WeatherDay::validate() const {
  for (double v : {precipitation, snow_depth, temp_max, temp_min, temp_mean}) {
    if (!std::isfinite(v)) throw DataError("missing covariate: weather " + format_date(date));
  }
  if (precipitation < 0.0 || snow_depth < 0.0) {
    throw DataError("negative precipitation or snow depth on " + format_date(date));
  }
  if (!(temp_min <= temp_mean && temp_mean <= temp_max)) {
    throw DataError("temperature ordering violated on " + format_date(date));
  }
}

HolidayCalendar::HolidayCalendar(std::span<const Date> dates) {
  for (Date d : dates) {
    if (!dates_.insert(d).second) throw DataError("duplicate holiday " + format_date(d));
  }
}

std::optional<Date> first_buildable_date(const SectionSeries& series, const FeatureLayout& layout) {
  Hour lo = series[0].start();
  Hour hi = series[0].end();
  for (const auto& s : series) {
    lo = std::max(lo, s.start());
    hi = std::min(hi, s.end());
  }
  const auto warmup = std::chrono::hours{layout.warmup_hours()};
  const int first_origin = kForecastOrigins.front();
  const int last_origin = kForecastOrigins.back();
  // The earliest origin must sit warmup hours after the first sample.
  Date d = date_of(lo + warmup - std::chrono::hours{first_origin});
  if (at_hour(d, first_origin) - warmup < lo) d += std::chrono::days{1};
  if (at_hour(d, last_origin) > hi) return std::nullopt;
  return d;
}

DayMatrix build_day_matrix(Date date, const SectionSeries& series,
                           const std::array<DayLabel, kNumSections>& labels,
                           const WeatherTable& weather, const HolidayCalendar& holidays,
                           const FeatureLayout& layout, const CrowdingConfig& cfg) {
  cfg.validate();
  for (Section s : kAllSections) {
    if (series[index_of(s)].section() != s) throw DataError("series not in section order");
    if (labels[index_of(s)].section != s || labels[index_of(s)].date != date) {
      throw DataError("day labels do not match date " + format_date(date));
    }
  }
  const auto wit = weather.find(date);
  if (wit == weather.end()) throw DataError("missing covariate: weather " + format_date(date));
  const WeatherDay& w = wit->second;
  w.validate();

  const auto warmup = std::chrono::hours{layout.warmup_hours()};
  for (const auto& s : series) {
    if (at_hour(date, kForecastOrigins.front()) - warmup < s.start() ||
        at_hour(date, kForecastOrigins.back()) > s.end()) {
      throw DataError("warmup not satisfied for " + format_date(date));
    }
  }

  const std::chrono::year_month_day ymd{date};
  const Date jan1{ymd.year() / std::chrono::January / 1};
  const double calendar[FeatureLayout::kCalendarWidth] = {
      static_cast<double>(weekday_index(date)),
      static_cast<double>(static_cast<unsigned>(ymd.day())),
      static_cast<double>(static_cast<unsigned>(ymd.month())),
      holidays.contains(date) ? 1.0 : 0.0,
      static_cast<double>((date - jan1).count() + 1),
  };
  const double weather_values[FeatureLayout::kWeatherWidth] = {
      w.precipitation, w.snow_depth, w.temp_max, w.temp_min, w.temp_mean};

  DayMatrix m;
  m.date = date;
  m.width = layout.width();
  m.values.assign(kRowsPerDay * m.width, 0.0);
  m.meta.reserve(kRowsPerDay);
  const auto hist = static_cast<std::size_t>(layout.history_hours());

  std::size_t r = 0;
  for (Section target : kAllSections) {
    for (int origin : kForecastOrigins) {
      double* row = m.values.data() + r * m.width;
      const Hour origin_ts = at_hour(date, origin);
      for (Section src : kAllSections) {
        const auto& s = series[index_of(src)];
        const auto values = s.values();
        const auto end = static_cast<std::size_t>((origin_ts - s.start()).count());
        const auto edor = layout.edor_history(src);
        const auto crowd = layout.crowding_history(src);
        for (std::size_t j = 0; j < hist; ++j) {
          const double v = values[end - 1 - j];
          row[edor.first + j] = v;
          row[crowd.first + j] = v >= cfg.edor_threshold ? 1.0 : 0.0;
        }
      }
      std::copy(std::begin(calendar), std::end(calendar), row + layout.calendar().first);
      const auto& ts = series[index_of(target)];
      const auto lags = layout.weekly_lag_columns();
      for (std::size_t k = 1; k <= lags.count; ++k) {
        row[lags.first + k - 1] =
            ts.at(origin_ts - std::chrono::hours{static_cast<long>(k) * kHoursPerWeek});
      }
      std::copy(std::begin(weather_values), std::end(weather_values), row + layout.weather().first);
      const bool label = labels[index_of(target)].crowded;
      row[layout.subgroup_column()] = static_cast<double>(index_of(target));
      row[layout.crowding_label_column()] = label ? 1.0 : 0.0;
      row[layout.origin_column()] = static_cast<double>(origin);
      m.meta.push_back({target, origin, label});
      ++r;
    }
  }
  return m;
}

TrainingRows stack_training_rows(std::span<const DayMatrix> matrices,
                                 std::span<const Section> targets_only,
                                 const FeatureLayout& layout) {
  if (matrices.empty()) throw DataError("no day matrices to stack");
  TrainingRows out;
  out.layout = layout;
  const std::size_t label_col = layout.crowding_label_column();
  const std::size_t width = layout.width();
  out.features.cols = layout.model_width();
  std::size_t total_rows = 0;
  for (const auto& m : matrices) {
    if (m.width != width || m.values.size() != m.rows() * width) {
      throw DataError("inconsistent day matrix layout on " + format_date(m.date));
    }
    total_rows += m.rows();
  }
  out.features.values.reserve(total_rows * out.features.cols);
  out.labels.reserve(total_rows);
  out.meta.reserve(total_rows);
  out.eval_eligible.reserve(total_rows);
  for (const auto& m : matrices) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto row = m.row(i);
      out.features.values.insert(out.features.values.end(), row.begin(), row.begin() + label_col);
      out.features.values.insert(out.features.values.end(), row.begin() + label_col + 1, row.end());
      out.labels.push_back(row[label_col] != 0.0 ? 1 : 0);
      out.meta.push_back({m.date, m.meta[i].section, m.meta[i].origin_hour});
      out.eval_eligible.push_back(std::find(targets_only.begin(), targets_only.end(),
                                            m.meta[i].section) != targets_only.end());
    }
  }
  return out;
}

}  // namespace edcrowd
