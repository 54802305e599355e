#include "edcrowd/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "edcrowd/error.hpp"

namespace edcrowd {

namespace {

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

std::string_view section_code(Section s) {
  switch (s) {
    case Section::Bedoccupying: return "bed";
    case Section::Medical: return "med";
    case Section::Surgical: return "sur";
    case Section::Critical: return "cri";
  }
  return "?";
}

std::string_view section_name(Section s) {
  switch (s) {
    case Section::Bedoccupying: return "Bedoccupying";
    case Section::Medical: return "Medical";
    case Section::Surgical: return "Surgical";
    case Section::Critical: return "Critical";
  }
  return "?";
}

std::optional<Section> parse_section_code(std::string_view code) {
  for (Section s : kAllSections) {
    if (section_code(s) == code) return s;
  }
  return std::nullopt;
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_hour(Hour h) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "T%02d:00", hour_of_day(h));
  return format_date(date_of(h)) + buf;
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

std::optional<Hour> parse_hour(std::string_view text) {
  if (text.size() < 13) return std::nullopt;
  const auto date = parse_date(text.substr(0, 10));
  if (!date || (text[10] != 'T' && text[10] != ' ')) return std::nullopt;
  int hh = 0;
  if (!parse_int(text.substr(11, 2), hh) || hh < 0 || hh > 23) return std::nullopt;
  auto rest = text.substr(13);
  // Optional :MM and :SS, both must be zero.
  for (int part = 0; part < 2 && !rest.empty(); ++part) {
    int v = 0;
    if (rest.size() < 3 || rest[0] != ':' || !parse_int(rest.substr(1, 2), v) || v != 0) {
      return std::nullopt;
    }
    rest = rest.substr(3);
  }
  if (!rest.empty()) return std::nullopt;
  return at_hour(*date, hh);
}

HourlySeries::HourlySeries(Section section, Hour start, std::vector<double> values)
    : section_(section), start_(start), values_(std::move(values)) {
  if (values_.empty()) throw DataError("empty series");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw DataError("invalid EDOR value at " +
                      format_hour(start_ + std::chrono::hours{static_cast<long>(i)}));
    }
  }
}

double HourlySeries::at(Hour t) const {
  if (!covers(t)) {
    throw DataError("timestamp " + format_hour(t) + " outside series for section " +
                    std::string(section_code(section_)));
  }
  return values_[static_cast<std::size_t>((t - start_).count())];
}

HourlySeries HourlySeries::day(Date d) const {
  if (!covers_day(d)) throw DataError("incomplete day");
  const auto offset = static_cast<std::size_t>((at_hour(d, 0) - start_).count());
  const auto first = values_.begin() + static_cast<std::ptrdiff_t>(offset);
  return HourlySeries(section_, at_hour(d, 0), std::vector<double>(first, first + 24));
}

HourlySeries HourlySeries::with_value(Hour t, double value) const {
  if (!covers(t)) throw DataError("timestamp outside series");
  auto copy = values_;
  copy[static_cast<std::size_t>((t - start_).count())] = value;
  return HourlySeries(section_, start_, std::move(copy));
}

void CrowdingConfig::validate() const {
  if (!(edor_threshold > 0.0) || !std::isfinite(edor_threshold)) {
    throw DataError("edor_threshold must be > 0");
  }
  if (min_hours < 1 || min_hours > 24) throw DataError("min_hours must be in [1, 24]");
}

std::vector<bool> hourly_crowding(const HourlySeries& series, const CrowdingConfig& cfg) {
  cfg.validate();
  const auto values = series.values();
  std::vector<bool> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] >= cfg.edor_threshold;
  return out;
}

DayLabel label_day(const HourlySeries& series_for_day, const CrowdingConfig& cfg) {
  cfg.validate();
  if (series_for_day.size() != 24) throw DataError("incomplete day");
  const auto values = series_for_day.values();
  const int count = static_cast<int>(std::count_if(
      values.begin(), values.end(), [&](double v) { return v >= cfg.edor_threshold; }));
  return DayLabel{date_of(series_for_day.start()), series_for_day.section(),
                  count >= cfg.min_hours, count};
}

std::map<Section, double> daily_prevalence(std::span<const DayLabel> labels) {
  if (labels.empty()) throw DataError("no labels");
  std::array<std::size_t, kNumSections> total{};
  std::array<std::size_t, kNumSections> crowded{};
  for (const auto& l : labels) {
    ++total[index_of(l.section)];
    if (l.crowded) ++crowded[index_of(l.section)];
  }
  std::map<Section, double> out;
  for (Section s : kAllSections) {
    const auto i = index_of(s);
    if (total[i] > 0) out[s] = static_cast<double>(crowded[i]) / static_cast<double>(total[i]);
  }
  return out;
}

DayLabels label_all_days(const std::array<HourlySeries, kNumSections>& series,
                         const CrowdingConfig& cfg) {
  Hour lo = series[0].start();
  Hour hi = series[0].end();
  for (const auto& s : series) {
    lo = std::max(lo, s.start());
    hi = std::min(hi, s.end());
  }
  DayLabels out;
  if (hi <= lo) return out;
  for (Date d = date_of(lo); at_hour(d, 0) < hi; d += std::chrono::days{1}) {
    bool complete = true;
    for (const auto& s : series) complete = complete && s.covers_day(d);
    if (!complete) continue;
    std::array<DayLabel, kNumSections> row;
    for (Section s : kAllSections) row[index_of(s)] = label_day(series[index_of(s)].day(d), cfg);
    out.emplace(d, row);
  }
  return out;
}

}  // namespace edcrowd
