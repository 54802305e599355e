#include "edcrowd_cli/ingest.hpp"

#include <map>
#include <optional>
#include <set>

#include "edcrowd/error.hpp"
#include "edcrowd_cli/csv.hpp"

namespace edcrowd::cli {
namespace {

constexpr std::size_t kMaxListedGaps = 5;

Date field_date(const CsvDocument& doc, const CsvRecord& rec, std::size_t i) {
  const auto d = parse_date(rec.fields[i]);
  if (!d) throw DataError(doc.where(rec.line) + ": bad date '" + rec.fields[i] + "'");
  return *d;
}

SectionSeries edor_from_document(const CsvDocument& doc) {
  require_header(doc, {"timestamp", "section", "edor"});
  std::array<std::map<Hour, double>, kNumSections> values;
  for (const auto& rec : doc.records) {
    const auto t = parse_hour(rec.fields[0]);
    if (!t) throw DataError(doc.where(rec.line) + ": bad timestamp '" + rec.fields[0] + "'");
    const auto s = parse_section_code(rec.fields[1]);
    if (!s) throw DataError(doc.where(rec.line) + ": unknown section '" + rec.fields[1] + "'");
    const double v = parse_number(rec.fields[2], doc.where(rec.line));
    if (v < 0.0) throw DataError(doc.where(rec.line) + ": negative edor " + rec.fields[2]);
    if (!values[index_of(*s)].emplace(*t, v).second) {
      throw DataError(doc.where(rec.line) + ": duplicate row for " + rec.fields[0] + " section " +
                      rec.fields[1]);
    }
  }
  std::array<std::optional<HourlySeries>, kNumSections> built;
  for (std::size_t si = 0; si < kNumSections; ++si) {
    const auto code = std::string(section_code(kAllSections[si]));
    const auto& m = values[si];
    if (m.empty()) throw DataError(doc.source + ": no rows for section " + code);
    const Hour first = m.begin()->first;
    const Hour last = m.rbegin()->first;
    const auto span = static_cast<std::size_t>((last - first).count() + 1);
    if (span != m.size()) {
      std::string missing;
      std::size_t listed = 0;
      for (Hour t = first; t <= last && listed < kMaxListedGaps; t += std::chrono::hours{1}) {
        if (!m.contains(t)) {
          missing += (listed ? ", " : "") + format_hour(t);
          ++listed;
        }
      }
      const auto count = span - m.size();
      if (count > listed) missing += ", ...";
      throw DataError(doc.source + ": gap in section " + code + ": " + std::to_string(count) +
                      " missing hour(s): " + missing);
    }
    std::vector<double> v;
    v.reserve(m.size());
    for (const auto& [t, x] : m) v.push_back(x);
    built[si].emplace(kAllSections[si], first, std::move(v));
  }
  return {*built[0], *built[1], *built[2], *built[3]};
}

}  // namespace

SectionSeries parse_edor(std::string_view text, const std::string& source) {
  return edor_from_document(parse_csv(text, source));
}

SectionSeries ingest_edor(const std::filesystem::path& path) {
  return edor_from_document(read_csv(path));
}

void write_edor(const std::filesystem::path& path, const SectionSeries& series) {
  CsvWriter w(path, {"timestamp", "section", "edor"});
  Hour first = series[0].start();
  Hour last = series[0].end();
  for (const auto& s : series) {
    first = std::min(first, s.start());
    last = std::max(last, s.end());
  }
  for (Hour t = first; t < last; t += std::chrono::hours{1}) {
    for (const auto& s : series) {
      if (s.covers(t)) w.row({format_hour(t), std::string(section_code(s.section())), format_number(s.at(t))});
    }
  }
  w.close();
}

WeatherTable ingest_weather(const std::filesystem::path& path) {
  const auto doc = read_csv(path);
  require_header(doc, {"date", "precipitation", "snow_depth", "temp_max", "temp_min", "temp_mean"});
  WeatherTable out;
  for (const auto& rec : doc.records) {
    WeatherDay w;
    w.date = field_date(doc, rec, 0);
    double* slots[] = {&w.precipitation, &w.snow_depth, &w.temp_max, &w.temp_min, &w.temp_mean};
    for (std::size_t i = 0; i < 5; ++i) {
      if (rec.fields[i + 1].empty()) {
        throw DataError(doc.where(rec.line) + ": missing covariate " + doc.header[i + 1]);
      }
      *slots[i] = parse_number(rec.fields[i + 1], doc.where(rec.line));
    }
    if (!out.emplace(w.date, w).second) {
      throw DataError(doc.where(rec.line) + ": duplicate weather row for " + rec.fields[0]);
    }
  }
  return out;
}

void write_weather(const std::filesystem::path& path, const std::vector<WeatherDay>& days) {
  CsvWriter w(path, {"date", "precipitation", "snow_depth", "temp_max", "temp_min", "temp_mean"});
  for (const auto& d : days) {
    w.row({format_date(d.date), format_number(d.precipitation), format_number(d.snow_depth),
           format_number(d.temp_max), format_number(d.temp_min), format_number(d.temp_mean)});
  }
  w.close();
}

HolidayCalendar ingest_holidays(const std::filesystem::path& path) {
  const auto doc = read_csv(path);
  require_header(doc, {"date", "name"});
  std::vector<Date> dates;
  std::set<Date> seen;
  for (const auto& rec : doc.records) {
    const Date d = field_date(doc, rec, 0);
    if (!seen.insert(d).second) {
      throw DataError(doc.where(rec.line) + ": duplicate holiday " + rec.fields[0]);
    }
    dates.push_back(d);
  }
  return HolidayCalendar(dates);
}

void write_holidays(const std::filesystem::path& path, const std::vector<NamedHoliday>& holidays) {
  CsvWriter w(path, {"date", "name"});
  for (const auto& h : holidays) w.row({format_date(h.date), h.name});
  w.close();
}

}  // namespace edcrowd::cli
