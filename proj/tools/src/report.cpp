#include "edcrowd_cli/report.hpp"

#include <map>
#include <sstream>

#include "edcrowd_cli/csv.hpp"

namespace edcrowd::cli {
namespace {

std::string cell(const std::optional<double>& v, int decimals) {
  return v ? format_fixed(*v, decimals) : "NA";
}

std::string cell_with_ci(const std::optional<metrics::MetricWithCI>& m, int decimals) {
  if (!m) return "NA";
  return format_fixed(m->point, decimals) + " (" + format_fixed(m->ci_low, decimals) + "-" +
         format_fixed(m->ci_high, decimals) + ")";
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

void write_metrics_csv(const std::filesystem::path& path, const EvalReport& report, int decimals) {
  CsvWriter w(path, kMetricsHeader);
  for (const auto& c : report.cells) {
    const auto& r = c.rates;
    w.row({std::string(section_name(c.section)), std::to_string(c.origin),
           format_fixed(r.f1, decimals), cell(r.tpr, decimals), cell(r.tnr, decimals),
           cell(r.ppv, decimals), cell(r.npv, decimals), cell(r.fpr, decimals),
           cell(r.fnr, decimals), format_fixed(r.acc, decimals), cell_with_ci(c.auroc, decimals),
           cell_with_ci(c.auprc, decimals)});
  }
  w.close();
}

void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<PredictionRecord>& records) {
  CsvWriter w(path, {"date", "section", "origin", "probability", "label"});
  for (const auto& r : records) {
    w.row({format_date(r.date), std::string(section_code(r.section)), std::to_string(r.origin_hour),
           format_number(r.probability), r.true_label ? "1" : "0"});
  }
  w.close();
}

void write_outcomes_csv(const std::filesystem::path& path, const EvalReport& report) {
  CsvWriter w(path, {"date", "section", "origin", "outcome", "probability", "label"});
  for (const auto& o : report.outcomes) {
    w.row({format_date(o.date), std::string(section_code(o.section)),
           std::to_string(report.outcome_origin), std::string(outcome_code(o.outcome)),
           format_number(o.probability), o.label ? "1" : "0"});
  }
  w.close();
}

void write_roc_pr_points(const std::filesystem::path& path,
                         const std::vector<PredictionRecord>& records) {
  CsvWriter w(path, {"section", "origin", "threshold", "tpr", "fpr", "precision", "recall"});
  for (Section s : kTargetSections) {
    for (int origin : kForecastOrigins) {
      std::vector<PredictionRecord> cell;
      for (const auto& r : records) {
        if (r.section == s && r.origin_hour == origin) cell.push_back(r);
      }
      if (cell.empty()) continue;
      for (const auto& p : metrics::threshold_curve(cell)) {
        w.row({std::string(section_code(s)), std::to_string(origin), format_number(p.threshold),
               format_number(p.tpr), format_number(p.fpr), format_number(p.precision),
               format_number(p.recall)});
      }
    }
  }
  w.close();
}

void write_fits_csv(const std::filesystem::path& path, const std::vector<FitInfo>& fits) {
  CsvWriter w(path, {"first_scored_day", "scored_days", "training_rows", "last_training_day"});
  for (const auto& f : fits) {
    w.row({format_date(f.test_day), std::to_string(f.scored_days), std::to_string(f.training_rows),
           format_date(f.last_training_day)});
  }
  w.close();
}

void write_calibration_csv(const std::filesystem::path& path, const CalibrationReport& report) {
  std::vector<std::string> header = {"section",       "days",          "prevalence",
                                     "target",        "lower",         "upper",
                                     "prevalence_ok", "weekday_prevalence", "weekend_prevalence",
                                     "weekend_ok",    "peak_hour",     "peak_ok",
                                     "morning_ok"};
  for (int h = 0; h < 24; ++h) header.push_back("incidence_h" + std::string(h < 10 ? "0" : "") + std::to_string(h));
  CsvWriter w(path, header);
  auto flag = [](bool b) { return std::string(b ? "pass" : "FAIL"); };
  for (const auto& s : report.sections) {
    std::vector<std::string> row = {std::string(section_code(s.section)), std::to_string(s.days),
                                    format_fixed(s.prevalence, 4)};
    if (s.target) {
      row.push_back(format_fixed(*s.target, 2));
      row.push_back(format_fixed(*s.target - report.prevalence_tolerance, 2));
      row.push_back(format_fixed(*s.target + report.prevalence_tolerance, 2));
    } else {
      row.insert(row.end(), {"NA", "NA", "NA"});
    }
    const bool banded = s.target.has_value();
    row.push_back(banded ? flag(s.prevalence_ok) : "NA");
    row.push_back(format_fixed(s.weekday_prevalence, 4));
    row.push_back(format_fixed(s.weekend_prevalence, 4));
    row.push_back(banded ? flag(s.weekend_ok) : "NA");
    row.push_back(std::to_string(s.peak_hour));
    row.push_back(banded ? flag(s.peak_ok) : "NA");
    row.push_back(banded ? flag(s.morning_ok) : "NA");
    for (double v : s.hourly_incidence) row.push_back(format_fixed(v, 4));
    w.row(row);
  }
  w.close();
}

void write_shap_groups_csv(const std::filesystem::path& path,
                           const std::vector<explain::GroupScore>& scores) {
  CsvWriter w(path, {"group", "mean_abs_shap", "rank"});
  for (const auto& s : scores) {
    w.row({s.group, format_number(s.mean_abs_shap), std::to_string(s.rank)});
  }
  w.close();
}

std::string render_calendar_svg(Section section, const DateRange& days,
                                const std::vector<DayOutcome>& outcomes, int origin,
                                const CalendarColors& colors) {
  using namespace std::chrono;
  constexpr int cell = 12, gap = 2, left = 40, top = 40, year_height = 7 * (cell + gap) + 28;
  std::map<Date, Outcome> by_date;
  for (const auto& o : outcomes) {
    if (o.section == section) by_date[o.date] = o.outcome;
  }
  const int y0 = static_cast<int>(year_month_day{days.first}.year());
  const int y1 = static_cast<int>(year_month_day{days.last}.year());
  const int width = left + 54 * (cell + gap) + 20;
  const int height = top + (y1 - y0 + 1) * year_height + 40;

  auto color_of = [&](const Outcome* o) -> const std::string& {
    if (!o) return colors.missing;
    switch (*o) {
      case Outcome::TruePositive: return colors.true_positive;
      case Outcome::FalsePositive: return colors.false_positive;
      case Outcome::TrueNegative: return colors.true_negative;
      case Outcome::FalseNegative: return colors.false_negative;
    }
    return colors.missing;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<!-- format_version=1 -->\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n"
      << "<title>" << xml_escape(section_name(section)) << ", forecast origin " << origin
      << ":00</title>\n";
  static constexpr const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                            "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  static constexpr const char* kDays[] = {"Mon", "", "Wed", "", "Fri", "", "Sun"};
  for (int y = y0; y <= y1; ++y) {
    const int base_y = top + (y - y0) * year_height;
    const Date jan1{year{y} / 1 / 1};
    const int jan1_wd = weekday_index(jan1);
    svg << "<text x=\"2\" y=\"" << base_y - 6 << "\" font-weight=\"bold\">" << y << "</text>\n";
    for (int r = 0; r < 7; ++r) {
      if (*kDays[r]) {
        svg << "<text x=\"4\" y=\"" << base_y + r * (cell + gap) + cell - 2 << "\">" << kDays[r]
            << "</text>\n";
      }
    }
    for (unsigned m = 1; m <= 12; ++m) {
      const Date first{year{y} / month{m} / 1};
      const int col = static_cast<int>(((first - jan1).count() + jan1_wd) / 7);
      svg << "<text x=\"" << left + col * (cell + gap) << "\" y=\"" << base_y + 7 * (cell + gap) + 10
          << "\">" << kMonths[m - 1] << "</text>\n";
    }
    const Date lo = std::max(days.first, jan1);
    const Date hi = std::min(days.last, Date{year{y} / 12 / 31});
    for (Date d = lo; d <= hi; d += std::chrono::days{1}) {
      const int col = static_cast<int>(((d - jan1).count() + jan1_wd) / 7);
      const int row = weekday_index(d);
      const auto it = by_date.find(d);
      const Outcome* o = it == by_date.end() ? nullptr : &it->second;
      svg << "<rect class=\"day\" x=\"" << left + col * (cell + gap) << "\" y=\""
          << base_y + row * (cell + gap) << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"" << xml_escape(color_of(o)) << "\" data-date=\"" << format_date(d)
          << "\" data-outcome=\"" << (o ? outcome_code(*o) : std::string_view("NA")) << "\"><title>"
          << format_date(d) << " " << (o ? outcome_code(*o) : std::string_view("NA"))
          << "</title></rect>\n";
    }
  }
  const int legend_y = height - 24;
  const std::pair<const char*, Outcome> legend[] = {
      {"TP", Outcome::TruePositive}, {"FP", Outcome::FalsePositive},
      {"TN", Outcome::TrueNegative}, {"FN", Outcome::FalseNegative}};
  int x = left;
  for (const auto& [label, o] : legend) {
    svg << "<rect class=\"legend\" x=\"" << x << "\" y=\"" << legend_y << "\" width=\"" << cell
        << "\" height=\"" << cell << "\" fill=\"" << xml_escape(color_of(&o)) << "\"/>\n"
        << "<text x=\"" << x + cell + 4 << "\" y=\"" << legend_y + cell - 2 << "\">" << label
        << "</text>\n";
    x += 50;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace edcrowd::cli
