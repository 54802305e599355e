#include "edcrowd/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "edcrowd/error.hpp"

namespace edcrowd {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 1)));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Smooth occupancy curve: `low` overnight, peaking at `high` around `peak`,
// rising faster than it decays.
std::array<double, 24> diurnal(double low, double high, double peak, double rise, double decay) {
  std::array<double, 24> out{};
  for (int h = 0; h < 24; ++h) {
    double d = h - peak;
    if (d < -12) d += 24;
    if (d > 12) d -= 24;
    const double w = d < 0 ? rise : decay;
    out[static_cast<std::size_t>(h)] = low + (high - low) * std::exp(-d * d / (2 * w * w));
  }
  return out;
}

SectionProfile profile(double low, double high, double peak_hour, double p, double median,
                       double loading) {
  SectionProfile s;
  s.base_curve = diurnal(low, high, peak_hour, 3.5, 4.5);
  s.weekday_multipliers = {1.05, 1.02, 1.0, 1.0, 0.98, 1.0, 1.0};
  s.weekend_damping = 0.86;
  s.surge_probability = p;
  s.surge_amplitude_median = median;
  s.surge_peak_hour = peak_hour;
  s.driver_loading = loading;
  return s;
}

Date nth_weekday_on_or_after(Date d, std::chrono::weekday wd) {
  while (std::chrono::weekday{d} != wd) d += std::chrono::days{1};
  return d;
}

// Anonymous Gregorian computus.
Date easter_sunday(int y) {
  const int a = y % 19, b = y / 100, c = y % 100, d = b / 4, e = b % 4;
  const int f = (b + 8) / 25, g = (b - f + 1) / 3, h = (19 * a + b - d - g + 15) % 30;
  const int i = c / 4, k = c % 4, l = (32 + 2 * e + 2 * i - h - k) % 7;
  const int m = (a + 11 * h + 22 * l) / 451;
  const int month = (h + l - 7 * m + 114) / 31, day = ((h + l - 7 * m + 114) % 31) + 1;
  return Date{std::chrono::year{y} / month / day};
}

}  // namespace

SynthConfig SynthConfig::defaults() {
  SynthConfig c;
  using enum Section;
  c.sections[index_of(Bedoccupying)] = profile(0.34, 0.79, 16.0, 0.32, 0.42, 0.90);
  c.sections[index_of(Medical)] = profile(0.32, 0.80, 15.0, 0.39, 0.42, 0.85);
  c.sections[index_of(Surgical)] = profile(0.30, 0.78, 17.0, 0.30, 0.42, 0.50);
  c.sections[index_of(Critical)] = profile(0.25, 0.70, 14.0, 0.12, 0.35, 0.30);
  return c;
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("synth config: " + what); };
  if (n_days < 60) fail("n_days must be >= 60 (warmup viability)");
  if (!(holiday_multiplier > 0)) fail("holiday_multiplier must be > 0");
  if (!(driver_persistence >= 0 && driver_persistence < 1)) fail("driver_persistence must be in [0,1)");
  for (const auto& s : sections) {
    for (double b : s.base_curve) {
      if (!(b > 0) || !std::isfinite(b)) fail("base curve values must be > 0");
    }
    for (double m : s.weekday_multipliers) {
      if (!(m > 0) || !std::isfinite(m)) fail("weekday multipliers must be > 0");
    }
    if (!(s.weekend_damping > 0)) fail("weekend_damping must be > 0");
    if (!(s.surge_probability >= 0 && s.surge_probability <= 1)) fail("surge_probability must be in [0,1]");
    if (!(s.surge_amplitude_median > 0) || !(s.surge_amplitude_log_sd >= 0) ||
        !(s.surge_amplitude_max > 0)) {
      fail("surge amplitude parameters must be positive");
    }
    if (!(s.surge_rise_hours > 0) || !(s.surge_decay_hours > 0)) fail("surge widths must be > 0");
    if (!(s.driver_loading >= 0 && s.driver_loading <= 1)) fail("driver_loading must be in [0,1]");
    if (!(s.ar_coefficient >= 0 && s.ar_coefficient < 1)) fail("ar_coefficient must be in [0,1)");
    if (!(s.ar_scale >= 0)) fail("ar_scale must be >= 0");
  }
  const auto& w = weather;
  if (!(w.temp_noise_sd >= 0) || !(w.diurnal_range >= 0) || !(w.mean_wet_precipitation > 0) ||
      !(w.wet_day_probability >= 0 && w.wet_day_probability <= 1) ||
      !(w.temp_persistence >= 0 && w.temp_persistence < 1) || !(w.snow_melt_per_degree >= 0) ||
      !std::isfinite(w.edor_coupling)) {
    fail("invalid weather model");
  }
}

std::vector<NamedHoliday> finnish_holidays(int first_year, int last_year) {
  using std::chrono::days;
  using std::chrono::year;
  std::vector<NamedHoliday> out;
  for (int y = first_year; y <= last_year; ++y) {
    const year yr{y};
    const Date easter = easter_sunday(y);
    const Date midsummer_eve = nth_weekday_on_or_after(Date{yr / 6 / 19}, std::chrono::Friday);
    const Date all_saints = nth_weekday_on_or_after(Date{yr / 10 / 31}, std::chrono::Saturday);
    out.push_back({Date{yr / 1 / 1}, "New Year's Day"});
    out.push_back({Date{yr / 1 / 6}, "Epiphany"});
    out.push_back({easter - days{2}, "Good Friday"});
    out.push_back({easter, "Easter Sunday"});
    out.push_back({easter + days{1}, "Easter Monday"});
    out.push_back({Date{yr / 5 / 1}, "May Day"});
    out.push_back({easter + days{39}, "Ascension Day"});
    out.push_back({midsummer_eve, "Midsummer Eve"});
    out.push_back({midsummer_eve + days{1}, "Midsummer Day"});
    out.push_back({all_saints, "All Saints' Day"});
    out.push_back({Date{yr / 12 / 6}, "Independence Day"});
    out.push_back({Date{yr / 12 / 24}, "Christmas Eve"});
    out.push_back({Date{yr / 12 / 25}, "Christmas Day"});
    out.push_back({Date{yr / 12 / 26}, "Boxing Day"});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const NamedHoliday& a, const NamedHoliday& b) { return a.date < b.date; });
  // May Day can coincide with Ascension Day; keep the first name.
  out.erase(std::unique(out.begin(), out.end(),
                        [](const NamedHoliday& a, const NamedHoliday& b) { return a.date == b.date; }),
            out.end());
  return out;
}

WeatherTable SynthData::weather_table() const {
  WeatherTable t;
  for (const auto& w : weather) t.emplace(w.date, w);
  return t;
}

SynthData generate(const SynthConfig& cfg) {
  cfg.validate();
  const auto n_days = static_cast<std::size_t>(cfg.n_days);
  const Date last = cfg.start + std::chrono::days{cfg.n_days - 1};
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<NamedHoliday> holiday_names;
  std::vector<Date> holiday_dates;
  if (cfg.generate_holidays) {
    const int y0 = static_cast<int>(std::chrono::year_month_day{cfg.start}.year());
    const int y1 = static_cast<int>(std::chrono::year_month_day{last}.year());
    for (auto& h : finnish_holidays(y0, y1)) {
      if (h.date < cfg.start || h.date > last) continue;
      holiday_dates.push_back(h.date);
      holiday_names.push_back(std::move(h));
    }
  }
  HolidayCalendar holidays(holiday_dates);

  // Weather, and its standardized temperature anomaly for optional coupling.
  const auto& wm = cfg.weather;
  std::vector<WeatherDay> weather;
  std::vector<double> temp_anomaly(n_days, 0.0);
  {
    auto rng = substream(cfg.seed, 100);
    double anomaly = 0.0, snow = 0.0;
    const double innovation = std::sqrt(1 - wm.temp_persistence * wm.temp_persistence);
    for (std::size_t i = 0; i < n_days; ++i) {
      const Date d = cfg.start + std::chrono::days{static_cast<long>(i)};
      const auto doy = (d - Date{std::chrono::year_month_day{d}.year() / 1 / 1}).count();
      const double season =
          wm.temp_annual_mean - wm.temp_amplitude * std::cos(2 * std::numbers::pi * (doy - 15) / 365.25);
      anomaly = wm.temp_persistence * anomaly + innovation * normal(rng);
      temp_anomaly[i] = anomaly;
      const double mean = season + wm.temp_noise_sd * anomaly;
      const double range = wm.diurnal_range * (0.7 + 0.6 * unit(rng));
      double precip = 0.0;
      if (unit(rng) < wm.wet_day_probability) {
        precip = -wm.mean_wet_precipitation * std::log1p(-unit(rng));
      }
      if (mean <= 0.0) snow += precip;  // mm water ~ cm snow
      snow = std::max(0.0, snow - wm.snow_melt_per_degree * std::max(0.0, mean));
      auto round1 = [](double x) { return std::round(x * 10) / 10; };
      weather.push_back({d, round1(precip), round1(snow), round1(mean + range / 2),
                         round1(mean - range / 2), round1(mean)});
    }
  }

  // Shared daily surge driver.
  std::vector<double> driver(n_days);
  {
    auto rng = substream(cfg.seed, 200);
    const double rho = cfg.driver_persistence;
    double z = normal(rng);
    for (std::size_t i = 0; i < n_days; ++i) {
      if (i > 0) z = rho * z + std::sqrt(1 - rho * rho) * normal(rng);
      driver[i] = z;
    }
  }

  SynthData out{{HourlySeries(Section::Bedoccupying, Hour{cfg.start}, {1.0}),
                 HourlySeries(Section::Medical, Hour{cfg.start}, {1.0}),
                 HourlySeries(Section::Surgical, Hour{cfg.start}, {1.0}),
                 HourlySeries(Section::Critical, Hour{cfg.start}, {1.0})},
                std::move(weather),
                std::move(holidays),
                std::move(holiday_names)};

  for (std::size_t si = 0; si < kNumSections; ++si) {
    const auto& p = cfg.sections[si];
    auto rng = substream(cfg.seed, si);
    // Surge amplitude per day; zero on ordinary days.
    std::vector<double> amplitude(n_days, 0.0);
    const double loading = p.driver_loading;
    const double idio = std::sqrt(1 - loading * loading);
    for (std::size_t i = 0; i < n_days; ++i) {
      const double y = loading * driver[i] + idio * normal(rng);
      const double a = std::min(p.surge_amplitude_max,
                                p.surge_amplitude_median * std::exp(p.surge_amplitude_log_sd * normal(rng)));
      if (normal_cdf(y) > 1.0 - p.surge_probability) amplitude[i] = a;
    }
    auto bump = [&](double dt) {
      const double sd = dt < 0 ? p.surge_rise_hours : p.surge_decay_hours;
      return std::exp(-dt * dt / (2 * sd * sd));
    };

    std::vector<double> values(n_days * 24);
    const double stationary_sd = p.ar_scale / std::sqrt(1 - p.ar_coefficient * p.ar_coefficient);
    double eta = stationary_sd * normal(rng);
    for (std::size_t i = 0; i < n_days; ++i) {
      const Date d = cfg.start + std::chrono::days{static_cast<long>(i)};
      const int wd = weekday_index(d);
      double day_mult = p.weekday_multipliers[static_cast<std::size_t>(wd)];
      if (wd >= 5) day_mult *= p.weekend_damping;
      if (out.holidays.contains(d)) day_mult *= cfg.holiday_multiplier;
      day_mult *= std::exp(wm.edor_coupling * temp_anomaly[i]);
      for (int h = 0; h < 24; ++h) {
        double surge = amplitude[i] * bump(h - p.surge_peak_hour);
        if (i > 0) surge += amplitude[i - 1] * bump(h + 24 - p.surge_peak_hour);
        eta = p.ar_coefficient * eta + p.ar_scale * normal(rng);
        const double v = p.base_curve[static_cast<std::size_t>(h)] * day_mult * (1 + surge) * std::exp(eta);
        values[i * 24 + static_cast<std::size_t>(h)] = std::max(0.0, v);
      }
    }
    out.series[si] = HourlySeries(kAllSections[si], Hour{cfg.start}, std::move(values));
  }
  return out;
}

bool CalibrationReport::passed() const {
  return std::all_of(sections.begin(), sections.end(), [](const auto& s) { return s.passed(); });
}

CalibrationReport calibration_report(const SectionSeries& series, const CrowdingConfig& cfg) {
  cfg.validate();
  CalibrationReport report;
  const DayLabels labels = label_all_days(series, cfg);
  if (labels.size() < 60) throw DataError("calibration needs at least 60 full days");
  for (std::size_t si = 0; si < kNumSections; ++si) {
    const Section s = kAllSections[si];
    SectionCalibration c;
    c.section = s;
    std::size_t crowded = 0, weekday_days = 0, weekday_crowded = 0, weekend_days = 0,
                weekend_crowded = 0;
    std::array<std::size_t, 24> hour_counts{};
    for (const auto& [date, day] : labels) {
      const bool is_crowded = day[si].crowded;
      crowded += is_crowded;
      if (weekday_index(date) >= 5) {
        ++weekend_days;
        weekend_crowded += is_crowded;
      } else {
        ++weekday_days;
        weekday_crowded += is_crowded;
      }
      const auto flags = hourly_crowding(series[si].day(date), cfg);
      for (std::size_t h = 0; h < 24; ++h) hour_counts[h] += flags[h];
    }
    c.days = labels.size();
    c.prevalence = static_cast<double>(crowded) / static_cast<double>(c.days);
    c.weekday_prevalence = weekday_days ? static_cast<double>(weekday_crowded) / weekday_days : 0.0;
    c.weekend_prevalence = weekend_days ? static_cast<double>(weekend_crowded) / weekend_days : 0.0;
    for (std::size_t h = 0; h < 24; ++h) {
      c.hourly_incidence[h] = static_cast<double>(hour_counts[h]) / static_cast<double>(c.days);
    }
    c.peak_hour = static_cast<int>(std::max_element(c.hourly_incidence.begin(), c.hourly_incidence.end()) -
                                   c.hourly_incidence.begin());
    if (is_target(s)) {
      c.target = kTargetPrevalence[si];
      c.prevalence_ok = std::abs(c.prevalence - *c.target) <= report.prevalence_tolerance;
      c.morning_ok = hour_counts[8] + hour_counts[9] + hour_counts[10] == 0;
      c.peak_ok = c.peak_hour >= 14 && c.peak_hour <= 18 && crowded > 0;
      c.weekend_ok = c.weekend_prevalence < c.weekday_prevalence;
    }
    report.sections.push_back(c);
  }
  return report;
}

}  // namespace edcrowd
