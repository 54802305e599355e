#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "edcrowd/features.hpp"
#include "edcrowd/synthgen.hpp"

namespace edcrowd::cli {

// `timestamp,section,edor`; rows may come in any order. Each section must be
// contiguous between its first and last hour.
SectionSeries parse_edor(std::string_view text, const std::string& source);
SectionSeries ingest_edor(const std::filesystem::path& path);
void write_edor(const std::filesystem::path& path, const SectionSeries& series);

// `date,precipitation,snow_depth,temp_max,temp_min,temp_mean`; empty or
// non-numeric cells are rejected.
WeatherTable ingest_weather(const std::filesystem::path& path);
void write_weather(const std::filesystem::path& path, const std::vector<WeatherDay>& days);

// `date,name`
HolidayCalendar ingest_holidays(const std::filesystem::path& path);
void write_holidays(const std::filesystem::path& path, const std::vector<NamedHoliday>& holidays);

}  // namespace edcrowd::cli
