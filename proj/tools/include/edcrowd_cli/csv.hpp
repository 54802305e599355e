#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edcrowd::cli {

inline constexpr int kFormatVersion = 1;

struct CsvRecord {
  std::size_t line = 0;  // 1-based line of the record's first character
  std::vector<std::string> fields;
};

struct CsvDocument {
  std::string source;
  std::optional<int> format_version;
  std::vector<std::string> header;
  std::vector<CsvRecord> records;

  std::string where(std::size_t line) const { return source + ":" + std::to_string(line); }
};

// RFC 4180 with LF or CRLF line ends. Leading lines starting with '#' are
// comments; "# format_version=N" among them is recorded. Blank lines are
// skipped. Every record must have as many fields as the header.
// Throws DataError("<source>:<line>: ...").
CsvDocument parse_csv(std::string_view text, const std::string& source);
CsvDocument read_csv(const std::filesystem::path& path);

// Throws DataError unless the header starts with `expected` (extra trailing
// columns are allowed when `allow_extra`).
void require_header(const CsvDocument& doc, std::initializer_list<std::string_view> expected,
                    bool allow_extra = false);

std::string csv_field(std::string_view value);

// Shortest decimal form that parses back to the same double.
std::string format_number(double value);
std::string format_fixed(double value, int decimals);
// Throws DataError("<where>: ...") unless the whole field is a finite number.
double parse_number(std::string_view field, const std::string& where);

class CsvWriter {
 public:
  // Writes the format_version comment and the header row.
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace edcrowd::cli
