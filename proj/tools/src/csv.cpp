#include "edcrowd_cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "edcrowd/error.hpp"

namespace edcrowd::cli {
namespace {

bool parse_version_comment(std::string_view line, int& version) {
  line.remove_prefix(1);
  while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
  constexpr std::string_view key = "format_version=";
  if (!line.starts_with(key)) return false;
  line.remove_prefix(key.size());
  while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) line.remove_suffix(1);
  const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), version);
  return ec == std::errc{} && ptr == line.data() + line.size();
}

}  // namespace

CsvDocument parse_csv(std::string_view text, const std::string& source) {
  CsvDocument doc;
  doc.source = source;
  std::size_t pos = 0;
  std::size_t line = 1;
  auto fail = [&](std::size_t at, const std::string& msg) -> void {
    throw DataError(source + ":" + std::to_string(at) + ": " + msg);
  };

  // Comment preamble.
  while (pos < text.size() && text[pos] == '#') {
    const auto eol = text.find('\n', pos);
    const auto end = eol == std::string_view::npos ? text.size() : eol;
    int version = 0;
    if (parse_version_comment(text.substr(pos, end - pos), version)) doc.format_version = version;
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line;
  }

  std::vector<CsvRecord> rows;
  while (pos < text.size()) {
    // Blank line.
    if (text[pos] == '\n' || (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n')) {
      pos += text[pos] == '\r' ? 2 : 1;
      ++line;
      continue;
    }
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool done = false;
    while (!done) {
      if (pos < text.size() && text[pos] == '"') {
        ++pos;
        const std::size_t opened = line;
        while (true) {
          if (pos >= text.size()) fail(opened, "unterminated quoted field");
          const char c = text[pos++];
          if (c == '"') {
            if (pos < text.size() && text[pos] == '"') {
              field.push_back('"');
              ++pos;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
          }
        }
        if (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          fail(line, "unexpected character after closing quote");
        }
      } else {
        while (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          if (text[pos] == '"') fail(line, "quote inside unquoted field");
          field.push_back(text[pos++]);
        }
      }
      rec.fields.push_back(std::move(field));
      field.clear();
      if (pos >= text.size()) {
        done = true;
      } else if (text[pos] == ',') {
        ++pos;
      } else {
        if (text[pos] == '\r') {
          ++pos;
          if (pos < text.size() && text[pos] != '\n') fail(line, "bare carriage return");
        }
        if (pos < text.size()) ++pos;
        ++line;
        done = true;
      }
    }
    rows.push_back(std::move(rec));
  }
  if (rows.empty()) fail(line, "missing header row");
  if (doc.format_version && *doc.format_version != kFormatVersion) {
    fail(rows.front().line - 1, "unsupported format_version " + std::to_string(*doc.format_version));
  }
  doc.header = std::move(rows.front().fields);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].fields.size() != doc.header.size()) {
      fail(rows[i].line, "expected " + std::to_string(doc.header.size()) + " fields, found " +
                             std::to_string(rows[i].fields.size()));
    }
    doc.records.push_back(std::move(rows[i]));
  }
  return doc;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

CsvDocument read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text_file(path), path.string());
}

void require_header(const CsvDocument& doc, std::initializer_list<std::string_view> expected,
                    bool allow_extra) {
  bool ok = doc.header.size() == expected.size() || (allow_extra && doc.header.size() > expected.size());
  std::size_t i = 0;
  for (auto name : expected) {
    if (!ok) break;
    ok = i < doc.header.size() && doc.header[i] == name;
    ++i;
  }
  if (!ok) {
    std::string want;
    for (auto name : expected) want += (want.empty() ? "" : ",") + std::string(name);
    throw DataError(doc.source + ": expected header '" + want + "'");
  }
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_number(std::string_view field, const std::string& where) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw DataError(where + ": not a number: '" + std::string(field) + "'");
  }
  return v;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  out_ << "# format_version=" << kFormatVersion << '\n';
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_field(fields[i]);
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw std::runtime_error("cannot write " + path_.string());
}

}  // namespace edcrowd::cli
