#pragma once

// Internal text and CSV helpers.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hospsim/errors.hpp"

namespace hospsim::detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Comma-delimited, header row required, double-quoted fields allowed.
class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& path) : path_(path.string()), in_(path) {
    if (!in_) throw InputError("cannot open " + path_);
    std::string line;
    if (!next_line(line)) throw ParseError(path_, 1, "missing header row");
    header_ = split_fields(line);
    for (auto& h : header_) h = std::string(trim(h));
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
      if (header_[i] == name) return i;
    throw ParseError(path_, 1, "missing column '" + std::string(name) + "'");
  }
  std::optional<std::size_t> find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
      if (header_[i] == name) return i;
    return std::nullopt;
  }

  // Reads the next non-empty row; false at end of file.
  bool read(std::vector<std::string>& fields) {
    std::string line;
    while (next_line(line)) {
      if (trim(line).empty()) continue;
      fields = split_fields(line);
      if (fields.size() != header_.size())
        fail("expected " + std::to_string(header_.size()) + " fields, got " +
             std::to_string(fields.size()));
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_, line_, what); }

  double number(const std::vector<std::string>& f, std::size_t col) const {
    auto v = parse_double(f[col]);
    if (!v) fail("column '" + header_[col] + "': not a number: '" + f[col] + "'");
    return *v;
  }
  std::int64_t integer(const std::vector<std::string>& f, std::size_t col) const {
    auto v = parse_int(f[col]);
    if (!v) fail("column '" + header_[col] + "': not an integer: '" + f[col] + "'");
    return *v;
  }

 private:
  bool next_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::vector<std::string> split_fields(const std::string& line) const {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            cur += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        out.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (quoted) fail("unterminated quoted field");
    out.push_back(std::move(cur));
    return out;
  }

  std::string path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::size_t line_ = 0;
};

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace hospsim::detail
