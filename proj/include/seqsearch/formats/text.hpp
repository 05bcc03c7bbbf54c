#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "seqsearch/core/error.hpp"

namespace seqsearch::text {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> lines(std::string_view content) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    out.push_back(content.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

inline std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  // from_chars does not accept the spellings ARPA writers use for -inf.
  if (s == "-inf" || s == "-Infinity" || s == "-infinity") return -INFINITY;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || std::isnan(v)) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> to_int(std::string_view s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline double require_double(std::string_view s, std::size_t line, std::string_view what) {
  auto v = to_double(s);
  if (!v) throw ParseError(line, "invalid " + std::string(what) + " '" + std::string(s) + "'");
  return *v;
}

template <typename Int>
Int require_int(std::string_view s, std::size_t line, std::string_view what) {
  auto v = to_int<Int>(s);
  if (!v) throw ParseError(line, "invalid " + std::string(what) + " '" + std::string(s) + "'");
  return *v;
}

/// Canonical weight rendering used by every writer: fixed, 6 decimals.
inline std::string format_weight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", w);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace seqsearch::text
