#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqsearch/core/types.hpp"
#include "seqsearch/formats/symbol_table.hpp"
#include "seqsearch/formats/text.hpp"

namespace seqsearch {

struct NbestEntry {
  std::size_t sentence_id = 0;
  std::vector<TokenId> tokens;  // no bos/eos
  std::vector<std::pair<std::string, double>> features;
  double total = 0.0;

  bool operator==(const NbestEntry&) const = default;
};

/// Moses-style n-best list: "id ||| tokens ||| name=value ... ||| total".
class NbestList {
 public:
  NbestList() = default;
  explicit NbestList(std::vector<NbestEntry> entries) : entries_(std::move(entries)) {}

  const std::vector<NbestEntry>& entries() const { return entries_; }

  /// Entries of one sentence in file order (empty if none).
  std::vector<NbestEntry> sentence(std::size_t id) const {
    std::vector<NbestEntry> out;
    for (const auto& e : entries_) {
      if (e.sentence_id == id) out.push_back(e);
    }
    return out;
  }

  std::map<std::size_t, std::vector<NbestEntry>> grouped() const {
    std::map<std::size_t, std::vector<NbestEntry>> out;
    for (const auto& e : entries_) out[e.sentence_id].push_back(e);
    return out;
  }

  bool operator==(const NbestList&) const = default;

 private:
  std::vector<NbestEntry> entries_;
};

namespace detail {
inline std::vector<std::string_view> split_bars(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find("|||", start);
    if (pos == std::string_view::npos) {
      out.push_back(text::trim(line.substr(start)));
      return out;
    }
    out.push_back(text::trim(line.substr(start, pos - start)));
    start = pos + 3;
  }
}
}  // namespace detail

inline NbestList parse_nbest(std::string_view content, const SymbolTable& symbols = SymbolTable::numeric()) {
  std::vector<NbestEntry> entries;
  std::size_t lineno = 0;
  for (auto line : text::lines(content)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const auto fields = detail::split_bars(line);
    if (fields.size() != 4) {
      throw ParseError(lineno, "n-best lines need 4 '|||'-separated fields, got " + std::to_string(fields.size()));
    }
    NbestEntry e;
    e.sentence_id = text::require_int<std::size_t>(fields[0], lineno, "sentence id");
    for (auto w : text::split_ws(fields[1])) e.tokens.push_back(symbols.id(w));
    if (e.tokens.empty()) throw ParseError(lineno, "empty token sequence");
    for (auto f : text::split_ws(fields[2])) {
      const auto eq = f.find('=');
      if (eq == std::string_view::npos || eq == 0) throw ParseError(lineno, "features must be 'name=value'");
      e.features.emplace_back(std::string(f.substr(0, eq)),
                              text::require_double(f.substr(eq + 1), lineno, "feature value"));
    }
    e.total = text::require_double(fields[3], lineno, "total score");
    entries.push_back(std::move(e));
  }
  return NbestList(std::move(entries));
}

inline NbestList load_nbest(const std::string& path, const SymbolTable& symbols = SymbolTable::numeric()) {
  return parse_nbest(text::read_file(path), symbols);
}

inline std::string format_nbest_line(const NbestEntry& e, const SymbolTable& symbols = SymbolTable::numeric()) {
  std::string out = std::to_string(e.sentence_id) + " |||";
  for (TokenId t : e.tokens) out += ' ' + symbols.word(t);
  out += " |||";
  for (const auto& [name, value] : e.features) out += ' ' + name + '=' + text::format_weight(value);
  out += " ||| " + text::format_weight(e.total) + '\n';
  return out;
}

inline std::string serialize_nbest(const NbestList& list, const SymbolTable& symbols = SymbolTable::numeric()) {
  std::string out;
  for (const auto& e : list.entries()) out += format_nbest_line(e, symbols);
  return out;
}

}  // namespace seqsearch
