#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "seqsearch/core/types.hpp"
#include "seqsearch/formats/symbol_table.hpp"
#include "seqsearch/formats/text.hpp"

namespace seqsearch {

/// External n-gram scores ("tok1 ... tokk : score" per line).
struct NgramTable {
  std::map<std::vector<TokenId>, double> scores;
  /// Duplicate entries are not errors; the later line wins and a note is kept here.
  std::vector<std::string> warnings;

  std::size_t max_order() const {
    std::size_t m = 0;
    for (const auto& [k, v] : scores) m = std::max(m, k.size());
    return m;
  }
};

inline NgramTable parse_ngram_table(std::string_view content, const SymbolTable& symbols = SymbolTable::numeric()) {
  NgramTable table;
  std::size_t lineno = 0;
  for (auto line : text::lines(content)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const auto colon = line.rfind(':');
    if (colon == std::string_view::npos) throw ParseError(lineno, "expected 'tok1 ... tokk : score'");
    const auto toks = text::split_ws(line.substr(0, colon));
    if (toks.empty()) throw ParseError(lineno, "n-gram has no tokens");
    std::vector<TokenId> key;
    for (auto t : toks) {
      auto id = symbols.find(t);
      if (!id) throw ParseError(lineno, "unknown token '" + std::string(t) + "'");
      key.push_back(*id);
    }
    const double score = text::require_double(text::trim(line.substr(colon + 1)), lineno, "score");
    auto [it, inserted] = table.scores.insert_or_assign(std::move(key), score);
    if (!inserted) table.warnings.push_back("line " + std::to_string(lineno) + ": duplicate n-gram, later score kept");
  }
  return table;
}

inline NgramTable load_ngram_table(const std::string& path, const SymbolTable& symbols = SymbolTable::numeric()) {
  return parse_ngram_table(text::read_file(path), symbols);
}

inline std::string serialize_ngram_table(const NgramTable& table, const SymbolTable& symbols = SymbolTable::numeric()) {
  std::string out;
  for (const auto& [key, score] : table.scores) {
    for (TokenId t : key) out += symbols.word(t) + ' ';
    out += ": " + text::format_weight(score) + '\n';
  }
  return out;
}

}  // namespace seqsearch
