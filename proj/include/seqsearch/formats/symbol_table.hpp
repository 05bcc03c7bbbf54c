#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqsearch/core/types.hpp"
#include "seqsearch/formats/text.hpp"

namespace seqsearch {

/// Maps surface strings to token ids ("token<TAB>id" files). A table
/// without a file is numeric: words are decimal ids, plus the reserved
/// names <unk>, <s>, </s>.
class SymbolTable {
 public:
  static constexpr std::string_view kUnkSymbol = "<unk>";
  static constexpr std::string_view kBosSymbol = "<s>";
  static constexpr std::string_view kEosSymbol = "</s>";

  static SymbolTable numeric() { return SymbolTable(); }

  static SymbolTable parse(std::string_view content) {
    SymbolTable t;
    t.numeric_ = false;
    std::size_t lineno = 0;
    for (auto line : text::lines(content)) {
      ++lineno;
      if (text::trim(line).empty()) continue;
      const auto fields = text::split_ws(line);
      if (fields.size() != 2) throw ParseError(lineno, "symbol table lines are 'token<TAB>id'");
      const auto id = text::require_int<TokenId>(fields[1], lineno, "token id");
      if (id < 0) throw ParseError(lineno, "negative token id");
      const std::string word(fields[0]);
      if (t.to_id_.contains(word)) throw ValidationError("duplicate symbol '" + word + "'");
      if (static_cast<std::size_t>(id) >= t.to_word_.size()) t.to_word_.resize(id + 1);
      if (!t.to_word_[id].empty()) {
        throw ValidationError("token id " + std::to_string(id) + " assigned twice");
      }
      t.to_id_.emplace(word, id);
      t.to_word_[id] = word;
    }
    const std::pair<std::string_view, TokenId> reserved[] = {
        {kUnkSymbol, Vocabulary::kUnk}, {kBosSymbol, Vocabulary::kBos}, {kEosSymbol, Vocabulary::kEos}};
    for (auto [word, id] : reserved) {
      auto it = t.to_id_.find(std::string(word));
      if (it != t.to_id_.end() && it->second != id) {
        throw ValidationError(std::string(word) + " must have id " + std::to_string(id));
      }
      if (it == t.to_id_.end()) {
        if (static_cast<std::size_t>(id) < t.to_word_.size() && !t.to_word_[id].empty()) {
          throw ValidationError("reserved id " + std::to_string(id) + " used by '" + t.to_word_[id] + "'");
        }
        if (static_cast<std::size_t>(id) >= t.to_word_.size()) t.to_word_.resize(id + 1);
        t.to_id_.emplace(std::string(word), id);
        t.to_word_[id] = std::string(word);
      }
    }
    return t;
  }

  static SymbolTable load(const std::string& path) { return parse(text::read_file(path)); }

  bool is_numeric() const { return numeric_; }

  /// Id of `word`, or nullopt if unknown.
  std::optional<TokenId> find(std::string_view word) const {
    if (word == kUnkSymbol) return Vocabulary::kUnk;
    if (word == kBosSymbol) return Vocabulary::kBos;
    if (word == kEosSymbol) return Vocabulary::kEos;
    if (numeric_) {
      auto v = text::to_int<TokenId>(word);
      if (v && *v >= 0) return v;
      return std::nullopt;
    }
    auto it = to_id_.find(std::string(word));
    if (it == to_id_.end()) return std::nullopt;
    return it->second;
  }

  /// Id of `word`; unknown words map to unk.
  TokenId id(std::string_view word) const { return find(word).value_or(Vocabulary::kUnk); }

  std::string word(TokenId id) const {
    if (id == Vocabulary::kUnk) return std::string(kUnkSymbol);
    if (id == Vocabulary::kBos) return std::string(kBosSymbol);
    if (id == Vocabulary::kEos) return std::string(kEosSymbol);
    if (numeric_) return std::to_string(id);
    if (id < 0 || static_cast<std::size_t>(id) >= to_word_.size() || to_word_[id].empty()) {
      throw UsageError("no symbol for token id " + std::to_string(id));
    }
    return to_word_[id];
  }

  /// One past the largest id in the table (0 for numeric tables).
  TokenId bound() const { return static_cast<TokenId>(to_word_.size()); }

 private:
  SymbolTable() = default;

  bool numeric_ = true;
  std::unordered_map<std::string, TokenId> to_id_;
  std::vector<std::string> to_word_;
};

}  // namespace seqsearch
