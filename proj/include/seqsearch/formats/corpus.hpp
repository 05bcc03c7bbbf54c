#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqsearch/core/types.hpp"
#include "seqsearch/formats/symbol_table.hpp"
#include "seqsearch/formats/text.hpp"

namespace seqsearch {

/// Plain tokenized text, one sentence per line. Used for source input,
/// references and bags. Every line (including blank ones) is a sentence;
/// a trailing newline does not add an empty last sentence.
inline std::vector<SourceSentence> parse_corpus(std::string_view content,
                                                const SymbolTable& symbols = SymbolTable::numeric()) {
  std::vector<SourceSentence> out;
  for (auto line : text::lines(content)) {
    SourceSentence s;
    s.id = out.size();
    for (auto w : text::split_ws(line)) {
      s.raw.emplace_back(w);
      s.tokens.push_back(symbols.id(w));
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<SourceSentence> load_corpus(const std::string& path,
                                               const SymbolTable& symbols = SymbolTable::numeric()) {
  return parse_corpus(text::read_file(path), symbols);
}

inline std::string detokenize(std::span<const TokenId> tokens, const SymbolTable& symbols) {
  std::string out;
  for (TokenId t : tokens) {
    if (t == Vocabulary::kBos || t == Vocabulary::kEos) continue;
    if (!out.empty()) out += ' ';
    out += symbols.word(t);
  }
  return out;
}

}  // namespace seqsearch
