#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqsearch/core/types.hpp"
#include "seqsearch/formats/text.hpp"

namespace seqsearch {

/// Index of a word inside an NgramModel's own vocabulary.
using LmWord = std::int32_t;

struct NgramEntry {
  std::vector<LmWord> words;
  double logprob = 0.0;              // natural log
  std::optional<double> backoff;     // natural log; absent means 0
};

/// Back-off n-gram language model. Probabilities are kept in natural log;
/// the ARPA file stores log10.
class NgramModel {
 public:
  int order() const { return static_cast<int>(tables_.size()); }
  const std::vector<std::string>& words() const { return words_; }

  std::optional<LmWord> word_index(std::string_view w) const {
    auto it = word_ids_.find(std::string(w));
    if (it == word_ids_.end()) return std::nullopt;
    return it->second;
  }

  /// Entries of order n (1-based), in file order.
  const std::vector<NgramEntry>& entries(int n) const { return tables_.at(n - 1).entries; }

  const NgramEntry* find(std::span<const LmWord> ngram) const {
    if (ngram.empty() || static_cast<int>(ngram.size()) > order()) return nullptr;
    const auto& table = tables_[ngram.size() - 1];
    auto it = table.index.find(Key(ngram.begin(), ngram.end()));
    return it == table.index.end() ? nullptr : &table.entries[it->second];
  }

  /// ln P(word | history) by the back-off recursion. Only the last
  /// order-1 history words are used; entries of `history` equal to -1 are
  /// words unknown to the model. nullopt if `word` is not even a unigram.
  std::optional<double> logprob(std::span<const LmWord> history, LmWord word) const {
    const std::size_t max_ctx = std::min<std::size_t>(history.size(), order() - 1);
    double acc = 0.0;
    std::vector<LmWord> key;
    for (std::size_t n = max_ctx + 1; n-- > 0;) {
      const auto ctx = history.subspan(history.size() - n);
      key.assign(ctx.begin(), ctx.end());
      key.push_back(word);
      if (const auto* e = find(key)) return acc + e->logprob;
      if (n > 0) {
        if (const auto* c = find(ctx)) acc += c->backoff.value_or(0.0);
      }
    }
    return std::nullopt;
  }

  /// Appends an entry; used by the parser and by fixture builders.
  void add(NgramEntry e) {
    const std::size_t n = e.words.size();
    if (n == 0) throw ValidationError("empty n-gram");
    if (tables_.size() < n) tables_.resize(n);
    auto& table = tables_[n - 1];
    Key key(e.words.begin(), e.words.end());
    if (table.index.contains(key)) throw ValidationError("duplicate " + std::to_string(n) + "-gram");
    table.index.emplace(std::move(key), table.entries.size());
    table.entries.push_back(std::move(e));
  }

  LmWord intern(std::string_view w) {
    auto [it, inserted] = word_ids_.emplace(std::string(w), static_cast<LmWord>(words_.size()));
    if (inserted) words_.emplace_back(w);
    return it->second;
  }

 private:
  using Key = std::vector<LmWord>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::size_t h = 0xcbf29ce484222325ULL;
      for (LmWord w : k) h = (h ^ static_cast<std::size_t>(w)) * 0x100000001b3ULL;
      return h;
    }
  };
  struct Table {
    std::vector<NgramEntry> entries;
    std::unordered_map<Key, std::size_t, KeyHash> index;
  };

  std::vector<Table> tables_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, LmWord> word_ids_;
};

inline constexpr double kLn10 = std::numbers::ln10;

/// Reads the standard ARPA layout (\data\, \N-grams:, \end\).
inline NgramModel parse_arpa(std::string_view content) {
  const auto all = text::lines(content);
  std::size_t i = 0;
  auto lineno = [&] { return i + 1; };

  while (i < all.size() && text::trim(all[i]) != "\\data\\") ++i;
  if (i == all.size()) throw ParseError(0, "missing \\data\\ header");
  ++i;

  std::vector<std::size_t> counts;
  for (; i < all.size(); ++i) {
    const auto line = text::trim(all[i]);
    if (line.empty()) continue;
    if (line.front() == '\\') break;
    if (!line.starts_with("ngram ")) throw ParseError(lineno(), "expected 'ngram N=count'");
    const auto spec = text::trim(line.substr(6));
    const auto eq = spec.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno(), "expected 'ngram N=count'");
    const auto n = text::require_int<int>(text::trim(spec.substr(0, eq)), lineno(), "n-gram order");
    const auto c = text::require_int<std::size_t>(text::trim(spec.substr(eq + 1)), lineno(), "n-gram count");
    if (n != static_cast<int>(counts.size()) + 1) throw ParseError(lineno(), "n-gram orders must be 1, 2, ... in sequence");
    counts.push_back(c);
  }
  if (counts.empty()) throw ParseError(lineno(), "\\data\\ section declares no n-gram counts");

  NgramModel model;
  std::vector<std::size_t> seen(counts.size(), 0);
  bool ended = false;
  while (i < all.size()) {
    const auto line = text::trim(all[i]);
    if (line.empty()) {
      ++i;
      continue;
    }
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (!(line.front() == '\\' && line.ends_with("-grams:"))) {
      throw ParseError(lineno(), "expected a \\N-grams: section header");
    }
    const auto n = text::require_int<int>(line.substr(1, line.size() - 8), lineno(), "section order");
    if (n < 1 || n > static_cast<int>(counts.size())) {
      throw ParseError(lineno(), "section for undeclared order " + std::to_string(n));
    }
    ++i;
    for (; i < all.size(); ++i) {
      const auto body = text::trim(all[i]);
      if (body.empty()) continue;
      if (body.front() == '\\') break;
      const auto fields = text::split_ws(body);
      if (fields.size() != static_cast<std::size_t>(n) + 1 && fields.size() != static_cast<std::size_t>(n) + 2) {
        throw ParseError(lineno(), "a " + std::to_string(n) + "-gram line needs " + std::to_string(n + 1) + " or " +
                                       std::to_string(n + 2) + " fields");
      }
      NgramEntry e;
      e.logprob = text::require_double(fields[0], lineno(), "log10 probability") * kLn10;
      for (int k = 1; k <= n; ++k) e.words.push_back(model.intern(fields[k]));
      if (fields.size() == static_cast<std::size_t>(n) + 2) {
        e.backoff = text::require_double(fields[n + 1], lineno(), "log10 back-off") * kLn10;
      }
      if (n > 1) {
        const std::vector<LmWord> hist(e.words.begin(), e.words.end() - 1);
        if (model.order() < n - 1 || model.find(hist) == nullptr) {
          throw ValidationError("history of the " + std::to_string(n) + "-gram on line " + std::to_string(lineno()) +
                                " is not a listed " + std::to_string(n - 1) + "-gram");
        }
      }
      try {
        model.add(std::move(e));
      } catch (const ValidationError& err) {
        throw ValidationError(std::string(err.what()) + " on line " + std::to_string(lineno()));
      }
      ++seen[n - 1];
    }
  }
  if (!ended) throw ParseError(0, "missing \\end\\ marker");
  for (std::size_t n = 0; n < counts.size(); ++n) {
    if (seen[n] != counts[n]) {
      throw ValidationError("\\data\\ declares ngram " + std::to_string(n + 1) + "=" + std::to_string(counts[n]) +
                            " but the section has " + std::to_string(seen[n]) + " entries");
    }
  }
  return model;
}

inline NgramModel load_arpa(const std::string& path) { return parse_arpa(text::read_file(path)); }

inline std::string serialize_arpa(const NgramModel& model) {
  std::string out = "\\data\\\n";
  for (int n = 1; n <= model.order(); ++n) {
    out += "ngram " + std::to_string(n) + "=" + std::to_string(model.entries(n).size()) + "\n";
  }
  for (int n = 1; n <= model.order(); ++n) {
    out += "\n\\" + std::to_string(n) + "-grams:\n";
    for (const auto& e : model.entries(n)) {
      out += text::format_weight(e.logprob / kLn10) + '\t';
      for (std::size_t k = 0; k < e.words.size(); ++k) {
        if (k) out += ' ';
        out += model.words()[e.words[k]];
      }
      if (e.backoff) out += '\t' + text::format_weight(*e.backoff / kLn10);
      out += '\n';
    }
  }
  out += "\n\\end\\\n";
  return out;
}

}  // namespace seqsearch
