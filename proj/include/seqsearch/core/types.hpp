#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/core/error.hpp"

namespace seqsearch {

using TokenId = std::int32_t;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Reserved ids are fixed engine-wide; regular tokens start at 3.
struct Vocabulary {
  static constexpr TokenId kUnk = 0;
  static constexpr TokenId kBos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr TokenId kFirstRegular = 3;

  TokenId unk_id = kUnk;
  TokenId bos_id = kBos;
  TokenId eos_id = kEos;
  TokenId size = kFirstRegular;

  Vocabulary() = default;
  explicit Vocabulary(TokenId n) : size(n) {
    if (n < kFirstRegular) {
      throw ConfigError("vocabulary size must be at least 3 (unk, bos, eos)");
    }
  }

  bool contains(TokenId t) const { return t >= 0 && t < size; }
};

struct SourceSentence {
  /// Position of the sentence in the corpus; predictors with per-sentence
  /// resources (references, n-best lists, bags) index by it.
  std::size_t id = 0;
  std::vector<TokenId> tokens;
  std::vector<std::string> raw;
};

inline void validate_source(const SourceSentence& src) {
  if (src.tokens.empty()) throw UsageError("source sentence is empty");
  for (TokenId t : src.tokens) {
    if (t == Vocabulary::kBos || t == Vocabulary::kEos) {
      throw UsageError("source sentence contains a bos/eos token");
    }
  }
}

/// Sparse next-token distribution in the log domain (higher is better).
/// Tokens absent from `entries` score `default_score`, which may be -inf.
class Posterior {
 public:
  using Map = std::map<TokenId, double>;

  Posterior() = default;
  explicit Posterior(double default_score) : default_score_(default_score) {
    check_score(default_score);
  }
  Posterior(Map entries, double default_score)
      : entries_(std::move(entries)), default_score_(default_score) {
    check_score(default_score_);
    for (const auto& [t, s] : entries_) check_score(s);
  }

  double score(TokenId t) const {
    auto it = entries_.find(t);
    return it == entries_.end() ? default_score_ : it->second;
  }

  void set(TokenId t, double s) {
    check_score(s);
    entries_[t] = s;
  }

  const Map& entries() const { return entries_; }
  double default_score() const { return default_score_; }
  bool empty_support() const {
    if (default_score_ > kNegInf) return false;
    for (const auto& [t, s] : entries_) {
      if (s > kNegInf) return false;
    }
    return true;
  }

  bool operator==(const Posterior&) const = default;

 private:
  static void check_score(double s) {
    if (std::isnan(s) || s == std::numeric_limits<double>::infinity()) {
      throw UsageError("posterior scores must be finite or -inf");
    }
  }

  Map entries_;
  double default_score_ = kNegInf;
};

}  // namespace seqsearch
