#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/core/hypothesis.hpp"
#include "seqsearch/core/predictor.hpp"
#include "seqsearch/core/types.hpp"
#include "seqsearch/formats/text.hpp"

namespace seqsearch {

struct DecoderConfig {
  /// Beam size n (also the small beam of bucket search).
  std::size_t beam_size = 5;
  /// Hard cap on the number of emitted tokens, eos included.
  std::size_t max_len = 100;
  /// If > 0, the per-sentence limit is min(max_len, ceil(factor * source length)).
  double max_len_factor = 3.0;
  std::optional<TokenId> sync_symbol;
  /// syncbeam: maximum tokens between two synchronization points.
  std::size_t sync_depth = 10;
  /// Expansion cap for dfs/restarting/astar/bucket/syncbeam; 0 = unlimited.
  std::size_t node_budget = 0;
  /// Promise that every combined step score is <= 0. Enables admissible
  /// pruning; violating it raises UsageError during search.
  bool nonpositive_scores = false;
  /// Maximum length of the returned n-best list.
  std::size_t nbest = 1;

  void validate() const {
    if (beam_size < 1) throw ConfigError("beam size must be >= 1");
    if (max_len < 1) throw ConfigError("max_len must be >= 1");
    if (sync_symbol && *sync_symbol == Vocabulary::kBos) throw ConfigError("sync symbol must not be bos");
    if (sync_depth < 1) throw ConfigError("sync_depth must be >= 1");
    if (nbest < 1) throw ConfigError("nbest must be >= 1");
    if (!(max_len_factor >= 0.0)) throw ConfigError("max_len_factor must be >= 0");
  }
};

struct SearchStats {
  std::size_t expansions = 0;  // predict_next rounds over the predictor list
  std::size_t pruned = 0;      // candidates dropped by admissible pruning
  std::size_t restarts = 0;    // restarting: descents after the first
  std::size_t passes = 0;      // bucket: beam passes
  bool truncated = false;      // node budget exhausted

  SearchStats& operator+=(const SearchStats& o) {
    expansions += o.expansions;
    pruned += o.pruned;
    restarts += o.restarts;
    passes += o.passes;
    truncated |= o.truncated;
    return *this;
  }
};

struct SearchResult {
  /// Complete hypotheses, best first (score desc, trajectory asc).
  std::vector<PartialHypothesis> nbest;
  SearchStats stats;

  bool failed() const { return nbest.empty(); }
  const PartialHypothesis& best() const {
    if (nbest.empty()) throw DeadHypothesisError("search produced no complete hypothesis");
    return nbest.front();
  }
};

/// Receives one line per search event (expansions and consumes).
using TraceFn = std::function<void(const std::string&)>;

/// Common machinery of all search strategies: predictor bookkeeping over
/// the slot list, the length limit, statistics and tracing.
class Decoder {
 public:
  Decoder(std::vector<PredictorSlot> slots, Vocabulary vocab, DecoderConfig config)
      : slots_(std::move(slots)), vocab_(vocab), config_(config) {
    if (slots_.empty()) throw ConfigError("decoder needs at least one predictor");
    for (const auto& s : slots_) {
      if (!s.predictor) throw ConfigError("null predictor in slot list");
      check_weight(s.weight);
    }
    config_.validate();
  }
  virtual ~Decoder() = default;

  virtual std::string name() const = 0;
  virtual SearchResult decode(const SourceSentence& src) = 0;

  void set_trace(TraceFn fn) { trace_ = std::move(fn); }
  const std::vector<PredictorSlot>& slots() const { return slots_; }
  const Vocabulary& vocab() const { return vocab_; }
  const DecoderConfig& config() const { return config_; }
  std::size_t max_len() const { return max_len_; }

 protected:
  /// Initializes every predictor for `src` and returns the root hypothesis.
  PartialHypothesis start(const SourceSentence& src) {
    validate_source(src);
    stats_ = SearchStats{};
    max_len_ = config_.max_len;
    if (config_.max_len_factor > 0.0) {
      const auto by_source = static_cast<std::size_t>(std::ceil(config_.max_len_factor * src.tokens.size()));
      max_len_ = std::max<std::size_t>(1, std::min(max_len_, by_source));
    }
    return initial_hypothesis(src, slots_);
  }

  bool budget_left() const { return config_.node_budget == 0 || stats_.expansions < config_.node_budget; }

  /// Scored continuations of `h` (see seqsearch::expand), restricted to eos
  /// once the length limit is reached. nullopt if `h` is dead.
  std::optional<std::vector<Expansion>> try_expand(const PartialHypothesis& h) {
    ++stats_.expansions;
    std::vector<Expansion> out;
    try {
      out = seqsearch::expand(h, slots_, vocab_);
    } catch (const DeadHypothesisError&) {
      trace("expand " + to_string(h.trajectory) + " -> dead");
      return std::nullopt;
    }
    if (h.length() + 1 >= max_len_) {
      std::erase_if(out, [&](const Expansion& e) { return e.token != vocab_.eos_id; });
    }
    if (config_.nonpositive_scores) {
      for (const auto& e : out) {
        if (e.score > 0.0) {
          throw UsageError("nonpositive_scores is set but token " + std::to_string(e.token) + " scores " +
                           std::to_string(e.score));
        }
      }
    }
    if (trace_) {
      std::string line = "expand " + to_string(h.trajectory) + " ->";
      for (const auto& e : out) line += ' ' + std::to_string(e.token) + ':' + text::format_weight(e.score);
      if (out.empty()) line += " dead";
      trace_(line);
    }
    if (out.empty()) return std::nullopt;
    return out;
  }

  PartialHypothesis extend(const PartialHypothesis& parent, const Expansion& e) {
    auto child = seqsearch::extend(parent, e, slots_);
    trace("consume " + to_string(child.trajectory) + " = " + text::format_weight(child.score));
    return child;
  }

  void trace(const std::string& line) const {
    if (trace_) trace_(line);
  }

  /// Sorts complete hypotheses and keeps the configured n-best.
  SearchResult finish(std::vector<PartialHypothesis> complete) {
    std::stable_sort(complete.begin(), complete.end(),
              [](const PartialHypothesis& a, const PartialHypothesis& b) { return better(a, b); });
    if (complete.size() > config_.nbest) complete.resize(config_.nbest);
    if (!complete.empty()) {
      trace("result " + to_string(complete.front().trajectory) + " = " + text::format_weight(complete.front().score));
    } else {
      trace("result failed");
    }
    return SearchResult{std::move(complete), stats_};
  }

  std::vector<PredictorSlot> slots_;
  Vocabulary vocab_;
  DecoderConfig config_;
  SearchStats stats_;
  std::size_t max_len_ = 0;
  TraceFn trace_;
};

}  // namespace seqsearch
