#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/decoders/beam.hpp"
#include "seqsearch/decoders/decoder.hpp"

namespace seqsearch {

/// Restarting search: greedily descends to a complete hypothesis, parking
/// every sibling it passes in an open pool, then restarts from the best
/// open node. Under nonpositive_scores, open nodes that cannot beat the
/// incumbent are discarded, so the result equals the dfs optimum while the
/// early greedy incumbent tightens pruning.
class RestartingDecoder : public Decoder {
 public:
  using Decoder::Decoder;

  std::string name() const override { return "restarting"; }

  SearchResult decode(const SourceSentence& src) override {
    open_.clear();
    found_.clear();
    best_.reset();
    descend(start(src));
    while (!open_.empty() && !stats_.truncated) {
      auto node = open_.extract(open_.begin()).value();
      if (prunable(node.score)) {
        // The pool is ordered best-first: everything left is prunable too.
        stats_.pruned += 1 + open_.size();
        open_.clear();
        break;
      }
      ++stats_.restarts;
      PartialHypothesis h = extend(*node.parent, node.expansion);
      if (h.complete()) {
        record(std::move(h));
      } else {
        descend(std::move(h));
      }
    }
    return finish(std::move(found_));
  }

 private:
  struct ByRank {
    bool operator()(const Candidate& a, const Candidate& b) const { return better(a, b); }
  };

  bool prunable(double score) const { return config_.nonpositive_scores && best_ && score <= *best_; }

  void record(PartialHypothesis h) {
    if (!best_ || h.score > *best_) best_ = h.score;
    found_.push_back(std::move(h));
  }

  void descend(PartialHypothesis h) {
    while (true) {
      if (!budget_left()) {
        stats_.truncated = true;
        return;
      }
      auto parent = std::make_shared<const PartialHypothesis>(std::move(h));
      auto exps = try_expand(*parent);
      if (!exps) return;
      std::optional<Expansion> next;
      for (auto& e : *exps) {
        if (prunable(parent->score + e.score)) {
          ++stats_.pruned;
        } else if (!next) {
          next = std::move(e);
        } else {
          open_.insert(Candidate::of(parent, std::move(e)));
        }
      }
      if (!next) return;
      h = extend(*parent, *next);
      if (h.complete()) {
        record(std::move(h));
        return;
      }
    }
  }

  std::set<Candidate, ByRank> open_;
  std::vector<PartialHypothesis> found_;
  std::optional<double> best_;
};

}  // namespace seqsearch
