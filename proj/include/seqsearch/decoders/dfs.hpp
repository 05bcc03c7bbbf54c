#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/decoders/decoder.hpp"

namespace seqsearch {

/// Exhaustive depth-first search with backtracking through predictor
/// states. Children are visited best-first. Under nonpositive_scores a
/// branch whose partial score is <= the best complete score so far is cut.
class DfsDecoder : public Decoder {
 public:
  using Decoder::Decoder;

  std::string name() const override { return "dfs"; }

  SearchResult decode(const SourceSentence& src) override {
    best_.reset();
    found_.clear();
    visit(start(src));
    return finish(std::move(found_));
  }

 private:
  void visit(const PartialHypothesis& h) {
    if (!budget_left()) {
      stats_.truncated = true;
      return;
    }
    auto exps = try_expand(h);
    if (!exps) return;
    for (const auto& e : *exps) {
      const double score = h.score + e.score;
      if (config_.nonpositive_scores && best_ && score <= *best_) {
        ++stats_.pruned;
        continue;
      }
      PartialHypothesis child = extend(h, e);
      if (child.complete()) {
        if (!best_ || child.score > *best_) best_ = child.score;
        found_.push_back(std::move(child));
      } else {
        visit(child);
      }
      if (stats_.truncated) return;
    }
  }

  std::optional<double> best_;
  std::vector<PartialHypothesis> found_;
};

}  // namespace seqsearch
