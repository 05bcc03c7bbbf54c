#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/decoders/decoder.hpp"

namespace seqsearch {

/// Estimate of the best achievable future score of a hypothesis given the
/// number of tokens it may still emit. Admissible iff it never
/// underestimates.
using HeuristicFn = std::function<double(const PartialHypothesis&, std::size_t remaining)>;

inline HeuristicFn zero_heuristic() {
  return [](const PartialHypothesis&, std::size_t) { return 0.0; };
}

/// Heuristic derived from predictors: each designated slot contributes its
/// best weighted token score at the hypothesis' current state. A negative
/// total bounds the whole future on its own, since every completion takes
/// at least one more step and later steps cannot add to a nonpositive
/// score; a positive total is scaled by the remaining length. Slots not
/// listed contribute nothing, which is only optimistic when their scores
/// are nonpositive.
inline HeuristicFn predictor_heuristic(std::vector<PredictorSlot> slots, std::vector<std::size_t> designated,
                                       Vocabulary vocab) {
  for (std::size_t i : designated) {
    if (i >= slots.size()) throw ConfigError("heuristic slot index out of range");
  }
  return [slots = std::move(slots), designated = std::move(designated), vocab](const PartialHypothesis& h,
                                                                                 std::size_t remaining) {
    if (remaining == 0) return 0.0;
    double per_step = 0.0;
    for (std::size_t i : designated) {
      auto& p = *slots[i].predictor;
      p.set_state(h.states.at(i));
      Posterior post;
      try {
        post = p.predict_next();
      } catch (const DeadHypothesisError&) {
        continue;
      }
      double best = weighted_score(slots[i].weight, post.default_score());
      for (const auto& [t, s] : post.entries()) {
        if (t != vocab.bos_id) best = std::max(best, weighted_score(slots[i].weight, s));
      }
      if (best > kNegInf) per_step += best;
    }
    return per_step <= 0.0 ? per_step : per_step * static_cast<double>(remaining);
  };
}

/// Best-first search ordered by score + heuristic. With an admissible
/// heuristic the first complete hypothesis popped is optimal.
class AStarDecoder : public Decoder {
 public:
  AStarDecoder(std::vector<PredictorSlot> slots, Vocabulary vocab, DecoderConfig config,
               HeuristicFn heuristic = zero_heuristic())
      : Decoder(std::move(slots), vocab, config), heuristic_(std::move(heuristic)) {}

  std::string name() const override { return "astar"; }

  SearchResult decode(const SourceSentence& src) override {
    std::priority_queue<Node, std::vector<Node>, Worse> queue;
    std::vector<PartialHypothesis> complete;
    std::vector<PartialHypothesis> seen_complete;  // fallback if the budget runs out
    auto push = [&](PartialHypothesis h) {
      const double f =
          h.complete() ? h.score : h.score + heuristic_(h, max_len_ > h.length() ? max_len_ - h.length() : 0);
      queue.push(Node{f, std::move(h)});
    };
    push(start(src));
    while (!queue.empty() && complete.size() < config_.nbest) {
      Node node = queue.top();
      queue.pop();
      if (node.hyp.complete()) {
        complete.push_back(std::move(node.hyp));
        continue;
      }
      if (!budget_left()) {
        stats_.truncated = true;
        break;
      }
      auto exps = try_expand(node.hyp);
      if (!exps) continue;
      for (const auto& e : *exps) {
        PartialHypothesis child = extend(node.hyp, e);
        if (child.complete()) seen_complete.push_back(child);
        push(std::move(child));
      }
    }
    if (complete.empty() && stats_.truncated) complete = std::move(seen_complete);
    return finish(std::move(complete));
  }

 private:
  struct Node {
    double f;
    PartialHypothesis hyp;
  };
  struct Worse {
    bool operator()(const Node& a, const Node& b) const {
      if (a.f != b.f) return a.f < b.f;
      return b.hyp.trajectory < a.hyp.trajectory;
    }
  };

  HeuristicFn heuristic_;
};

}  // namespace seqsearch
