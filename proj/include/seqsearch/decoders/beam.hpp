#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/decoders/decoder.hpp"

namespace seqsearch {

/// Repeated argmax-and-consume until eos.
class GreedyDecoder : public Decoder {
 public:
  using Decoder::Decoder;

  std::string name() const override { return "greedy"; }

  SearchResult decode(const SourceSentence& src) override {
    PartialHypothesis h = start(src);
    while (true) {
      auto exps = try_expand(h);
      if (!exps) return finish({});
      h = extend(h, exps->front());
      if (h.complete()) return finish({std::move(h)});
    }
  }
};

/// A scored but not yet consumed continuation of a live hypothesis.
struct Candidate {
  std::shared_ptr<const PartialHypothesis> parent;
  Expansion expansion;
  double score = 0.0;
  std::vector<TokenId> trajectory;

  static Candidate of(std::shared_ptr<const PartialHypothesis> parent, Expansion e) {
    Candidate c;
    c.score = parent->score + e.score;
    c.trajectory = parent->trajectory;
    c.trajectory.push_back(e.token);
    c.expansion = std::move(e);
    c.parent = std::move(parent);
    return c;
  }
};

inline bool better(const Candidate& a, const Candidate& b) {
  return better(a.score, a.trajectory, b.score, b.trajectory);
}

/// Beam search with the stopping rule "best hypothesis in the beam is
/// complete". Complete hypotheses keep their beam slot without expansion.
class BeamDecoder : public Decoder {
 public:
  using Decoder::Decoder;

  std::string name() const override { return "beam"; }

  SearchResult decode(const SourceSentence& src) override {
    std::vector<PartialHypothesis> beam{start(src)};
    run_pass(beam, config_.beam_size);
    std::vector<PartialHypothesis> complete;
    for (auto& h : beam) {
      if (h.complete()) complete.push_back(std::move(h));
    }
    return finish(std::move(complete));
  }

 protected:
  /// Called with every candidate that was scored but not selected.
  using DropFn = std::function<void(Candidate&&)>;
  /// Called with complete hypotheses that lose their beam slot.
  using DropHypFn = std::function<void(PartialHypothesis&&)>;

  /// Runs beam search from `beam` (sorted best-first on return). Returns
  /// false if the search stopped because the node budget ran out.
  bool run_pass(std::vector<PartialHypothesis>& beam, std::size_t n, const DropFn& dropped = nullptr,
                const DropHypFn& dropped_complete = nullptr, bool respect_budget = false) {
    sort_hyps(beam);
    while (!beam.empty() && !beam.front().complete()) {
      std::vector<Candidate> next;
      std::vector<PartialHypothesis> carried;
      for (auto& h : beam) {
        if (h.complete()) {
          carried.push_back(std::move(h));
          continue;
        }
        if (respect_budget && !budget_left()) {
          stats_.truncated = true;
          return false;
        }
        auto parent = std::make_shared<const PartialHypothesis>(std::move(h));
        auto exps = try_expand(*parent);
        if (!exps) continue;
        for (auto& e : *exps) next.push_back(Candidate::of(parent, std::move(e)));
      }
      // Merge carried complete hypotheses into the ranking as candidates
      // without an expansion.
      struct Ranked {
        double score;
        const std::vector<TokenId>* trajectory;
        int carried_index;
        int candidate_index;
      };
      std::vector<Ranked> ranked;
      for (std::size_t i = 0; i < carried.size(); ++i) {
        ranked.push_back({carried[i].score, &carried[i].trajectory, static_cast<int>(i), -1});
      }
      for (std::size_t i = 0; i < next.size(); ++i) {
        ranked.push_back({next[i].score, &next[i].trajectory, -1, static_cast<int>(i)});
      }
      std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        return better(a.score, *a.trajectory, b.score, *b.trajectory);
      });

      std::vector<PartialHypothesis> selected;
      for (std::size_t r = 0; r < ranked.size(); ++r) {
        const auto& item = ranked[r];
        if (r < n) {
          if (item.carried_index >= 0) {
            selected.push_back(std::move(carried[item.carried_index]));
          } else {
            const auto& c = next[item.candidate_index];
            selected.push_back(extend(*c.parent, c.expansion));
          }
        } else if (item.candidate_index >= 0) {
          if (dropped) dropped(std::move(next[item.candidate_index]));
        } else if (dropped_complete) {
          dropped_complete(std::move(carried[item.carried_index]));
        }
      }
      beam = std::move(selected);
      sort_hyps(beam);
    }
    return true;
  }

  static void sort_hyps(std::vector<PartialHypothesis>& hs) {
    std::stable_sort(hs.begin(), hs.end(), [](const PartialHypothesis& a, const PartialHypothesis& b) { return better(a, b); });
  }
};

}  // namespace seqsearch
