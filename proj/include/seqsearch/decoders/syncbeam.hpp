#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/decoders/decoder.hpp"

namespace seqsearch {

/// Beam search that only compares hypotheses at synchronization points:
/// after the sync symbol (e.g. a word boundary) or eos. Between two
/// points every beam entry is extended best-first, at most sync_depth
/// tokens deep. Under nonpositive_scores the inner search stops as soon as
/// no open partial hypothesis can enter the n-best of the synchronized
/// ones; otherwise it is exhaustive within the depth cap.
class SyncBeamDecoder : public Decoder {
 public:
  SyncBeamDecoder(std::vector<PredictorSlot> slots, Vocabulary vocab, DecoderConfig config)
      : Decoder(std::move(slots), vocab, config) {
    if (!config_.sync_symbol) throw ConfigError("syncbeam needs a sync symbol");
  }

  std::string name() const override { return "syncbeam"; }

  SearchResult decode(const SourceSentence& src) override {
    const std::size_t n = config_.beam_size;
    std::vector<PartialHypothesis> beam{start(src)};
    while (!beam.front().complete()) {
      std::vector<PartialHypothesis> synced;
      std::set<Open, OpenOrder> open;
      for (auto& h : beam) {
        if (h.complete()) {
          synced.push_back(std::move(h));
        } else {
          open.insert(Open{std::move(h), 0});
        }
      }
      sort_hyps(synced);
      while (!open.empty()) {
        if (config_.nonpositive_scores && synced.size() >= n && open.begin()->hyp.score < synced[n - 1].score) {
          stats_.pruned += open.size();
          break;
        }
        if (!budget_left()) {
          stats_.truncated = true;
          break;
        }
        Open node = std::move(open.extract(open.begin()).value());
        auto exps = try_expand(node.hyp);
        if (!exps) continue;
        for (const auto& e : *exps) {
          PartialHypothesis child = extend(node.hyp, e);
          if (child.complete() || child.last() == *config_.sync_symbol) {
            synced.insert(std::upper_bound(synced.begin(), synced.end(), child,
                                           [](const PartialHypothesis& a, const PartialHypothesis& b) {
                                             return better(a, b);
                                           }),
                          std::move(child));
          } else if (node.depth + 1 < config_.sync_depth) {
            open.insert(Open{std::move(child), node.depth + 1});
          } else {
            ++stats_.pruned;
          }
        }
      }
      if (synced.empty()) {
        trace("syncbeam: no hypothesis reached a synchronization point");
        return finish({});
      }
      if (synced.size() > n) synced.resize(n);
      beam = std::move(synced);
      if (stats_.truncated) break;
    }
    std::vector<PartialHypothesis> complete;
    for (auto& h : beam) {
      if (h.complete()) complete.push_back(std::move(h));
    }
    return finish(std::move(complete));
  }

 private:
  struct Open {
    PartialHypothesis hyp;
    std::size_t depth;  // tokens since the last synchronization point
  };
  struct OpenOrder {
    bool operator()(const Open& a, const Open& b) const { return better(a.hyp, b.hyp); }
  };

  static void sort_hyps(std::vector<PartialHypothesis>& hs) {
    std::stable_sort(hs.begin(), hs.end(),
                     [](const PartialHypothesis& a, const PartialHypothesis& b) { return better(a, b); });
  }
};

}  // namespace seqsearch
