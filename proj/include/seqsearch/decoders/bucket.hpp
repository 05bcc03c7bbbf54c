#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/decoders/beam.hpp"

namespace seqsearch {

/// Iterative beam search. The first pass is a plain small-beam search;
/// every candidate a pass scores but does not keep is parked in the bucket
/// for its length. Later passes restart a small beam from the best parked
/// entry over all buckets until the node budget is spent or the buckets
/// are empty. Under nonpositive_scores, parked entries that cannot beat
/// the incumbent are discarded.
class BucketDecoder : public BeamDecoder {
 public:
  using BeamDecoder::BeamDecoder;

  std::string name() const override { return "bucket"; }

  SearchResult decode(const SourceSentence& src) override {
    buckets_.clear();
    found_.clear();
    best_.reset();

    auto park = [this](Candidate&& c) {
      const std::size_t len = c.trajectory.size() - 1;
      if (buckets_.size() <= len) buckets_.resize(len + 1);
      buckets_[len].push_back(Entry{std::move(c), nullptr});
    };
    auto park_complete = [this](PartialHypothesis&& h) { park_hyp(std::move(h)); };

    std::vector<PartialHypothesis> beam{start(src)};
    ++stats_.passes;
    run_pass(beam, config_.beam_size, park, park_complete);
    settle(beam);

    while (budget_left()) {
      auto entry = pop_best();
      if (!entry) break;
      PartialHypothesis h = entry->hyp ? std::move(*entry->hyp) : extend(*entry->candidate.parent, entry->candidate.expansion);
      if (h.complete()) {
        record(h);
        continue;
      }
      ++stats_.passes;
      beam = {std::move(h)};
      if (!run_pass(beam, config_.beam_size, park, park_complete, true)) break;
      settle(beam);
    }
    if (!budget_left() && has_entries()) stats_.truncated = true;
    return finish(std::move(found_));
  }

 private:
  /// A parked candidate, or (hyp != nullptr) an already consumed
  /// hypothesis left unexpanded when a pass stopped.
  struct Entry {
    Candidate candidate;
    std::shared_ptr<PartialHypothesis> hyp;
  };

  void record(const PartialHypothesis& h) {
    if (!best_ || h.score > *best_) best_ = h.score;
    found_.push_back(h);
  }

  /// End of a pass: complete hypotheses update the incumbent, the
  /// unexpanded rest is parked.
  void settle(std::vector<PartialHypothesis>& beam) {
    for (auto& h : beam) {
      if (h.complete()) {
        record(h);
      } else {
        park_hyp(std::move(h));
      }
    }
  }

  void park_hyp(PartialHypothesis&& h) {
    const std::size_t len = h.length();
    if (buckets_.size() <= len) buckets_.resize(len + 1);
    Entry e;
    e.candidate.score = h.score;
    e.candidate.trajectory = h.trajectory;
    e.hyp = std::make_shared<PartialHypothesis>(std::move(h));
    buckets_[len].push_back(std::move(e));
  }

  bool has_entries() const {
    for (const auto& b : buckets_) {
      if (!b.empty()) return true;
    }
    return false;
  }

  /// Removes and returns the highest-scoring entry over all buckets,
  /// discarding entries that cannot beat the incumbent.
  std::optional<Entry> pop_best() {
    const bool prune = config_.nonpositive_scores && best_;
    std::size_t best_bucket = 0, best_index = 0;
    bool found = false;
    for (std::size_t b = 0; b < buckets_.size(); ++b) {
      auto& bucket = buckets_[b];
      if (prune) {
        stats_.pruned += std::erase_if(bucket, [&](const Entry& e) { return e.candidate.score <= *best_; });
      }
      for (std::size_t i = 0; i < bucket.size(); ++i) {
        if (!found || better(bucket[i].candidate, buckets_[best_bucket][best_index].candidate)) {
          best_bucket = b;
          best_index = i;
          found = true;
        }
      }
    }
    if (!found) return std::nullopt;
    auto& bucket = buckets_[best_bucket];
    Entry out = std::move(bucket[best_index]);
    bucket.erase(bucket.begin() + static_cast<std::ptrdiff_t>(best_index));
    return out;
  }

  std::vector<std::vector<Entry>> buckets_;
  std::vector<PartialHypothesis> found_;
  std::optional<double> best_;
};

}  // namespace seqsearch
