#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/core/predictor.hpp"
#include "seqsearch/formats/nbest.hpp"

namespace seqsearch {

namespace detail {
inline std::vector<TokenId> with_eos(std::vector<TokenId> seq) {
  if (seq.empty() || seq.back() != Vocabulary::kEos) seq.push_back(Vocabulary::kEos);
  return seq;
}

template <typename T>
const T& per_sentence(const std::vector<T>& items, std::size_t id, const std::string& who) {
  if (items.size() == 1) return items.front();
  if (id >= items.size()) {
    throw UsageError(who + ": no entry for sentence " + std::to_string(id) + " (have " +
                     std::to_string(items.size()) + ")");
  }
  return items[id];
}
}  // namespace detail

/// Forced decoding: only the next reference token is allowed.
class ForcedPredictor : public Predictor {
 public:
  struct State {
    std::size_t position = 0;
    bool dead = false;
  };

  /// One reference per sentence id; a single reference applies to all.
  explicit ForcedPredictor(std::shared_ptr<const std::vector<std::vector<TokenId>>> references)
      : references_(std::move(references)) {}
  explicit ForcedPredictor(std::vector<TokenId> reference)
      : ForcedPredictor(std::make_shared<const std::vector<std::vector<TokenId>>>(
            std::vector<std::vector<TokenId>>{std::move(reference)})) {}

  std::string name() const override { return "forced"; }

 protected:
  void do_initialize(const SourceSentence& src) override {
    reference_ = detail::with_eos(detail::per_sentence(*references_, src.id, name()));
    state_ = State{};
  }
  PredictorState do_get_state() const override { return PredictorState::of(state_); }
  void do_set_state(const PredictorState& s) override { state_ = s.as<State>(name()); }
  Posterior do_predict_next() override {
    if (state_.dead || state_.position >= reference_.size()) {
      throw DeadHypothesisError("forced: hypothesis left the reference");
    }
    Posterior p(kNegInf);
    p.set(reference_[state_.position], 0.0);
    return p;
  }
  void do_consume(TokenId token) override {
    if (state_.dead || state_.position >= reference_.size() || reference_[state_.position] != token) {
      state_.dead = true;
      return;
    }
    ++state_.position;
  }

 private:
  std::shared_ptr<const std::vector<std::vector<TokenId>>> references_;
  std::vector<TokenId> reference_;
  State state_;
};

enum class NbestMode { kAcceptOnly, kRescore };

/// n-best list rescoring: hypotheses are restricted to a prefix trie of the
/// sentence's n-best entries. In rescore mode the eos step of a complete
/// entry scores the entry's stored total.
class ForcedLstPredictor : public Predictor {
 public:
  struct State {
    int node = 0;  // -1: off the trie
  };

  ForcedLstPredictor(std::shared_ptr<const NbestList> list, NbestMode mode)
      : list_(std::move(list)), mode_(mode) {}

  std::string name() const override { return "forcedlst"; }

 protected:
  void do_initialize(const SourceSentence& src) override {
    auto entries = list_->sentence(src.id);
    if (entries.empty()) throw UsageError("forcedlst: empty n-best list for sentence " + std::to_string(src.id));
    trie_.assign(1, Node{});
    for (const auto& e : entries) {
      int node = 0;
      for (TokenId t : detail::with_eos(e.tokens)) {
        auto it = trie_[node].children.find(t);
        if (it == trie_[node].children.end()) {
          trie_.push_back(Node{});
          it = trie_[node].children.emplace(t, static_cast<int>(trie_.size()) - 1).first;
        }
        node = it->second;
      }
      // Duplicate entries keep the better stored score.
      auto& leaf = trie_[node];
      leaf.score = leaf.has_score ? std::max(leaf.score, e.total) : e.total;
      leaf.has_score = true;
    }
    state_ = State{};
  }
  PredictorState do_get_state() const override { return PredictorState::of(state_); }
  void do_set_state(const PredictorState& s) override { state_ = s.as<State>(name()); }
  Posterior do_predict_next() override {
    if (state_.node < 0 || trie_[state_.node].children.empty()) {
      throw DeadHypothesisError("forcedlst: hypothesis is not a prefix of any n-best entry");
    }
    Posterior p(kNegInf);
    for (const auto& [t, child] : trie_[state_.node].children) {
      const bool leaf = t == Vocabulary::kEos;
      p.set(t, (mode_ == NbestMode::kRescore && leaf) ? trie_[child].score : 0.0);
    }
    return p;
  }
  void do_consume(TokenId token) override {
    if (state_.node < 0) return;
    auto it = trie_[state_.node].children.find(token);
    state_.node = it == trie_[state_.node].children.end() ? -1 : it->second;
  }

 private:
  struct Node {
    std::map<TokenId, int> children;
    double score = 0.0;
    bool has_score = false;
  };

  std::shared_ptr<const NbestList> list_;
  NbestMode mode_;
  std::vector<Node> trie_;
  State state_;
};

/// Bag-of-words constraint. Without repetition the output must be a
/// permutation of the bag; with repetition any bag token may repeat but
/// eos requires every distinct bag token at least once.
class BagOfWordsPredictor : public Predictor {
 public:
  struct State {
    std::map<TokenId, int> remaining;
    bool dead = false;
  };

  BagOfWordsPredictor(std::shared_ptr<const std::vector<std::vector<TokenId>>> bags, bool allow_repetition)
      : bags_(std::move(bags)), allow_repetition_(allow_repetition) {}
  BagOfWordsPredictor(std::vector<TokenId> bag, bool allow_repetition)
      : BagOfWordsPredictor(std::make_shared<const std::vector<std::vector<TokenId>>>(
                                std::vector<std::vector<TokenId>>{std::move(bag)}),
                            allow_repetition) {}

  std::string name() const override { return "bow"; }

 protected:
  void do_initialize(const SourceSentence& src) override {
    const auto& bag = detail::per_sentence(*bags_, src.id, name());
    if (bag.empty()) throw UsageError("bow: empty bag for sentence " + std::to_string(src.id));
    state_ = State{};
    for (TokenId t : bag) {
      if (allow_repetition_) {
        state_.remaining[t] = 1;
      } else {
        ++state_.remaining[t];
      }
    }
  }
  PredictorState do_get_state() const override { return PredictorState::of(state_); }
  void do_set_state(const PredictorState& s) override { state_ = s.as<State>(name()); }
  Posterior do_predict_next() override {
    if (state_.dead) throw DeadHypothesisError("bow: token outside the bag was consumed");
    Posterior p(kNegInf);
    bool exhausted = true;
    for (const auto& [t, n] : state_.remaining) {
      if (n > 0) exhausted = false;
      if (allow_repetition_ || n > 0) p.set(t, 0.0);
    }
    if (exhausted) p.set(Vocabulary::kEos, 0.0);
    return p;
  }
  void do_consume(TokenId token) override {
    if (state_.dead) return;
    if (token == Vocabulary::kEos) {
      for (const auto& [t, n] : state_.remaining) state_.dead |= n > 0;
      return;
    }
    auto it = state_.remaining.find(token);
    if (it == state_.remaining.end() || (!allow_repetition_ && it->second == 0)) {
      state_.dead = true;
      return;
    }
    if (it->second > 0) --it->second;
  }

 private:
  std::shared_ptr<const std::vector<std::vector<TokenId>>> bags_;
  bool allow_repetition_;
  State state_;
};

}  // namespace seqsearch
