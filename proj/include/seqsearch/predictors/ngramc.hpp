#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/core/predictor.hpp"
#include "seqsearch/formats/ngram_table.hpp"

namespace seqsearch {

/// External n-gram posteriors. A token scores the sum of the table entries
/// of every order that end in it and match the recent history; tokens
/// matching nothing score 0.
class NgramCountPredictor : public Predictor {
 public:
  struct State {
    std::vector<TokenId> history;
  };

  explicit NgramCountPredictor(std::shared_ptr<const NgramTable> table)
      : table_(std::move(table)), max_order_(table_->max_order()) {}

  std::string name() const override { return "ngramc"; }

 protected:
  void do_initialize(const SourceSentence&) override { history_.clear(); }
  PredictorState do_get_state() const override { return PredictorState::of(State{history_}); }
  void do_set_state(const PredictorState& s) override { history_ = s.as<State>(name()).history; }

  Posterior do_predict_next() override {
    Posterior p(0.0);
    for (const auto& [ngram, score] : table_->scores) {
      const std::size_t ctx = ngram.size() - 1;
      if (ctx > history_.size()) continue;
      if (!std::equal(ngram.begin(), ngram.end() - 1, history_.end() - ctx)) continue;
      p.set(ngram.back(), p.score(ngram.back()) + score);
    }
    return p;
  }

  void do_consume(TokenId token) override {
    history_.push_back(token);
    const std::size_t keep = max_order_ > 0 ? max_order_ - 1 : 0;
    if (history_.size() > keep) history_.erase(history_.begin(), history_.end() - keep);
  }

 private:
  std::shared_ptr<const NgramTable> table_;
  std::size_t max_order_;
  std::vector<TokenId> history_;
};

}  // namespace seqsearch
