#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/core/predictor.hpp"
#include "seqsearch/formats/arpa.hpp"
#include "seqsearch/formats/symbol_table.hpp"

namespace seqsearch {

/// Back-off n-gram language model predictor. The state is the last
/// order-1 consumed tokens, starting at <s>. Every token gets a score;
/// tokens the model does not know are scored as <unk> (or -inf when the
/// model has no <unk> entry).
class NgramPredictor : public Predictor {
 public:
  struct State {
    std::vector<TokenId> history;
  };

  NgramPredictor(std::shared_ptr<const NgramModel> model, const SymbolTable& symbols, Vocabulary vocab)
      : model_(std::move(model)), vocab_(vocab), lm_index_(vocab.size, -1) {
    for (TokenId t = 0; t < vocab.size; ++t) {
      std::string w;
      try {
        w = symbols.word(t);
      } catch (const UsageError&) {
        continue;  // id without a symbol
      }
      if (auto idx = model_->word_index(w)) lm_index_[t] = *idx;
    }
    if (auto unk = model_->word_index(SymbolTable::kUnkSymbol)) unk_index_ = *unk;
  }

  std::string name() const override { return "ngram"; }

 protected:
  void do_initialize(const SourceSentence&) override { history_ = {Vocabulary::kBos}; }

  PredictorState do_get_state() const override { return PredictorState::of(State{history_}); }
  void do_set_state(const PredictorState& s) override { history_ = s.as<State>(name()).history; }

  Posterior do_predict_next() override {
    std::vector<LmWord> ctx;
    ctx.reserve(history_.size());
    for (TokenId t : history_) ctx.push_back(to_lm(t));

    const double unk_score = unk_index_ >= 0 ? model_->logprob(ctx, unk_index_).value_or(kNegInf) : kNegInf;
    Posterior p(unk_score);
    for (TokenId t = 0; t < vocab_.size; ++t) {
      if (t == vocab_.bos_id || lm_index_[t] < 0) continue;
      p.set(t, model_->logprob(ctx, lm_index_[t]).value_or(unk_score));
    }
    return p;
  }

  void do_consume(TokenId token) override {
    history_.push_back(token);
    const auto keep = static_cast<std::size_t>(std::max(model_->order() - 1, 0));
    if (history_.size() > keep) history_.erase(history_.begin(), history_.end() - keep);
  }

 private:
  LmWord to_lm(TokenId t) const {
    if (t >= 0 && t < vocab_.size && lm_index_[t] >= 0) return lm_index_[t];
    return unk_index_;
  }

  std::shared_ptr<const NgramModel> model_;
  Vocabulary vocab_;
  std::vector<LmWord> lm_index_;
  LmWord unk_index_ = -1;
  std::vector<TokenId> history_;
};

}  // namespace seqsearch
