#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/core/hypothesis.hpp"
#include "seqsearch/core/predictor.hpp"
#include "seqsearch/formats/fst.hpp"
#include "seqsearch/predictors/fst.hpp"

namespace seqsearch::testing {

inline std::string fixture(const std::string& rel) { return std::string(SEQSEARCH_FIXTURES) + "/" + rel; }

inline std::shared_ptr<const FstResource> fst_from(std::string_view att) {
  return std::make_shared<const FstResource>(parse_att_fst(att));
}

inline SourceSentence sentence(std::vector<TokenId> tokens, std::size_t id = 0) {
  SourceSentence s;
  s.id = id;
  s.tokens = std::move(tokens);
  return s;
}

/// Predictor whose posterior is an arbitrary function of the consumed
/// history. Lets tests describe a search space as a table.
class TablePredictor : public Predictor {
 public:
  using Fn = std::function<Posterior(const std::vector<TokenId>& history)>;
  struct State {
    std::vector<TokenId> history;
  };

  explicit TablePredictor(Fn fn, std::string name = "table") : fn_(std::move(fn)), name_(std::move(name)) {}

  std::string name() const override { return name_; }
  std::size_t predict_calls() const { return calls_; }

 protected:
  void do_initialize(const SourceSentence&) override { history_.clear(); }
  PredictorState do_get_state() const override { return PredictorState::of(State{history_}); }
  void do_set_state(const PredictorState& s) override { history_ = s.as<State>(name()).history; }
  Posterior do_predict_next() override {
    ++calls_;
    return fn_(history_);
  }
  void do_consume(TokenId t) override { history_.push_back(t); }

 private:
  Fn fn_;
  std::string name_;
  std::vector<TokenId> history_;
  std::size_t calls_ = 0;
};

/// Search space given as "history -> {token: score}" with -inf default;
/// histories missing from the map are dead.
inline std::shared_ptr<TablePredictor> tree_predictor(std::map<std::vector<TokenId>, Posterior::Map> tree) {
  return std::make_shared<TablePredictor>([tree = std::move(tree)](const std::vector<TokenId>& h) {
    auto it = tree.find(h);
    if (it == tree.end()) throw DeadHypothesisError("tree: no continuation");
    return Posterior(it->second, kNegInf);
  });
}

}  // namespace seqsearch::testing
