#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/core/predictor.hpp"
#include "seqsearch/formats/fst.hpp"

namespace seqsearch {

/// A loaded lattice plus its precomputed epsilon closure. Immutable and
/// shareable across predictor instances and threads.
class FstResource {
 public:
  explicit FstResource(WeightedFst fst) : fst_(std::move(fst)), closure_(epsilon_closure(fst_)) {}

  static std::shared_ptr<const FstResource> load(const std::string& path) {
    return std::make_shared<const FstResource>(load_att_fst(path));
  }

  const WeightedFst& fst() const { return fst_; }
  const std::vector<std::pair<StateId, double>>& closure(StateId s) const { return closure_.at(s); }

 private:
  WeightedFst fst_;
  std::vector<std::vector<std::pair<StateId, double>>> closure_;
};

/// How nfst merges several arcs carrying the same label.
enum class LabelMerge { kMax, kLogSum };

/// Lattice rescoring predictor. Scores are negated tropical costs taken
/// from input labels; eos is available where a final state is reachable
/// through epsilons. The deterministic variant rejects duplicate labels,
/// the nondeterministic one merges them.
class FstPredictor : public Predictor {
 public:
  struct State {
    StateId node = kDead;
  };
  static constexpr StateId kDead = -1;

  explicit FstPredictor(std::shared_ptr<const FstResource> resource, bool deterministic = true,
                        LabelMerge merge = LabelMerge::kMax)
      : resource_(std::move(resource)), deterministic_(deterministic), merge_(merge) {}

  std::string name() const override { return deterministic_ ? "fst" : "nfst"; }

 protected:
  void do_initialize(const SourceSentence&) override { node_ = resource_->fst().start(); }

  PredictorState do_get_state() const override { return PredictorState::of(State{node_}); }
  void do_set_state(const PredictorState& s) override { node_ = s.as<State>(name()).node; }

  Posterior do_predict_next() override {
    const auto cands = candidates();
    if (cands.empty()) throw DeadHypothesisError(name() + ": state " + std::to_string(node_) + " is a dead end");
    Posterior p(kNegInf);
    for (const auto& [label, c] : cands) p.set(label, c.score);
    return p;
  }

  void do_consume(TokenId token) override {
    if (node_ == kDead) return;
    const auto cands = candidates();
    auto it = cands.find(token);
    node_ = (it == cands.end() || token == Vocabulary::kEos) ? kDead : it->second.target;
  }

 private:
  struct Candidate {
    double score;
    double best;  // best single-path score, decides the consume target
    StateId target;
  };

  std::map<TokenId, Candidate> candidates() const {
    if (node_ == kDead) throw DeadHypothesisError(name() + ": no lattice path for this prefix");
    const auto& fst = resource_->fst();
    std::map<TokenId, Candidate> out;
    auto add = [&](TokenId label, double score, StateId target) {
      auto [it, inserted] = out.try_emplace(label, Candidate{score, score, target});
      if (inserted) return;
      if (deterministic_) {
        throw ValidationError("fst: label " + std::to_string(label) + " leaves state " + std::to_string(node_) +
                              " more than once; use nfst for nondeterministic lattices");
      }
      auto& c = it->second;
      if (merge_ == LabelMerge::kMax) {
        c.score = std::max(c.score, score);
      } else {
        const double hi = std::max(c.score, score), lo = std::min(c.score, score);
        c.score = hi + std::log1p(std::exp(lo - hi));
      }
      if (score > c.best) {
        c.best = score;
        c.target = target;
      }
    };
    for (const auto& [state, eps_cost] : resource_->closure(node_)) {
      for (const auto& arc : fst.arcs(state)) {
        if (arc.ilabel != kEpsilon) add(arc.ilabel, -(eps_cost + arc.cost), arc.dst);
      }
      if (auto f = fst.final_cost(state)) add(Vocabulary::kEos, -(eps_cost + *f), kDead);
    }
    return out;
  }

  std::shared_ptr<const FstResource> resource_;
  bool deterministic_;
  LabelMerge merge_;
  StateId node_ = kDead;
};

}  // namespace seqsearch
