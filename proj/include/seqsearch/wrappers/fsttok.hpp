#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/core/predictor.hpp"
#include "seqsearch/predictors/fst.hpp"

namespace seqsearch {

/// Runs an inner predictor at a different tokenization level. The masking
/// transducer reads outer tokens (input labels) and writes inner tokens
/// (output labels, 0 = nothing). An outer token expands to the output of
/// its arc followed by the chain of input-epsilon arcs after it; the chain
/// stops at the first state that waits for input or is final. Transducer
/// weights are ignored: only the inner predictor scores.
///
/// Only functional transducers are supported. Two arcs for the same outer
/// token, or a branching epsilon chain, raise AmbiguityError.
class FsttokPredictor : public Predictor {
 public:
  struct State {
    StateId node = -1;
    PredictorState inner;
  };

  FsttokPredictor(std::shared_ptr<const FstResource> transducer, std::shared_ptr<Predictor> inner)
      : transducer_(std::move(transducer)), inner_(std::move(inner)) {
    const auto& fst = transducer_->fst();
    for (const auto& a : fst.arcs(fst.start())) {
      if (a.ilabel == kEpsilon) throw ValidationError("fsttok: start state of the transducer has epsilon arcs");
    }
  }

  std::string name() const override { return "fsttok_" + inner_->name(); }

  /// Inner tokens that outer `token` expands to from transducer state
  /// `node`, and the state reached. Empty optional if no arc reads `token`.
  std::optional<std::pair<std::vector<TokenId>, StateId>> expansion(StateId node, TokenId token) const {
    const auto& fst = transducer_->fst();
    const FstArc* arc = nullptr;
    for (const auto& a : fst.arcs(node)) {
      if (a.ilabel != token) continue;
      if (arc != nullptr) {
        throw AmbiguityError("fsttok: outer token " + std::to_string(token) + " has two expansions from state " +
                             std::to_string(node));
      }
      arc = &a;
    }
    if (arc == nullptr) return std::nullopt;
    std::vector<TokenId> out;
    if (arc->olabel != kEpsilon) out.push_back(arc->olabel);
    StateId cur = arc->dst;
    for (StateId steps = 0;; ++steps) {
      const FstArc* eps = nullptr;
      bool reads_input = fst.is_final(cur);
      for (const auto& a : fst.arcs(cur)) {
        if (a.ilabel != kEpsilon) {
          reads_input = true;
        } else if (eps != nullptr) {
          throw AmbiguityError("fsttok: branching epsilon chain at state " + std::to_string(cur));
        } else {
          eps = &a;
        }
      }
      if (eps == nullptr) break;
      if (reads_input) throw AmbiguityError("fsttok: state " + std::to_string(cur) + " both waits for input and continues");
      if (steps > fst.num_states()) throw ValidationError("fsttok: epsilon cycle in transducer");
      if (eps->olabel != kEpsilon) out.push_back(eps->olabel);
      cur = eps->dst;
    }
    return std::make_pair(std::move(out), cur);
  }

 protected:
  void do_initialize(const SourceSentence& src) override {
    inner_->initialize(src);
    node_ = transducer_->fst().start();
  }

  PredictorState do_get_state() const override { return PredictorState::of(State{node_, inner_->get_state()}); }

  void do_set_state(const PredictorState& s) override {
    const auto& st = s.as<State>(name());
    node_ = st.node;
    inner_->set_state(st.inner);
  }

  Posterior do_predict_next() override {
    if (node_ < 0) throw DeadHypothesisError(name() + ": no transducer path for this prefix");
    const auto& fst = transducer_->fst();
    const PredictorState saved = inner_->get_state();
    Posterior p(kNegInf);
    std::vector<TokenId> labels;
    for (const auto& a : fst.arcs(node_)) labels.push_back(a.ilabel);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (TokenId t : labels) {
      if (t == kEpsilon || t == Vocabulary::kEos) continue;
      const auto exp = expansion(node_, t);
      const double s = probe(exp->first);
      inner_->set_state(saved);
      if (s > kNegInf) p.set(t, s);
    }
    if (fst.is_final(node_)) {
      const double s = probe(std::vector<TokenId>{Vocabulary::kEos});
      inner_->set_state(saved);
      if (s > kNegInf) p.set(Vocabulary::kEos, s);
    }
    if (p.empty_support()) throw DeadHypothesisError(name() + ": no outer token has a finite score");
    return p;
  }

  void do_consume(TokenId token) override {
    if (node_ < 0) return;
    if (token == Vocabulary::kEos) {
      inner_->consume(token);
      node_ = -1;
      return;
    }
    const auto exp = expansion(node_, token);
    if (!exp) {
      node_ = -1;
      return;
    }
    for (TokenId u : exp->first) inner_->consume(u);
    node_ = exp->second;
  }

 private:
  /// Sum of inner scores along `inner_tokens`, consuming as it goes.
  double probe(const std::vector<TokenId>& inner_tokens) {
    double total = 0.0;
    try {
      for (TokenId u : inner_tokens) {
        const double s = inner_->predict_next().score(u);
        if (s == kNegInf) return kNegInf;
        total += s;
        inner_->consume(u);
      }
    } catch (const DeadHypothesisError&) {
      return kNegInf;
    }
    return total;
  }

  std::shared_ptr<const FstResource> transducer_;
  std::shared_ptr<Predictor> inner_;
  StateId node_ = -1;
};

}  // namespace seqsearch
