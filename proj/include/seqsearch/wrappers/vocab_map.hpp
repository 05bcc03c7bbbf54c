#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>

#include "seqsearch/core/predictor.hpp"

namespace seqsearch {

/// Inner id -> outer id. Ids without an entry keep their value.
using TokenMap = std::map<TokenId, TokenId>;

inline TokenId apply_map(const TokenMap& map, TokenId t) {
  auto it = map.find(t);
  return it == map.end() ? t : it->second;
}

/// Relabels the entries of `inner`; scores and the default are unchanged.
/// Throws ConfigError if two listed tokens land on the same id.
inline Posterior map_vocab(const Posterior& inner, const TokenMap& map) {
  Posterior::Map out;
  for (const auto& [t, s] : inner.entries()) {
    const TokenId mapped = apply_map(map, t);
    if (!out.emplace(mapped, s).second) {
      throw ConfigError("map_vocab: tokens collide on id " + std::to_string(mapped));
    }
  }
  return Posterior(std::move(out), inner.default_score());
}

/// Inverse of an injective map; throws ConfigError on collisions.
inline TokenMap invert(const TokenMap& map) {
  TokenMap inv;
  for (const auto& [from, to] : map) {
    if (!inv.emplace(to, from).second) throw ConfigError("token map is not injective at id " + std::to_string(to));
  }
  return inv;
}

/// Exposes an inner predictor under a different symbol table.
class MappedPredictor : public Predictor {
 public:
  MappedPredictor(std::shared_ptr<Predictor> inner, TokenMap inner_to_outer)
      : inner_(std::move(inner)), to_outer_(std::move(inner_to_outer)), to_inner_(invert(to_outer_)) {}

  std::string name() const override { return "map_" + inner_->name(); }

 protected:
  void do_initialize(const SourceSentence& src) override { inner_->initialize(src); }
  PredictorState do_get_state() const override { return inner_->get_state(); }
  void do_set_state(const PredictorState& s) override { inner_->set_state(s); }
  Posterior do_predict_next() override { return map_vocab(inner_->predict_next(), to_outer_); }
  void do_consume(TokenId token) override { inner_->consume(apply_map(to_inner_, token)); }

 private:
  std::shared_ptr<Predictor> inner_;
  TokenMap to_outer_;
  TokenMap to_inner_;
};

}  // namespace seqsearch
