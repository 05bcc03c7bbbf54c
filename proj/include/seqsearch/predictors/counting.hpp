#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "seqsearch/core/predictor.hpp"

namespace seqsearch {

/// Word count: raw score 1 for every token except eos. Use a negative
/// weight to penalize length.
class WordCountPredictor : public Predictor {
 public:
  struct State {};

  std::string name() const override { return "wc"; }

 protected:
  void do_initialize(const SourceSentence&) override {}
  PredictorState do_get_state() const override { return PredictorState::of(State{}); }
  void do_set_state(const PredictorState& s) override { (void)s.as<State>(name()); }
  Posterior do_predict_next() override {
    Posterior p(1.0);
    p.set(Vocabulary::kEos, 0.0);
    return p;
  }
  void do_consume(TokenId) override {}
};

/// log of the Poisson pmf: k ln(lambda) - lambda - ln(k!).
inline double poisson_log_pmf(unsigned k, double lambda) {
  return k * std::log(lambda) - lambda - std::lgamma(static_cast<double>(k) + 1.0);
}

/// UNK count: models the number of unk tokens in the output with a Poisson
/// distribution whose rate grows with the number of unk source tokens,
/// lambda = c0 + c1 * (#unk in source). Only eos is scored.
class UnkCountPredictor : public Predictor {
 public:
  struct State {
    unsigned unk_count = 0;
    double lambda = 1.0;
  };

  explicit UnkCountPredictor(double c0 = 0.5, double c1 = 1.0) : c0_(c0), c1_(c1) {}

  std::string name() const override { return "unkc"; }
  double lambda() const { return state_.lambda; }

 protected:
  void do_initialize(const SourceSentence& src) override {
    unsigned src_unks = 0;
    for (TokenId t : src.tokens) src_unks += t == Vocabulary::kUnk;
    const double lambda = c0_ + c1_ * src_unks;
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw ConfigError("unkc: Poisson rate must be positive, got " + std::to_string(lambda));
    }
    state_ = State{0, lambda};
  }
  PredictorState do_get_state() const override { return PredictorState::of(state_); }
  void do_set_state(const PredictorState& s) override { state_ = s.as<State>(name()); }
  Posterior do_predict_next() override {
    Posterior p(0.0);
    p.set(Vocabulary::kEos, poisson_log_pmf(state_.unk_count, state_.lambda));
    return p;
  }
  void do_consume(TokenId token) override {
    if (token == Vocabulary::kUnk) ++state_.unk_count;
  }

 private:
  double c0_, c1_;
  State state_;
};

/// Target length model: eos scores the Normal(a * src_len + b, sigma)
/// log-density at the number of tokens consumed so far.
class LengthPredictor : public Predictor {
 public:
  struct State {
    unsigned length = 0;
  };

  LengthPredictor(double a, double b, double sigma) : a_(a), b_(b), sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("length: sigma must be positive");
  }

  std::string name() const override { return "length"; }
  double mean() const { return mean_; }

  static double log_density(double x, double mean, double sigma) {
    const double z = (x - mean) / sigma;
    return -std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * z * z;
  }

 protected:
  void do_initialize(const SourceSentence& src) override {
    mean_ = a_ * static_cast<double>(src.tokens.size()) + b_;
    state_ = State{};
  }
  PredictorState do_get_state() const override { return PredictorState::of(state_); }
  void do_set_state(const PredictorState& s) override { state_ = s.as<State>(name()); }
  Posterior do_predict_next() override {
    Posterior p(0.0);
    p.set(Vocabulary::kEos, log_density(state_.length, mean_, sigma_));
    return p;
  }
  void do_consume(TokenId token) override {
    if (token != Vocabulary::kEos) ++state_.length;
  }

 private:
  double a_, b_, sigma_;
  double mean_ = 0.0;
  State state_;
};

}  // namespace seqsearch
