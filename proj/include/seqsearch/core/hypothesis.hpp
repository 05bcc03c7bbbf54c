#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqsearch/core/combine.hpp"
#include "seqsearch/core/predictor.hpp"
#include "seqsearch/core/types.hpp"

namespace seqsearch {

/// One predictor's contribution to one step.
struct ScoreTerm {
  std::size_t slot = 0;
  double raw = 0.0;
  double weight = 0.0;

  bool operator==(const ScoreTerm&) const = default;
};

struct PartialHypothesis {
  std::vector<TokenId> trajectory{Vocabulary::kBos};
  double score = 0.0;
  /// score_breakdown[i] holds the terms of the (i+1)-th emitted token.
  std::vector<std::vector<ScoreTerm>> score_breakdown;
  std::vector<PredictorState> states;
  /// Set only by sepbeam: the single slot this hypothesis is scored with.
  std::optional<std::size_t> predictor_filter;

  /// Number of tokens after bos (eos included).
  std::size_t length() const { return trajectory.size() - 1; }
  TokenId last() const { return trajectory.back(); }
  bool complete() const { return trajectory.back() == Vocabulary::kEos; }
};

/// Ranking used for every hypothesis list: score descending, then
/// trajectory lexicographically ascending.
inline bool better(double score_a, const std::vector<TokenId>& traj_a, double score_b,
                   const std::vector<TokenId>& traj_b) {
  if (score_a != score_b) return score_a > score_b;
  return traj_a < traj_b;
}

inline bool better(const PartialHypothesis& a, const PartialHypothesis& b) {
  return better(a.score, a.trajectory, b.score, b.trajectory);
}

/// Sum over steps of the weighted raw scores stored in the breakdown.
inline double breakdown_total(const PartialHypothesis& h) {
  double total = 0.0;
  for (const auto& step : h.score_breakdown) {
    double step_sum = 0.0;
    for (const auto& term : step) step_sum += weighted_score(term.weight, term.raw);
    total += step_sum;
  }
  return total;
}

/// One candidate continuation of a hypothesis.
struct Expansion {
  TokenId token = 0;
  double score = 0.0;  // combined step score
  std::vector<ScoreTerm> terms;

  bool operator==(const Expansion&) const = default;
};

/// Indices of the slots that score `h` (all of them unless sepbeam set a filter).
inline std::vector<std::size_t> active_slots(const PartialHypothesis& h, std::size_t num_slots) {
  if (h.predictor_filter) return {*h.predictor_filter};
  std::vector<std::size_t> out(num_slots);
  for (std::size_t i = 0; i < num_slots; ++i) out[i] = i;
  return out;
}

inline void restore_states(const PartialHypothesis& h, std::span<const PredictorSlot> slots) {
  if (h.states.size() != slots.size()) {
    throw UsageError("hypothesis carries " + std::to_string(h.states.size()) +
                     " predictor states for " + std::to_string(slots.size()) + " slots");
  }
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i].predictor->set_state(h.states[i]);
}

inline std::vector<PredictorState> capture_states(std::span<const PredictorSlot> slots) {
  std::vector<PredictorState> out;
  out.reserve(slots.size());
  for (const auto& s : slots) out.push_back(s.predictor->get_state());
  return out;
}

/// Scores every continuation of `h` without consuming anything. Returns the
/// tokens whose combined score is > -inf, ordered by (score desc, id asc).
/// bos is never proposed. Throws DeadHypothesisError when nothing survives.
inline std::vector<Expansion> expand(const PartialHypothesis& h, std::span<const PredictorSlot> slots,
                                     const Vocabulary& vocab) {
  if (h.complete()) throw UsageError("expand: hypothesis already ends with eos");
  restore_states(h, slots);
  const auto active = active_slots(h, slots.size());
  std::vector<Posterior> posteriors;
  posteriors.reserve(active.size());
  for (std::size_t i : active) posteriors.push_back(slots[i].predictor->predict_next());
  std::vector<WeightedPosterior> parts;
  for (std::size_t k = 0; k < active.size(); ++k) {
    parts.push_back({&posteriors[k], slots[active[k]].weight});
  }
  const Posterior combined = combine(parts);

  auto make = [&](TokenId t, double score) {
    Expansion e{t, score, {}};
    e.terms.reserve(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      e.terms.push_back({active[k], posteriors[k].score(t), slots[active[k]].weight});
    }
    return e;
  };

  std::vector<Expansion> out;
  if (combined.default_score() > kNegInf) {
    for (TokenId t = 0; t < vocab.size; ++t) {
      if (t == vocab.bos_id) continue;
      const double s = combined.score(t);
      if (s > kNegInf) out.push_back(make(t, s));
    }
  } else {
    for (const auto& [t, s] : combined.entries()) {
      if (t == vocab.bos_id || s == kNegInf) continue;
      if (!vocab.contains(t)) throw UsageError("predictor proposed token outside the vocabulary");
      out.push_back(make(t, s));
    }
  }
  if (out.empty()) throw DeadHypothesisError("expand: no continuation scores above -inf");
  std::stable_sort(out.begin(), out.end(), [](const Expansion& a, const Expansion& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.token < b.token;
  });
  return out;
}

/// Builds the child of `parent` along `e`: restores the parent's states,
/// consumes e.token in the active predictors and captures the new states.
inline PartialHypothesis extend(const PartialHypothesis& parent, const Expansion& e,
                                std::span<const PredictorSlot> slots) {
  restore_states(parent, slots);
  PartialHypothesis child;
  child.trajectory = parent.trajectory;
  child.trajectory.push_back(e.token);
  child.score = parent.score + e.score;
  child.score_breakdown = parent.score_breakdown;
  child.score_breakdown.push_back(e.terms);
  child.predictor_filter = parent.predictor_filter;
  child.states = parent.states;
  for (const auto& term : e.terms) {
    auto& p = *slots[term.slot].predictor;
    p.consume(e.token);
    child.states[term.slot] = p.get_state();
  }
  return child;
}

/// Root hypothesis after every predictor has been initialized with `src`.
inline PartialHypothesis initial_hypothesis(const SourceSentence& src, std::span<const PredictorSlot> slots) {
  for (const auto& s : slots) {
    check_weight(s.weight);
    s.predictor->initialize(src);
  }
  PartialHypothesis h;
  h.states = capture_states(slots);
  return h;
}

/// Re-scores a complete trajectory from scratch by a single forward pass.
/// Returns -inf if any step is impossible.
inline double score_trajectory(const SourceSentence& src, std::span<const TokenId> trajectory,
                               std::span<const PredictorSlot> slots,
                               std::optional<std::size_t> only_slot = std::nullopt) {
  for (const auto& s : slots) s.predictor->initialize(src);
  std::size_t start = (!trajectory.empty() && trajectory.front() == Vocabulary::kBos) ? 1 : 0;
  double total = 0.0;
  for (std::size_t i = start; i < trajectory.size(); ++i) {
    double step = 0.0;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (only_slot && *only_slot != k) continue;
      double raw;
      try {
        raw = slots[k].predictor->predict_next().score(trajectory[i]);
      } catch (const DeadHypothesisError&) {
        return kNegInf;
      }
      step += weighted_score(slots[k].weight, raw);
    }
    if (step == kNegInf) return kNegInf;
    total += step;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (only_slot && *only_slot != k) continue;
      slots[k].predictor->consume(trajectory[i]);
    }
  }
  return total;
}

inline std::string to_string(std::span<const TokenId> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(tokens[i]);
  }
  return out;
}

}  // namespace seqsearch
