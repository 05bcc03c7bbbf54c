#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "seqsearch/core/error.hpp"
#include "seqsearch/core/types.hpp"

namespace seqsearch {

struct WeightedPosterior {
  const Posterior* posterior;
  double weight;
};

/// w * s, except that -inf stays -inf for every weight (including zero and
/// negative weights): a -inf score is a hard constraint, not a model score.
inline double weighted_score(double weight, double score) {
  return score == kNegInf ? kNegInf : weight * score;
}

inline void check_weight(double weight) {
  if (!std::isfinite(weight)) throw ConfigError("predictor weights must be finite");
}

/// Linear combination of posteriors. A token missing from a posterior takes
/// that posterior's default score, so a -inf default restricts the support
/// of the result to the posterior's listed tokens.
inline Posterior combine(std::span<const WeightedPosterior> parts) {
  if (parts.empty()) throw UsageError("combine: no posteriors given");
  double default_score = 0.0;
  for (const auto& p : parts) {
    check_weight(p.weight);
    default_score += weighted_score(p.weight, p.posterior->default_score());
  }
  Posterior::Map entries;
  for (const auto& p : parts) {
    for (const auto& [token, unused] : p.posterior->entries()) {
      if (entries.contains(token)) continue;
      double sum = 0.0;
      for (const auto& q : parts) sum += weighted_score(q.weight, q.posterior->score(token));
      entries.emplace(token, sum);
    }
  }
  // Entries equal to -inf under a -inf default carry no information.
  if (default_score == kNegInf) {
    std::erase_if(entries, [](const auto& kv) { return kv.second == kNegInf; });
  }
  return Posterior(std::move(entries), default_score);
}

inline Posterior combine(std::initializer_list<WeightedPosterior> parts) {
  return combine(std::span<const WeightedPosterior>(parts.begin(), parts.size()));
}

/// Highest-scoring listed token; ties go to the smallest id. Only listed
/// entries are considered: callers that need the default-scored tail must
/// enumerate the vocabulary (see expand()).
inline std::pair<TokenId, double> argmax(const Posterior& p) {
  bool found = false;
  std::pair<TokenId, double> best{0, kNegInf};
  for (const auto& [token, score] : p.entries()) {
    if (score == kNegInf) continue;
    if (!found || score > best.second) {
      best = {token, score};
      found = true;
    }
  }
  if (!found) throw DeadHypothesisError("argmax: every token scores -inf");
  return best;
}

/// argmax over the whole vocabulary, so that tokens scored by the default
/// also compete. bos is never a candidate.
inline std::pair<TokenId, double> argmax(const Posterior& p, const Vocabulary& vocab) {
  bool found = false;
  std::pair<TokenId, double> best{0, kNegInf};
  for (TokenId t = 0; t < vocab.size; ++t) {
    if (t == vocab.bos_id) continue;
    const double s = p.score(t);
    if (s == kNegInf) continue;
    if (!found || s > best.second) {
      best = {t, s};
      found = true;
    }
  }
  if (!found) throw DeadHypothesisError("argmax: every token scores -inf");
  return best;
}

}  // namespace seqsearch
