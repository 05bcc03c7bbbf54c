#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "seqsearch/core/combine.hpp"
#include "seqsearch/core/hypothesis.hpp"
#include "seqsearch/predictors/counting.hpp"
#include "seqsearch/predictors/fst.hpp"
#include "support/helpers.hpp"
#include "support/random_fixture.hpp"

using namespace seqsearch;
using namespace seqsearch::testing;

namespace {

Posterior post(Posterior::Map m, double def = kNegInf) { return Posterior(std::move(m), def); }

}  // namespace

TEST(Vocabulary, ReservedIds) {
  Vocabulary v(10);
  EXPECT_EQ(v.unk_id, 0);
  EXPECT_EQ(v.bos_id, 1);
  EXPECT_EQ(v.eos_id, 2);
  EXPECT_TRUE(v.contains(9));
  EXPECT_FALSE(v.contains(10));
  EXPECT_THROW(Vocabulary(2), ConfigError);
}

TEST(SourceSentence, RejectsEmptyAndSentinels) {
  EXPECT_THROW(validate_source(sentence({})), UsageError);
  EXPECT_THROW(validate_source(sentence({3, Vocabulary::kBos})), UsageError);
  EXPECT_THROW(validate_source(sentence({Vocabulary::kEos})), UsageError);
  EXPECT_NO_THROW(validate_source(sentence({0, 3})));
}

TEST(Posterior, RejectsNanAndPositiveInfinity) {
  EXPECT_THROW(Posterior(std::nan("")), UsageError);
  EXPECT_THROW(post({{3, INFINITY}}), UsageError);
  Posterior p(0.0);
  EXPECT_THROW(p.set(3, std::nan("")), UsageError);
  EXPECT_NO_THROW(p.set(3, kNegInf));
}

TEST(Posterior, DefaultScoreForUnlistedTokens) {
  auto p = post({{4, -1.0}}, -7.0);
  EXPECT_EQ(p.score(4), -1.0);
  EXPECT_EQ(p.score(5), -7.0);
  EXPECT_FALSE(p.empty_support());
  EXPECT_TRUE(post({{4, kNegInf}}).empty_support());
}

TEST(Combine, SinglePosteriorIsIdentity) {
  auto p = post({{4, -1.0}, {5, -2.5}});
  EXPECT_EQ(combine({{&p, 1.0}}), p);
}

TEST(Combine, AddsScores) {
  auto a = post({{4, -1.0}, {5, -2.0}});
  auto b = post({{4, -3.0}, {5, -1.0}});
  EXPECT_EQ(combine({{&a, 1.0}, {&b, 1.0}}), post({{4, -4.0}, {5, -3.0}}));
}

TEST(Combine, HalfWeightsKeepArgmax) {
  auto p = post({{4, -1.5}, {5, -0.5}, {6, -2.0}});
  EXPECT_EQ(argmax(combine({{&p, 0.5}, {&p, 0.5}})).first, argmax(p).first);
}

TEST(Combine, EmptyInputIsUsageError) {
  EXPECT_THROW(combine(std::span<const WeightedPosterior>{}), UsageError);
}

TEST(Combine, NonFiniteWeightIsConfigError) {
  auto p = post({{4, -1.0}});
  EXPECT_THROW(combine({{&p, INFINITY}}), ConfigError);
  EXPECT_THROW(combine({{&p, std::nan("")}}), ConfigError);
}

TEST(Combine, HardConstraintRestrictsSupport) {
  auto soft = post({{4, -1.0}}, -3.0);
  auto hard = post({{5, 0.0}});
  auto c = combine({{&soft, 1.0}, {&hard, 1.0}});
  EXPECT_EQ(c.default_score(), kNegInf);
  EXPECT_EQ(c.score(5), -3.0);
  EXPECT_EQ(c.score(4), kNegInf);
  EXPECT_EQ(c.score(9), kNegInf);
}

TEST(Combine, NegativeInfinityIgnoresWeight) {
  auto hard = post({{5, 0.0}});
  auto soft = post({}, -1.0);
  for (double w : {1.0, 0.0, -2.0}) {
    auto c = combine({{&hard, w}, {&soft, 1.0}});
    EXPECT_EQ(c.score(4), kNegInf) << "weight " << w;
    EXPECT_EQ(c.score(5), -1.0);
  }
}

TEST(Argmax, TieGoesToLowestId) { EXPECT_EQ(argmax(post({{4, -1.0}, {5, -1.0}})), std::make_pair(4, -1.0)); }

TEST(Argmax, Singleton) { EXPECT_EQ(argmax(post({{2, 0.0}})), std::make_pair(2, 0.0)); }

TEST(Argmax, DirectMax) { EXPECT_EQ(argmax(post({{4, -2.0}, {5, -1.0}, {7, -3.0}})), std::make_pair(5, -1.0)); }

TEST(Argmax, AllNegativeInfinityIsDead) {
  EXPECT_THROW(argmax(post({{4, kNegInf}})), DeadHypothesisError);
  EXPECT_THROW(argmax(Posterior()), DeadHypothesisError);
}

TEST(Argmax, VocabularyVersionSeesDefaultTail) {
  auto p = post({{4, -2.0}}, -1.0);
  EXPECT_EQ(argmax(p, Vocabulary(6)), std::make_pair(0, -1.0));
  auto bos_only = post({{Vocabulary::kBos, 0.0}});
  EXPECT_THROW(argmax(bos_only, Vocabulary(6)), DeadHypothesisError);
}

TEST(PredictorContract, CallsBeforeInitializeAreUsageErrors) {
  WordCountPredictor wc;
  EXPECT_THROW(wc.predict_next(), UsageError);
  EXPECT_THROW(wc.consume(3), UsageError);
  EXPECT_THROW(wc.get_state(), UsageError);
  EXPECT_THROW(wc.set_state(PredictorState::of(WordCountPredictor::State{})), UsageError);
  EXPECT_FALSE(wc.initialized());
  wc.initialize(sentence({3}));
  EXPECT_TRUE(wc.initialized());
}

TEST(PredictorContract, ForeignStateIsMismatch) {
  WordCountPredictor wc;
  UnkCountPredictor unkc;
  wc.initialize(sentence({3}));
  unkc.initialize(sentence({3}));
  EXPECT_THROW(wc.set_state(unkc.get_state()), StateMismatchError);
  EXPECT_THROW(unkc.set_state(wc.get_state()), StateMismatchError);
  EXPECT_THROW(wc.set_state(PredictorState()), StateMismatchError);
}

TEST(PredictorContract, RoundTripRestoresPosterior) {
  auto fst = fst_from("0 1 4 4 0.5\n0 1 5 5 1.0\n1 2 6 6 0.25\n2 0.0\n");
  FstPredictor p(fst);
  p.initialize(sentence({3}));
  const auto saved = p.get_state();
  const auto before = p.predict_next();
  p.consume(4);
  EXPECT_NE(p.predict_next(), before);
  p.set_state(saved);
  EXPECT_EQ(p.predict_next(), before);
}

TEST(PredictorContract, WordCountStateIsTrivialButRoundTrips) {
  WordCountPredictor wc;
  wc.initialize(sentence({3}));
  const auto saved = wc.get_state();
  const auto before = wc.predict_next();
  wc.consume(7);
  wc.consume(8);
  wc.set_state(saved);
  EXPECT_EQ(wc.predict_next(), before);
}

TEST(PredictorContract, InterleavedHypothesesMatchDedicatedInstances) {
  auto f = make_random_fixture(11);
  auto shared = f.slots()[1].predictor;
  auto a = f.slots()[1].predictor;
  auto b = f.slots()[1].predictor;
  const auto src = f.src;
  for (auto* p : {shared.get(), a.get(), b.get()}) p->initialize(src);
  auto sa = shared->get_state();
  auto sb = shared->get_state();
  const std::vector<TokenId> ta{3, 0, 3, 2}, tb{0, 0, 3, 3};
  for (std::size_t i = 0; i < ta.size(); ++i) {
    shared->set_state(sa);
    ASSERT_EQ(shared->predict_next(), a->predict_next());
    shared->consume(ta[i]);
    a->consume(ta[i]);
    sa = shared->get_state();

    shared->set_state(sb);
    ASSERT_EQ(shared->predict_next(), b->predict_next());
    shared->consume(tb[i]);
    b->consume(tb[i]);
    sb = shared->get_state();
  }
}

namespace {

std::vector<PredictorSlot> two_label_slots(double wc_weight) {
  auto fst = fst_from("0 1 4 4 0.5\n0 1 5 5 1.0\n1 2 6 6 0.25\n2 0.0\n");
  return {{std::make_shared<FstPredictor>(fst), 1.0}, {std::make_shared<WordCountPredictor>(), wc_weight}};
}

}  // namespace

TEST(Expand, RootListsStartArcs) {
  auto fst = fst_from("0 1 4 4 0.5\n0 1 5 5 1.0\n1 2 6 6 0.25\n2 0.0\n");
  std::vector<PredictorSlot> slots{{std::make_shared<FstPredictor>(fst), 1.0}};
  auto root = initial_hypothesis(sentence({3}), slots);
  auto exps = expand(root, slots, Vocabulary(8));
  ASSERT_EQ(exps.size(), 2u);
  EXPECT_EQ(exps[0].token, 4);
  EXPECT_EQ(exps[0].score, -0.5);
  EXPECT_EQ(exps[1].token, 5);
  EXPECT_EQ(exps[1].score, -1.0);
}

TEST(Expand, IsPure) {
  auto slots = two_label_slots(-0.1);
  auto root = initial_hypothesis(sentence({3}), slots);
  EXPECT_EQ(expand(root, slots, Vocabulary(8)), expand(root, slots, Vocabulary(8)));
}

TEST(Expand, ZeroWeightKeepsOrder) {
  auto f = make_random_fixture(3);
  std::vector<PredictorSlot> alone{{f.slots()[1].predictor, 1.0}};
  std::vector<PredictorSlot> with_zero{{f.slots()[1].predictor, 1.0}, {std::make_shared<WordCountPredictor>(), 0.0}};
  auto r1 = initial_hypothesis(f.src, alone);
  auto r2 = initial_hypothesis(f.src, with_zero);
  for (const auto& path : std::vector<std::vector<TokenId>>{{}, {3}, {3, 0}}) {
    auto h1 = r1, h2 = r2;
    for (TokenId t : path) {
      h1 = extend(h1, Expansion{t, 0.0, {{0, 0.0, 1.0}}}, alone);
      h2 = extend(h2, Expansion{t, 0.0, {{0, 0.0, 1.0}, {1, 0.0, 0.0}}}, with_zero);
    }
    auto e1 = expand(h1, alone, f.vocab);
    auto e2 = expand(h2, with_zero, f.vocab);
    ASSERT_EQ(e1.size(), e2.size());
    for (std::size_t i = 0; i < e1.size(); ++i) {
      EXPECT_EQ(e1[i].token, e2[i].token);
      EXPECT_EQ(e1[i].score, e2[i].score);
    }
  }
}

TEST(Expand, SortedByScoreThenId) {
  auto p = std::make_shared<TablePredictor>([](const std::vector<TokenId>&) {
    return Posterior({{5, -1.0}, {3, -1.0}, {4, -0.5}, {2, -2.0}}, kNegInf);
  });
  std::vector<PredictorSlot> slots{{p, 1.0}};
  auto root = initial_hypothesis(sentence({3}), slots);
  auto exps = expand(root, slots, Vocabulary(6));
  std::vector<TokenId> order;
  for (const auto& e : exps) order.push_back(e.token);
  EXPECT_EQ(order, (std::vector<TokenId>{4, 3, 5, 2}));
}

TEST(Expand, FiniteDefaultEnumeratesVocabularyWithoutBos) {
  std::vector<PredictorSlot> slots{{std::make_shared<WordCountPredictor>(), -1.0}};
  auto root = initial_hypothesis(sentence({3}), slots);
  auto exps = expand(root, slots, Vocabulary(5));
  std::vector<TokenId> order;
  for (const auto& e : exps) order.push_back(e.token);
  EXPECT_EQ(order, (std::vector<TokenId>{2, 0, 3, 4}));
}

TEST(Expand, DeadHypothesisPropagates) {
  std::vector<PredictorSlot> slots{{tree_predictor({{{}, {{4, -1.0}}}}), 1.0}};
  auto root = initial_hypothesis(sentence({3}), slots);
  auto child = extend(root, expand(root, slots, Vocabulary(6)).front(), slots);
  EXPECT_THROW(expand(child, slots, Vocabulary(6)), DeadHypothesisError);
}

TEST(Expand, CompleteHypothesisIsUsageError) {
  std::vector<PredictorSlot> slots{{std::make_shared<WordCountPredictor>(), 1.0}};
  auto root = initial_hypothesis(sentence({3}), slots);
  auto done = extend(root, Expansion{2, 0.0, {{0, 0.0, 1.0}}}, slots);
  EXPECT_THROW(expand(done, slots, Vocabulary(5)), UsageError);
}

TEST(Hypothesis, ScoreEqualsBreakdownOnRandomPaths) {
  for (std::uint32_t seed = 0; seed < 30; ++seed) {
    auto f = make_random_fixture(seed);
    auto slots = f.slots();
    auto h = initial_hypothesis(f.src, slots);
    std::mt19937 rng(seed);
    while (!h.complete() && h.length() < 8) {
      std::vector<Expansion> exps;
      try {
        exps = expand(h, slots, f.vocab);
      } catch (const DeadHypothesisError&) {
        break;
      }
      h = extend(h, exps[std::uniform_int_distribution<std::size_t>(0, exps.size() - 1)(rng)], slots);
      ASSERT_NEAR(h.score, breakdown_total(h), 1e-9);
      ASSERT_EQ(h.trajectory.front(), Vocabulary::kBos);
    }
  }
}

TEST(Hypothesis, RankingIsScoreThenTrajectory) {
  PartialHypothesis a, b;
  a.score = b.score = -1.0;
  a.trajectory = {1, 3, 4};
  b.trajectory = {1, 3, 5};
  EXPECT_TRUE(better(a, b));
  EXPECT_FALSE(better(b, a));
  b.score = -0.5;
  EXPECT_TRUE(better(b, a));
}

TEST(Hypothesis, ArgmaxInvariantUnderPositiveScaling) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> score(-5.0, 0.0), weight(0.1, 3.0), scale(0.01, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    Posterior a(score(rng)), b(score(rng));
    for (TokenId t = 3; t < 9; ++t) {
      a.set(t, score(rng));
      b.set(t, score(rng));
    }
    const double wa = weight(rng), wb = weight(rng), k = scale(rng);
    const auto base = argmax(combine({{&a, wa}, {&b, wb}}), Vocabulary(10));
    const auto scaled = argmax(combine({{&a, k * wa}, {&b, k * wb}}), Vocabulary(10));
    ASSERT_EQ(base.first, scaled.first);
  }
}

TEST(Hypothesis, ZeroWeightLeavesFullSupportScoresUnchanged) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> score(-5.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Posterior a(score(rng)), z(score(rng));
    for (TokenId t = 3; t < 9; ++t) {
      a.set(t, score(rng));
      if (t % 2) z.set(t, score(rng));
    }
    const auto alone = combine({{&a, 1.0}});
    const auto with_zero = combine({{&a, 1.0}, {&z, 0.0}});
    for (TokenId t = 0; t < 10; ++t) ASSERT_EQ(alone.score(t), with_zero.score(t));
  }
}

TEST(Hypothesis, ScoreTrajectoryMatchesOracle) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    auto f = make_random_fixture(seed);
    auto slots = f.slots();
    const std::vector<TokenId> traj{1, 3, 3, 2};
    const double got = score_trajectory(f.src, traj, slots);
    const double want = f.oracle(traj);
    if (want == kNegInf) {
      EXPECT_EQ(got, kNegInf);
    } else {
      EXPECT_NEAR(got, want, 1e-9);
    }
  }
}
