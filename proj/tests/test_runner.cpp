#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "support/golden.hpp"
#include "support/runner_fixture.hpp"

using namespace seqsearch;
using namespace seqsearch::testing;

namespace {

std::vector<SourceSentence> numbered(std::size_t n) {
  std::vector<SourceSentence> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(sentence({static_cast<TokenId>(i + 3)}, i));
  return out;
}

SearchResult echo(const SourceSentence& src) {
  PartialHypothesis h;
  h.trajectory = {Vocabulary::kBos, src.tokens.front(), Vocabulary::kEos};
  h.score = -static_cast<double>(src.id);
  return SearchResult{{h}, {}};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("seqsearch_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

// ---- bounded queue --------------------------------------------------------

TEST(BoundedQueue, FifoAndClose) {
  BoundedQueue<int> q(4);
  q.push(1);
  q.push(2);
  q.close();
  EXPECT_EQ(q.pop(), 1);
  EXPECT_EQ(q.pop(), 2);
  EXPECT_EQ(q.pop(), std::nullopt);
}

TEST(BoundedQueue, PushBlocksWhenFull) {
  BoundedQueue<int> q(1);
  q.push(1);
  std::atomic<bool> pushed{false};
  std::thread producer([&] {
    q.push(2);
    pushed = true;
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(30));
  EXPECT_FALSE(pushed.load());
  EXPECT_EQ(q.pop(), 1);
  producer.join();
  EXPECT_TRUE(pushed.load());
  EXPECT_EQ(q.pop(), 2);
}

TEST(BoundedQueue, ZeroCapacityIsConfigError) { EXPECT_THROW(BoundedQueue<int>(0), ConfigError); }

// ---- pipeline -------------------------------------------------------------

TEST(Pipeline, EmitsInInputOrderUnderRandomDelays) {
  const auto inputs = numbered(200);
  for (std::size_t workers : {1, 3, 8}) {
    std::vector<std::size_t> order;
    const auto stats = run_pipeline(
        inputs, workers, 4,
        [](std::size_t w) -> DecodeFn {
          auto rng = std::make_shared<std::mt19937>(w);
          return [rng](const SourceSentence& s) {
            std::this_thread::sleep_for(std::chrono::microseconds(std::uniform_int_distribution<int>(0, 400)(*rng)));
            return echo(s);
          };
        },
        [&](JobResult&& r) {
          EXPECT_FALSE(r.failed());
          EXPECT_EQ(r.result->best().trajectory[1], static_cast<TokenId>(r.index + 3));
          order.push_back(r.index);
        });
    ASSERT_EQ(order.size(), inputs.size());
    for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(order[i], i);
    EXPECT_EQ(stats.submitted, 200u);
    EXPECT_EQ(stats.completed, 200u);
    EXPECT_EQ(stats.failed, 0u);
  }
}

TEST(Pipeline, FailuresAreReportedNotLost) {
  const auto inputs = numbered(100);
  std::vector<JobResult> seen;
  const auto stats = run_pipeline(
      inputs, 4, 2,
      [](std::size_t) -> DecodeFn {
        return [](const SourceSentence& s) {
          if (s.id % 7 == 3) throw std::runtime_error("injected");
          if (s.id % 11 == 5) return SearchResult{};
          return echo(s);
        };
      },
      [&](JobResult&& r) { seen.push_back(std::move(r)); });
  ASSERT_EQ(seen.size(), 100u);
  std::size_t failed = 0;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    EXPECT_EQ(seen[i].index, i);
    const bool expect_fail = i % 7 == 3 || i % 11 == 5;
    EXPECT_EQ(seen[i].failed(), expect_fail) << i;
    if (i % 7 == 3) {
      EXPECT_EQ(seen[i].error, "injected");
    }
    failed += expect_fail;
  }
  EXPECT_EQ(stats.failed, failed);
  EXPECT_EQ(stats.submitted, stats.completed + stats.failed);
}

TEST(Pipeline, BrokenWorkerSetupFailsItsJobsOnly) {
  const auto inputs = numbered(60);
  std::size_t emitted = 0;
  const auto stats = run_pipeline(
      inputs, 3, 2,
      [](std::size_t w) -> DecodeFn {
        if (w == 1) throw ConfigError("no model for worker 1");
        return [](const SourceSentence& s) {
          std::this_thread::sleep_for(std::chrono::microseconds(100));
          return echo(s);
        };
      },
      [&](JobResult&& r) {
        ++emitted;
        if (r.worker == 1) {
          EXPECT_TRUE(r.failed());
        }
      });
  EXPECT_EQ(emitted, 60u);
  EXPECT_EQ(stats.submitted, stats.completed + stats.failed);
  EXPECT_GT(stats.completed, 0u);
}

TEST(Pipeline, EmptyInput) {
  const auto stats = run_pipeline({}, 2, 2, [](std::size_t) -> DecodeFn { return echo; }, [](JobResult&&) {});
  EXPECT_EQ(stats.submitted, 0u);
}

TEST(Pipeline, ZeroWorkersIsConfigError) {
  const auto inputs = numbered(1);
  EXPECT_THROW(run_pipeline(inputs, 0, 2, [](std::size_t) -> DecodeFn { return echo; }, [](JobResult&&) {}),
               ConfigError);
}

// ---- predictor construction ----------------------------------------------

TEST(BuildPredictors, TwoInstancesOfOneType) {
  auto cfg = runner_config();
  cfg.predictors = {"ngram", "ngram"};
  cfg.weights = {};
  cfg.resources["ngram"] = {fixture("runner/lm.arpa"), fixture("valid/tiny.arpa")};
  auto res = ResourceSet::load(cfg);
  const auto slots = build_predictors(cfg, *res);
  ASSERT_EQ(slots.size(), 2u);
  EXPECT_EQ(slots[0].weight, 1.0);
  EXPECT_EQ(slots[1].weight, 1.0);
  EXPECT_NE(slots[0].predictor, slots[1].predictor);
  EXPECT_EQ(feature_names(cfg.predictors), (std::vector<std::string>{"ngram", "ngram_2"}));
}

TEST(BuildPredictors, PositionalWeights) {
  RunConfig cfg;
  cfg.predictors = {"fst", "ngram", "wc"};
  cfg.weights = parse_weights("1.0,0.8,-0.2");
  cfg.resources["fst"] = {fixture("valid/two_labels.fst")};
  cfg.resources["ngram"] = {fixture("valid/backoff.arpa")};
  cfg.trg_syms = fixture("valid/ab.syms");
  cfg.vocab_size = 7;
  auto res = ResourceSet::load(cfg);
  const auto slots = build_predictors(cfg, *res);
  ASSERT_EQ(slots.size(), 3u);
  EXPECT_EQ(slots[0].predictor->name(), "fst");
  EXPECT_EQ(slots[1].predictor->name(), "ngram");
  EXPECT_EQ(slots[2].predictor->name(), "wc");
  EXPECT_EQ(slots[1].weight, 0.8);
  EXPECT_EQ(slots[2].weight, -0.2);
  EXPECT_EQ(res->vocab().size, 7);
}

TEST(BuildPredictors, UnsupportedNeuralPredictor) {
  RunConfig cfg;
  cfg.predictors = {"nmt"};
  cfg.vocab_size = 10;
  EXPECT_THROW(ResourceSet::load(cfg), ConfigError);
  cfg.predictors = {"wc"};
  auto res = ResourceSet::load(cfg);
  cfg.predictors = {"wc", "nmt"};
  EXPECT_THROW(build_predictors(cfg, *res), ConfigError);
}

TEST(BuildPredictors, ConfigErrors) {
  RunConfig cfg;
  cfg.vocab_size = 10;
  auto res = ResourceSet::load(cfg);
  cfg.predictors = {};
  EXPECT_THROW(build_predictors(cfg, *res), ConfigError);
  cfg.predictors = {"wc", "unkc"};
  cfg.weights = {1.0};
  EXPECT_THROW(build_predictors(cfg, *res), ConfigError);
  cfg.weights = {};
  cfg.predictors = {"banana"};
  EXPECT_THROW(build_predictors(cfg, *res), ConfigError);
  cfg.predictors = {"fst"};
  EXPECT_THROW(ResourceSet::load(cfg), ConfigError);
  RunConfig no_vocab;
  no_vocab.predictors = {"wc"};
  EXPECT_THROW(ResourceSet::load(no_vocab), ConfigError);
}

TEST(BuildPredictors, SrilmIsNgram) {
  RunConfig cfg;
  cfg.predictors = {"srilm"};
  cfg.resources["ngram"] = {fixture("valid/tiny.arpa")};
  cfg.vocab_size = 5;
  auto res = ResourceSet::load(cfg);
  EXPECT_EQ(build_predictors(cfg, *res).front().predictor->name(), "ngram");
}

TEST(BuildPredictors, FsttokWrapsInner) {
  RunConfig cfg;
  cfg.predictors = {"fsttok_wc"};
  cfg.resources["fsttok"] = {fixture("valid/two_labels.fst")};
  cfg.vocab_size = 8;
  auto res = ResourceSet::load(cfg);
  EXPECT_EQ(build_predictors(cfg, *res).front().predictor->name(), "fsttok_wc");
}

// ---- end-to-end runs ------------------------------------------------------

TEST(Run, ForcedReproducesReferences) {
  RunConfig cfg;
  cfg.predictors = {"forced"};
  cfg.resources["forced"] = {fixture("runner/refs.txt")};
  cfg.trg_syms = cfg.src_syms = fixture("runner/words.syms");
  cfg.input = fixture("runner/refs.txt");
  cfg.decoder = "greedy";
  cfg.decoder_config.max_len_factor = 0.0;
  const auto out = run_in_memory(cfg);
  EXPECT_EQ(out.text, read_text(fixture("runner/refs.txt")));
  EXPECT_EQ(out.summary.exit_code(), 0);
}

TEST(Run, RangeSelectsLines) {
  RunConfig cfg;
  cfg.predictors = {"forced"};
  cfg.resources["forced"] = {fixture("runner/refs.txt")};
  cfg.trg_syms = cfg.src_syms = fixture("runner/words.syms");
  cfg.input = fixture("runner/refs.txt");
  cfg.decoder = "greedy";
  cfg.decoder_config.max_len_factor = 0.0;
  cfg.range = parse_range("2:3");
  const auto out = run_in_memory(cfg);
  const auto refs = lines_of(read_text(fixture("runner/refs.txt")));
  EXPECT_EQ(lines_of(out.text), (std::vector<std::string>{refs[1], refs[2]}));
  EXPECT_NE(out.log.find("sentence 1 worker"), std::string::npos);

  cfg.range = parse_range("4:9");
  EXPECT_THROW(run_in_memory(cfg), ConfigError);
  EXPECT_THROW(parse_range("3:2"), ConfigError);
  EXPECT_THROW(parse_range("0:2"), ConfigError);
}

TEST(Run, WorkerCountDoesNotChangeOutput) {
  const auto one = run_in_memory(runner_config(1));
  EXPECT_EQ(lines_of(one.text).size(), 50u);
  EXPECT_EQ(one.summary.stats.completed, 50u);
  for (std::size_t w : {2, 4}) {
    const auto many = run_in_memory(runner_config(w));
    EXPECT_EQ(many.text, one.text) << w;
    EXPECT_EQ(many.nbest, one.nbest) << w;
  }
}

TEST(Run, NbestLinesCarryFeatureSums) {
  const auto out = run_in_memory(runner_config());
  const auto list = parse_nbest(out.nbest, SymbolTable::load(fixture("runner/words.syms")));
  ASSERT_EQ(list.entries().size(), 150u);
  for (const auto& e : list.entries()) {
    ASSERT_EQ(e.features.size(), 2u);
    EXPECT_EQ(e.features[0].first, "ngram");
    EXPECT_EQ(e.features[1].first, "wc");
    EXPECT_EQ(e.features[1].second, static_cast<double>(e.tokens.size()));
    EXPECT_NEAR(e.total, e.features[0].second - 0.1 * e.features[1].second, 1e-5);
  }
}

TEST(Run, InjectedFailureLeavesEmptyLine) {
  RunHooks hooks;
  hooks.before_decode = [](const SourceSentence& s, std::size_t) {
    if (s.id == 7) throw std::runtime_error("worker crashed");
  };
  const auto out = run_in_memory(runner_config(4), hooks);
  const auto clean = run_in_memory(runner_config(1));
  auto got = lines_of(out.text), want = lines_of(clean.text);
  ASSERT_EQ(got.size(), 50u);
  EXPECT_EQ(got[7], "");
  want[7] = "";
  EXPECT_EQ(got, want);
  EXPECT_EQ(out.summary.stats.failed, 1u);
  EXPECT_EQ(out.summary.stats.submitted, out.summary.stats.completed + out.summary.stats.failed);
  EXPECT_EQ(out.summary.exit_code(), 1);
  EXPECT_NE(out.log.find("sentence 7 worker"), std::string::npos);
  EXPECT_NE(out.log.find("FAILED: worker crashed"), std::string::npos);
  EXPECT_NE(out.log.find("decoded 50 sentences, 1 failed"), std::string::npos);
}

TEST(Run, ConfigErrorsBeforeDecoding) {
  auto cfg = runner_config();
  cfg.decoder = "vanilla";
  EXPECT_THROW(run_in_memory(cfg), ConfigError);
  cfg = runner_config();
  cfg.predictors = {"ngram", "rnnlm"};
  EXPECT_THROW(run_in_memory(cfg), ConfigError);
  cfg = runner_config();
  cfg.outputs = {"nbest"};
  std::ostringstream sink;
  EXPECT_THROW(run(cfg, sink, sink), ConfigError);
}

TEST(Run, OutputPrefixWritesFiles) {
  const auto dir = scratch_dir("prefix");
  auto cfg = runner_config();
  cfg.outputs = {"text", "nbest"};
  cfg.output_prefix = (dir / "out").string();
  std::ostringstream stdout_sink, log;
  run(cfg, stdout_sink, log);
  EXPECT_EQ(stdout_sink.str(), "");
  const auto in_memory = run_in_memory(runner_config());
  EXPECT_EQ(read_text(cfg.output_prefix + ".text"), in_memory.text);
  EXPECT_EQ(read_text(cfg.output_prefix + ".nbest"), in_memory.nbest);
  std::filesystem::remove_all(dir);
}

// ---- command line ---------------------------------------------------------

namespace {

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto dir = scratch_dir("cli");
  const std::string runner_dir = fixture("runner");
  const std::string out = (dir / "cli.txt").string();
  const int code = shell("cd '" + runner_dir + "' && '" SEQSEARCH_DECODE_BIN "' --config decode.ini --lm_path lm.arpa" +
                         " --input src.txt --beam 1 --workers 2 > '" + out + "' 2> '" + out + ".log'");
  ASSERT_EQ(code, 0) << read_text(out + ".log");

  auto cfg = runner_config();
  cfg.decoder_config.beam_size = 1;
  cfg.decoder_config.nbest = 1;
  EXPECT_EQ(read_text(out), run_in_memory(cfg).text);
  std::filesystem::remove_all(dir);
}

TEST(Cli, ConfigErrorExitsWithTwo) {
  const auto dir = scratch_dir("cli_err");
  const std::string log = (dir / "err.log").string();
  const int code = shell("cd '" + fixture("runner") + "' && '" SEQSEARCH_DECODE_BIN
                         "' --predictors nmt --vocab_size 10 --input src.txt > /dev/null 2> '" + log + "'");
  EXPECT_EQ(code, 2);
  EXPECT_NE(read_text(log).find("error: "), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, NbestOutputFiles) {
  const auto dir = scratch_dir("cli_nbest");
  const std::string prefix = (dir / "run").string();
  const int code = shell("cd '" + fixture("runner") + "' && '" SEQSEARCH_DECODE_BIN
                         "' --config decode.ini --lm_path lm.arpa --input src.txt --range 1:5 --nbest 2"
                         " --outputs text,nbest --output_prefix '" + prefix + "' 2> /dev/null");
  ASSERT_EQ(code, 0);
  EXPECT_EQ(lines_of(read_text(prefix + ".text")).size(), 5u);
  EXPECT_EQ(lines_of(read_text(prefix + ".nbest")).size(), 10u);
  std::filesystem::remove_all(dir);
}
