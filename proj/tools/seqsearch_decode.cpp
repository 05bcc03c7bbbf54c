// Command-line decoder: reads a tokenized corpus, decodes every sentence
// with the configured predictors and search strategy, writes hypotheses.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seqsearch/runner/run.hpp"

int main(int argc, char** argv) {
  using namespace seqsearch;

  CLI::App app{"seqsearch_decode: modular left-to-right decoding"};
  app.set_config("--config", "", "key=value configuration file (flags override it)");

  RunConfig cfg;
  std::vector<std::string> predictors, weights, outputs{"text"}, heuristic;
  std::string range;
  std::optional<int> sync_symbol;
  std::vector<std::string> fst_paths, nfst_paths, lm_paths, refs, nbest_paths, bag_paths, ngramc_paths, fsttok_paths;

  app.add_option("--predictors", predictors, "comma-separated predictor names, e.g. fst,ngram,wc")
      ->required()
      ->delimiter(',');
  app.add_option("--weights", weights, "comma-separated weights (default 1.0 each)")->delimiter(',');
  app.add_option("--decoder", cfg.decoder, "greedy|beam|dfs|restarting|astar|sepbeam|syncbeam|bucket")
      ->capture_default_str();
  app.add_option("--beam", cfg.decoder_config.beam_size, "beam size")->capture_default_str();
  app.add_option("--max_len", cfg.decoder_config.max_len, "maximum output length, eos included")
      ->capture_default_str();
  app.add_option("--max_len_factor", cfg.decoder_config.max_len_factor,
                 "limit length to factor * source length (0 disables)")
      ->capture_default_str();
  app.add_option("--nbest", cfg.decoder_config.nbest, "hypotheses kept per sentence")->capture_default_str();
  app.add_option("--node_budget", cfg.decoder_config.node_budget, "expansion cap, 0 = unlimited")
      ->capture_default_str();
  app.add_flag("--nonpositive_scores", cfg.decoder_config.nonpositive_scores,
               "assert step scores are <= 0 and prune admissibly");
  app.add_option("--sync_symbol", sync_symbol, "syncbeam synchronization token id");
  app.add_option("--sync_depth", cfg.decoder_config.sync_depth, "syncbeam depth cap")->capture_default_str();
  app.add_option("--heuristic_predictors", heuristic, "astar: comma-separated slot indices for the heuristic")
      ->delimiter(',');

  app.add_option("--input", cfg.input, "source corpus, one tokenized sentence per line")->required();
  app.add_option("--outputs", outputs, "comma-separated: text,nbest")->delimiter(',')->capture_default_str();
  app.add_option("--output_prefix", cfg.output_prefix, "write <prefix>.text / <prefix>.nbest");
  app.add_option("--workers", cfg.workers, "decoding threads")->capture_default_str();
  app.add_option("--queue_capacity", cfg.queue_capacity, "pipeline queue bound")->capture_default_str();
  app.add_option("--range", range, "1-based inclusive line range A:B");
  app.add_option("--src_syms", cfg.src_syms, "source symbol table (default: numeric ids)");
  app.add_option("--trg_syms", cfg.trg_syms, "target symbol table (default: numeric ids)");
  app.add_option("--vocab_size", cfg.vocab_size, "target vocabulary size (default: from --trg_syms)");

  app.add_option("--fst_path", fst_paths, "ATT FST per fst instance")->delimiter(',');
  app.add_option("--nfst_path", nfst_paths, "ATT FST per nfst instance")->delimiter(',');
  app.add_option("--lm_path", lm_paths, "ARPA model per ngram instance")->delimiter(',');
  app.add_option("--references", refs, "reference file per forced instance")->delimiter(',');
  app.add_option("--nbest_path", nbest_paths, "n-best file per forcedlst instance")->delimiter(',');
  app.add_option("--bag_path", bag_paths, "bag file per bow instance")->delimiter(',');
  app.add_option("--ngramc_path", ngramc_paths, "n-gram table per ngramc instance")->delimiter(',');
  app.add_option("--fsttok_path", fsttok_paths, "tokenization transducer per fsttok_ wrapper")->delimiter(',');

  app.add_option("--unkc_c0", cfg.unkc_c0, "unkc: lambda offset")->capture_default_str();
  app.add_option("--unkc_c1", cfg.unkc_c1, "unkc: lambda per source unk")->capture_default_str();
  app.add_option("--length_a", cfg.length_a, "length: mean slope")->capture_default_str();
  app.add_option("--length_b", cfg.length_b, "length: mean offset")->capture_default_str();
  app.add_option("--length_sigma", cfg.length_sigma, "length: standard deviation")->capture_default_str();
  app.add_option("--forcedlst_mode", cfg.forcedlst_mode, "accept|rescore")->capture_default_str();
  app.add_flag("--bow_repetition", cfg.bow_repetition, "bow: allow repeated words");
  app.add_option("--nfst_merge", cfg.nfst_merge, "nfst duplicate labels: max|logsum")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    auto trimmed = [](const std::vector<std::string>& items) {
      std::vector<std::string> out;
      for (const auto& i : items) {
        if (!text::trim(i).empty()) out.emplace_back(text::trim(i));
      }
      return out;
    };
    cfg.predictors = trimmed(predictors);
    for (const auto& w : trimmed(weights)) {
      const auto v = text::to_double(w);
      if (!v) throw ConfigError("invalid weight '" + w + "'");
      cfg.weights.push_back(*v);
    }
    cfg.outputs = trimmed(outputs);
    if (!range.empty()) cfg.range = parse_range(range);
    if (sync_symbol) cfg.decoder_config.sync_symbol = *sync_symbol;
    for (const auto& s : trimmed(heuristic)) {
      auto v = text::to_int<std::size_t>(s);
      if (!v) throw ConfigError("invalid heuristic slot '" + s + "'");
      cfg.heuristic_predictors.push_back(*v);
    }
    auto put = [&](const char* type, const std::vector<std::string>& paths) {
      if (!paths.empty()) cfg.resources[type] = paths;
    };
    put("fst", fst_paths);
    put("nfst", nfst_paths);
    put("ngram", lm_paths);
    put("forced", refs);
    put("forcedlst", nbest_paths);
    put("bow", bag_paths);
    put("ngramc", ngramc_paths);
    put("fsttok", fsttok_paths);

    return run(cfg, std::cout, std::cerr).exit_code();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
