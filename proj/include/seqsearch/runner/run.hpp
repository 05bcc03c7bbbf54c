#pragma once

#include <cstddef>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/formats/corpus.hpp"
#include "seqsearch/formats/nbest.hpp"
#include "seqsearch/runner/factory.hpp"
#include "seqsearch/runner/pipeline.hpp"

namespace seqsearch {

struct RunHooks {
  /// Called on the worker thread right before a sentence is decoded.
  /// Throwing marks that sentence as failed.
  std::function<void(const SourceSentence&, std::size_t worker)> before_decode;
};

struct RunSummary {
  PipelineStats stats;
  /// 0 when every sentence produced a hypothesis, 1 otherwise.
  int exit_code() const { return stats.failed == 0 ? 0 : 1; }
};

/// Feature names for n-best output: the predictor names, with "_2", "_3"
/// appended to repeated ones.
inline std::vector<std::string> feature_names(const std::vector<std::string>& predictors) {
  std::map<std::string, std::size_t> total, used;
  for (const auto& p : predictors) ++total[p];
  std::vector<std::string> out;
  for (const auto& p : predictors) {
    const auto k = ++used[p];
    out.push_back(total[p] > 1 && k > 1 ? p + "_" + std::to_string(k) : p);
  }
  return out;
}

/// Unweighted per-predictor score sums of a complete hypothesis.
inline std::vector<double> raw_feature_sums(const PartialHypothesis& h, std::size_t num_slots) {
  std::vector<double> sums(num_slots, 0.0);
  for (const auto& step : h.score_breakdown) {
    for (const auto& term : step) sums.at(term.slot) += term.raw;
  }
  return sums;
}

inline std::vector<SourceSentence> select_range(std::vector<SourceSentence> all, const RunConfig& cfg) {
  if (!cfg.range) return all;
  const auto [a, b] = *cfg.range;
  if (b > all.size()) {
    throw ConfigError("range " + std::to_string(a) + ":" + std::to_string(b) + " exceeds the " +
                      std::to_string(all.size()) + " input lines");
  }
  return {std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(a - 1)),
          std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(b))};
}

/// Decodes cfg.input and writes one text line per sentence to `text_out`
/// and, if given, all n-best entries to `nbest_out`. A failed sentence
/// gets an empty text line and a record on `log`. Configuration problems
/// throw before any sentence is decoded.
inline RunSummary run_streams(const RunConfig& cfg, std::ostream* text_out, std::ostream* nbest_out,
                              std::ostream& log, const RunHooks& hooks = {}) {
  if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  if (cfg.input.empty()) throw ConfigError("no input file given");
  cfg.decoder_config.validate();
  if (!decoder_names().contains(cfg.decoder)) make_decoder(cfg.decoder, {}, Vocabulary(), cfg.decoder_config);

  auto resources = ResourceSet::load(cfg);
  // Building one full decoder up front surfaces configuration errors
  // before any work is scheduled.
  make_decoder(cfg.decoder, build_predictors(cfg, *resources), resources->vocab(), cfg.decoder_config,
               cfg.heuristic_predictors);

  const auto inputs = select_range(load_corpus(cfg.input, resources->src_symbols()), cfg);
  const auto names = feature_names(cfg.predictors);

  WorkerFactory factory = [&](std::size_t worker) -> DecodeFn {
    std::shared_ptr<Decoder> decoder = make_decoder(cfg.decoder, build_predictors(cfg, *resources),
                                                    resources->vocab(), cfg.decoder_config, cfg.heuristic_predictors);
    return [decoder, worker, &hooks](const SourceSentence& src) {
      if (hooks.before_decode) hooks.before_decode(src, worker);
      return decoder->decode(src);
    };
  };

  RunSummary summary;
  summary.stats = run_pipeline(inputs, cfg.workers, cfg.queue_capacity, factory, [&](JobResult&& r) {
    std::ostringstream rec;
    rec << "sentence " << r.sentence_id << " worker " << r.worker << " time " << std::fixed << std::setprecision(3)
        << r.seconds;
    if (r.failed()) {
      rec << " FAILED: " << r.error;
      if (text_out) *text_out << '\n';
    } else {
      const auto& best = r.result->best();
      rec << " score " << text::format_weight(best.score) << " expansions " << r.result->stats.expansions;
      if (r.result->stats.truncated) rec << " truncated";
      if (text_out) *text_out << detokenize(best.trajectory, resources->trg_symbols()) << '\n';
      if (nbest_out) {
        for (const auto& h : r.result->nbest) {
          NbestEntry e;
          e.sentence_id = r.sentence_id;
          e.tokens.assign(h.trajectory.begin() + 1, h.trajectory.end());
          if (!e.tokens.empty() && e.tokens.back() == Vocabulary::kEos) e.tokens.pop_back();
          const auto sums = raw_feature_sums(h, names.size());
          for (std::size_t i = 0; i < names.size(); ++i) e.features.emplace_back(names[i], sums[i]);
          e.total = h.score;
          *nbest_out << format_nbest_line(e, resources->trg_symbols());
        }
      }
    }
    log << rec.str() << '\n';
  });
  if (text_out) text_out->flush();
  if (nbest_out) nbest_out->flush();
  log << "decoded " << summary.stats.submitted << " sentences, " << summary.stats.failed << " failed\n";
  return summary;
}

/// File-level entry point: text goes to <prefix>.text (standard output
/// without a prefix), n-best lists to <prefix>.nbest.
inline RunSummary run(const RunConfig& cfg, std::ostream& stdout_stream, std::ostream& log,
                      const RunHooks& hooks = {}) {
  bool want_text = false, want_nbest = false;
  for (const auto& o : cfg.outputs) {
    if (o == "text") {
      want_text = true;
    } else if (o == "nbest") {
      want_nbest = true;
    } else {
      throw ConfigError("unknown output format '" + o + "' (expected text or nbest)");
    }
  }
  if (want_nbest && cfg.output_prefix.empty()) throw ConfigError("nbest output needs --output_prefix");

  std::ofstream text_file, nbest_file;
  std::ostream* text_out = nullptr;
  std::ostream* nbest_out = nullptr;
  auto open = [](std::ofstream& f, const std::string& path) {
    f.open(path);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    return &f;
  };
  if (want_text) text_out = cfg.output_prefix.empty() ? &stdout_stream : open(text_file, cfg.output_prefix + ".text");
  if (want_nbest) nbest_out = open(nbest_file, cfg.output_prefix + ".nbest");
  return run_streams(cfg, text_out, nbest_out, log, hooks);
}

}  // namespace seqsearch
