#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "seqsearch/decoders/astar.hpp"
#include "seqsearch/decoders/beam.hpp"
#include "seqsearch/decoders/bucket.hpp"
#include "seqsearch/decoders/dfs.hpp"
#include "seqsearch/decoders/restarting.hpp"
#include "seqsearch/decoders/sepbeam.hpp"
#include "seqsearch/decoders/syncbeam.hpp"
#include "seqsearch/formats/corpus.hpp"
#include "seqsearch/predictors/constraints.hpp"
#include "seqsearch/predictors/counting.hpp"
#include "seqsearch/predictors/fst.hpp"
#include "seqsearch/predictors/ngram.hpp"
#include "seqsearch/predictors/ngramc.hpp"
#include "seqsearch/runner/config.hpp"
#include "seqsearch/wrappers/fsttok.hpp"

namespace seqsearch {

inline const std::set<std::string>& unsupported_predictors() {
  static const std::set<std::string> names{"nmt", "rnnlm", "nplm", "rtn", "lrhiero"};
  return names;
}

/// Maps aliases to the resource key of a predictor type.
inline std::string canonical_predictor(const std::string& name) {
  if (name == "srilm") return "ngram";
  return name;
}

inline bool known_predictor(const std::string& name) {
  static const std::set<std::string> names{"fst",  "nfst", "ngram",  "forced", "forcedlst",
                                           "bow",  "wc",   "unkc",   "ngramc", "length"};
  return names.contains(canonical_predictor(name));
}

inline void check_predictor_name(const std::string& name) {
  if (unsupported_predictors().contains(name)) {
    throw ConfigError("predictor '" + name +
                      "' is not supported: it needs a neural or grammar toolkit (see README, 'Predictors')");
  }
  if (!known_predictor(name)) throw ConfigError("unknown predictor '" + name + "'");
}

/// Splits "fsttok_ngram" into {"fsttok", "ngram"}; plain names have no wrapper.
inline std::pair<std::string, std::string> split_wrapper(const std::string& spec) {
  const std::string prefix = "fsttok_";
  if (spec.starts_with(prefix)) return {"fsttok", spec.substr(prefix.size())};
  return {"", spec};
}

/// Read-only resources shared by every worker: symbol tables and every
/// file the configured predictors refer to, each loaded once.
class ResourceSet {
 public:
  static std::shared_ptr<const ResourceSet> load(const RunConfig& cfg) {
    auto r = std::shared_ptr<ResourceSet>(new ResourceSet());
    r->src_syms_ = cfg.src_syms.empty() ? SymbolTable::numeric() : SymbolTable::load(cfg.src_syms);
    r->trg_syms_ = cfg.trg_syms.empty() ? SymbolTable::numeric() : SymbolTable::load(cfg.trg_syms);
    if (cfg.trg_syms.empty() && cfg.vocab_size == 0) {
      throw ConfigError("vocabulary size unknown: pass --vocab_size or --trg_syms");
    }
    const auto size = std::max<std::size_t>(cfg.vocab_size, static_cast<std::size_t>(r->trg_syms_.bound()));
    r->vocab_ = Vocabulary(static_cast<TokenId>(size));

    std::map<std::string, std::size_t> seen;
    auto next_path = [&](const std::string& type) {
      return resource_path(cfg, type, seen[type]++);
    };
    for (const auto& spec : cfg.predictors) {
      auto [wrapper, name] = split_wrapper(spec);
      check_predictor_name(name);
      if (!wrapper.empty()) r->load_fst(next_path(wrapper));
      const auto type = canonical_predictor(name);
      if (type == "fst" || type == "nfst") {
        r->load_fst(next_path(type));
      } else if (type == "ngram") {
        const auto path = next_path(type);
        if (!r->lms_.contains(path)) r->lms_.emplace(path, std::make_shared<const NgramModel>(load_arpa(path)));
      } else if (type == "forced" || type == "bow") {
        const auto path = next_path(type);
        if (!r->token_lists_.contains(path)) {
          auto lines = std::make_shared<std::vector<std::vector<TokenId>>>();
          for (auto& s : load_corpus(path, r->trg_syms_)) lines->push_back(std::move(s.tokens));
          r->token_lists_.emplace(path, std::move(lines));
        }
      } else if (type == "forcedlst") {
        const auto path = next_path(type);
        if (!r->nbests_.contains(path)) {
          r->nbests_.emplace(path, std::make_shared<const NbestList>(load_nbest(path, r->trg_syms_)));
        }
      } else if (type == "ngramc") {
        const auto path = next_path(type);
        if (!r->ngram_tables_.contains(path)) {
          r->ngram_tables_.emplace(path, std::make_shared<const NgramTable>(load_ngram_table(path, r->trg_syms_)));
        }
      }
    }
    return r;
  }

  static std::string resource_path(const RunConfig& cfg, const std::string& type, std::size_t k) {
    auto it = cfg.resources.find(type);
    if (it == cfg.resources.end() || it->second.empty()) {
      throw ConfigError("predictor type '" + type + "' needs a resource file (--" + flag_for(type) + ")");
    }
    if (it->second.size() == 1) return it->second.front();
    if (k >= it->second.size()) {
      throw ConfigError("not enough --" + flag_for(type) + " paths for every '" + type + "' instance");
    }
    return it->second[k];
  }

  static std::string flag_for(const std::string& type) {
    static const std::map<std::string, std::string> flags{
        {"fst", "fst_path"},         {"nfst", "nfst_path"}, {"ngram", "lm_path"},
        {"forced", "references"},    {"forcedlst", "nbest_path"}, {"bow", "bag_path"},
        {"ngramc", "ngramc_path"},   {"fsttok", "fsttok_path"}};
    auto it = flags.find(type);
    return it == flags.end() ? type : it->second;
  }

  const SymbolTable& src_symbols() const { return src_syms_; }
  const SymbolTable& trg_symbols() const { return trg_syms_; }
  const Vocabulary& vocab() const { return vocab_; }

  std::shared_ptr<const FstResource> fst(const std::string& path) const { return get(fsts_, path); }
  std::shared_ptr<const NgramModel> lm(const std::string& path) const { return get(lms_, path); }
  std::shared_ptr<const std::vector<std::vector<TokenId>>> token_lines(const std::string& path) const {
    return get(token_lists_, path);
  }
  std::shared_ptr<const NbestList> nbest(const std::string& path) const { return get(nbests_, path); }
  std::shared_ptr<const NgramTable> ngram_table(const std::string& path) const { return get(ngram_tables_, path); }

 private:
  ResourceSet() : src_syms_(SymbolTable::numeric()), trg_syms_(SymbolTable::numeric()) {}

  void load_fst(const std::string& path) {
    if (!fsts_.contains(path)) fsts_.emplace(path, FstResource::load(path));
  }

  template <typename Map>
  static typename Map::mapped_type get(const Map& m, const std::string& path) {
    auto it = m.find(path);
    if (it == m.end()) throw UsageError("resource '" + path + "' was not loaded");
    return it->second;
  }

  SymbolTable src_syms_;
  SymbolTable trg_syms_;
  Vocabulary vocab_;
  std::map<std::string, std::shared_ptr<const FstResource>> fsts_;
  std::map<std::string, std::shared_ptr<const NgramModel>> lms_;
  std::map<std::string, std::shared_ptr<const std::vector<std::vector<TokenId>>>> token_lists_;
  std::map<std::string, std::shared_ptr<const NbestList>> nbests_;
  std::map<std::string, std::shared_ptr<const NgramTable>> ngram_tables_;
};

/// Fresh predictor instances for the configured constellation, paired with
/// their weights. Safe to call from several threads on one ResourceSet.
inline std::vector<PredictorSlot> build_predictors(const RunConfig& cfg, const ResourceSet& res) {
  if (cfg.predictors.empty()) throw ConfigError("no predictors configured");
  if (!cfg.weights.empty() && cfg.weights.size() != cfg.predictors.size()) {
    throw ConfigError(std::to_string(cfg.predictors.size()) + " predictors but " + std::to_string(cfg.weights.size()) +
                      " weights");
  }
  std::map<std::string, std::size_t> seen;
  auto next_path = [&](const std::string& type) { return ResourceSet::resource_path(cfg, type, seen[type]++); };

  std::vector<PredictorSlot> slots;
  for (std::size_t i = 0; i < cfg.predictors.size(); ++i) {
    auto [wrapper, name] = split_wrapper(cfg.predictors[i]);
    check_predictor_name(name);
    std::string transducer;
    if (!wrapper.empty()) transducer = next_path(wrapper);
    const auto type = canonical_predictor(name);

    std::shared_ptr<Predictor> p;
    if (type == "fst" || type == "nfst") {
      LabelMerge merge = LabelMerge::kMax;
      if (cfg.nfst_merge == "logsum") {
        merge = LabelMerge::kLogSum;
      } else if (cfg.nfst_merge != "max") {
        throw ConfigError("nfst_merge must be 'max' or 'logsum'");
      }
      p = std::make_shared<FstPredictor>(res.fst(next_path(type)), type == "fst", merge);
    } else if (type == "ngram") {
      p = std::make_shared<NgramPredictor>(res.lm(next_path(type)), res.trg_symbols(), res.vocab());
    } else if (type == "forced") {
      p = std::make_shared<ForcedPredictor>(res.token_lines(next_path(type)));
    } else if (type == "forcedlst") {
      NbestMode mode = NbestMode::kRescore;
      if (cfg.forcedlst_mode == "accept") {
        mode = NbestMode::kAcceptOnly;
      } else if (cfg.forcedlst_mode != "rescore") {
        throw ConfigError("forcedlst_mode must be 'accept' or 'rescore'");
      }
      p = std::make_shared<ForcedLstPredictor>(res.nbest(next_path(type)), mode);
    } else if (type == "bow") {
      p = std::make_shared<BagOfWordsPredictor>(res.token_lines(next_path(type)), cfg.bow_repetition);
    } else if (type == "wc") {
      p = std::make_shared<WordCountPredictor>();
    } else if (type == "unkc") {
      p = std::make_shared<UnkCountPredictor>(cfg.unkc_c0, cfg.unkc_c1);
    } else if (type == "ngramc") {
      p = std::make_shared<NgramCountPredictor>(res.ngram_table(next_path(type)));
    } else if (type == "length") {
      p = std::make_shared<LengthPredictor>(cfg.length_a, cfg.length_b, cfg.length_sigma);
    }
    if (!wrapper.empty()) p = std::make_shared<FsttokPredictor>(res.fst(transducer), std::move(p));
    const double w = cfg.weights.empty() ? 1.0 : cfg.weights[i];
    check_weight(w);
    slots.push_back(PredictorSlot{std::move(p), w});
  }
  return slots;
}

inline const std::set<std::string>& decoder_names() {
  static const std::set<std::string> names{"greedy", "beam",    "dfs",      "restarting",
                                           "astar",  "sepbeam", "syncbeam", "bucket"};
  return names;
}

inline std::unique_ptr<Decoder> make_decoder(const std::string& name, std::vector<PredictorSlot> slots,
                                             const Vocabulary& vocab, const DecoderConfig& cfg,
                                             const std::vector<std::size_t>& heuristic_slots = {}) {
  if (name == "greedy") return std::make_unique<GreedyDecoder>(std::move(slots), vocab, cfg);
  if (name == "beam") return std::make_unique<BeamDecoder>(std::move(slots), vocab, cfg);
  if (name == "dfs") return std::make_unique<DfsDecoder>(std::move(slots), vocab, cfg);
  if (name == "restarting") return std::make_unique<RestartingDecoder>(std::move(slots), vocab, cfg);
  if (name == "astar") {
    HeuristicFn h = heuristic_slots.empty() ? zero_heuristic() : predictor_heuristic(slots, heuristic_slots, vocab);
    return std::make_unique<AStarDecoder>(std::move(slots), vocab, cfg, std::move(h));
  }
  if (name == "sepbeam") return std::make_unique<SepBeamDecoder>(std::move(slots), vocab, cfg);
  if (name == "syncbeam") return std::make_unique<SyncBeamDecoder>(std::move(slots), vocab, cfg);
  if (name == "bucket") return std::make_unique<BucketDecoder>(std::move(slots), vocab, cfg);
  if (name == "vanilla") throw ConfigError("decoder 'vanilla' is not supported: it bypasses the predictor framework");
  throw ConfigError("unknown decoder '" + name + "'");
}

}  // namespace seqsearch
