#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqsearch/decoders/decoder.hpp"
#include "seqsearch/formats/text.hpp"

namespace seqsearch {

/// Everything needed to decode a corpus. Mirrors the command line.
struct RunConfig {
  std::vector<std::string> predictors;
  /// Positional weights; empty means 1.0 for every predictor.
  std::vector<double> weights;

  /// Resource files per predictor type ("fst", "nfst", "ngram", "forced",
  /// "forcedlst", "bow", "ngramc", "fsttok"). The k-th instance of a type
  /// uses the k-th path, or the only path if just one is given.
  std::map<std::string, std::vector<std::string>> resources;

  double unkc_c0 = 0.5;
  double unkc_c1 = 1.0;
  double length_a = 1.0;
  double length_b = 0.0;
  double length_sigma = 1.0;
  std::string forcedlst_mode = "rescore";  // or "accept"
  bool bow_repetition = false;
  std::string nfst_merge = "max";  // or "logsum"

  std::string decoder = "beam";
  DecoderConfig decoder_config;
  /// astar: slots whose per-step bound defines the heuristic (empty = zero heuristic).
  std::vector<std::size_t> heuristic_predictors;

  std::string src_syms;
  std::string trg_syms;
  std::size_t vocab_size = 0;

  std::string input;
  std::vector<std::string> outputs{"text"};
  /// Output files are <prefix>.text and <prefix>.nbest; empty prefix
  /// writes text to standard output.
  std::string output_prefix;
  std::size_t workers = 1;
  std::size_t queue_capacity = 16;
  /// 1-based inclusive line range.
  std::optional<std::pair<std::size_t, std::size_t>> range;
};

inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  if (text::trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(text::trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<double> parse_weights(std::string_view s) {
  std::vector<double> out;
  for (const auto& w : split_list(s)) {
    auto v = text::to_double(w);
    if (!v) throw ConfigError("invalid weight '" + w + "'");
    out.push_back(*v);
  }
  return out;
}

/// "A:B" with 1 <= A <= B.
inline std::pair<std::size_t, std::size_t> parse_range(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw ConfigError("range must be 'A:B'");
  auto a = text::to_int<std::size_t>(text::trim(s.substr(0, colon)));
  auto b = text::to_int<std::size_t>(text::trim(s.substr(colon + 1)));
  if (!a || !b || *a < 1 || *b < *a) throw ConfigError("range must be 'A:B' with 1 <= A <= B");
  return {*a, *b};
}

}  // namespace seqsearch
