#pragma once

#include <string>
#include <utility>
#include <vector>

#include "seqsearch/decoders/beam.hpp"

namespace seqsearch {

/// System-level combination in one beam: every hypothesis is bound to a
/// single predictor slot (scored with that slot's weight only), the initial
/// beam holds one root per slot, and n-best selection is global.
class SepBeamDecoder : public BeamDecoder {
 public:
  SepBeamDecoder(std::vector<PredictorSlot> slots, Vocabulary vocab, DecoderConfig config)
      : BeamDecoder(std::move(slots), vocab, config) {
    if (slots_.size() < 2) throw ConfigError("sepbeam needs at least two predictors");
  }

  std::string name() const override { return "sepbeam"; }

  SearchResult decode(const SourceSentence& src) override {
    const PartialHypothesis root = start(src);
    std::vector<PartialHypothesis> beam;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      beam.push_back(root);
      beam.back().predictor_filter = i;
    }
    run_pass(beam, config_.beam_size);
    std::vector<PartialHypothesis> complete;
    for (auto& h : beam) {
      if (h.complete()) complete.push_back(std::move(h));
    }
    return finish(std::move(complete));
  }
};

}  // namespace seqsearch
