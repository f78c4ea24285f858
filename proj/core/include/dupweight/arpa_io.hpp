#pragma once

#include <string>

#include "dupweight/ngram_model.hpp"
#include "dupweight/tokenizer.hpp"

namespace dupweight {

// Classic ARPA text format. Probabilities and backoff weights are written in
// log10 with shortest round-trip decimals; entries whose internal value is
// the zero floor appear as the conventional -99. Sections are sorted by
// token-id sequence, so the same model always serializes to the same bytes.
void write_arpa(const std::string& path, const NgramModel& model,
                const Vocabulary& vocab);

struct LoadedArpa {
  NgramModel model;
  Vocabulary vocab;
};

// Reconstructs a model and its vocabulary from an ARPA file. The vocabulary
// comes from the unigram section: surfaces in whitespace mode, decimal ids
// in passthrough mode. Malformed input fails with file:line context.
LoadedArpa load_arpa(const std::string& path, Vocabulary::Mode mode);

}  // namespace dupweight
