#pragma once

#include <cstdint>
#include <string>

namespace lexlaw {

struct SynthLanguage {
  std::string name;
  int n_types = 1000;        // adult lexicon size
  std::int64_t zipf_c = 4000;  // head frequency of the f = C/r profile
  std::uint64_t seed = 1;
};

// Writes one synthetic language under dir: transcripts/ (speaker-tagged
// utterance files), polysemy.tsv, phonetics.tsv, reffreq.txt, roles.tsv.
// Planted structure: Zipf-like frequencies, meaning counts rising with
// frequency, all three length measures falling with frequency, partial
// lexicon coverage, and a sprinkle of malformed input for the parsers.
// The polysemy lexicon's mean synset count is calibrated to 1.546.
// Same config -> byte-identical files.
void write_synthetic_language(const std::string& dir, const SynthLanguage& cfg);

// Three languages (elva, karu, mosi) plus a ready-to-run `run.conf`.
void write_bundled_corpus(const std::string& dir, std::uint64_t seed);

}  // namespace lexlaw
