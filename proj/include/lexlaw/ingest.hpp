#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "lexlaw/corpus.hpp"

namespace lexlaw {

struct Warning {
  std::string file;
  std::int64_t line = 0;  // 0 when not tied to a line
  std::string message;
};
using WarningList = std::vector<Warning>;

// Lowercases (ASCII plus the Latin-1 letter block), strips leading and
// trailing ASCII punctuation; internal apostrophes and hyphens survive.
// May return an empty string (pure punctuation tokens).
std::string normalize_word(const std::string& raw);

// Alphabetic characters only: ASCII letters and Latin-1/Latin-Extended-A
// codepoints. Digits, apostrophes, and hyphens do not count.
std::int64_t char_length(const std::string& form);

struct FreqTables {
  std::map<std::string, std::int64_t> child;
  std::map<std::string, std::int64_t> adult;

  std::map<std::string, std::int64_t>& for_role(Role r) {
    return r == Role::Child ? child : adult;
  }
  const std::map<std::string, std::int64_t>& for_role(Role r) const {
    return r == Role::Child ? child : adult;
  }
};

// CHI -> Child; MOT, FAT, INV -> Adult. Codes absent from the map also
// default to Adult during parsing.
std::map<std::string, Role> default_role_map();
std::map<std::string, Role> load_role_map(const std::string& path,
                                          WarningList& warnings);

// Lines beginning "*CODE:" are utterances; every other line is ignored.
// Token counts accumulate into `acc` per normalized form per role.
void parse_transcripts(std::istream& in,
                       const std::map<std::string, Role>& role_map,
                       FreqTables& acc, WarningList& warnings,
                       const std::string& filename = "");

// Parses every regular file in the directory in sorted filename order.
void parse_transcript_dir(const std::string& dir,
                          const std::map<std::string, Role>& role_map,
                          FreqTables& acc, WarningList& warnings);

struct SampaTable {
  std::vector<std::string> segments;  // multi-character segments
  std::string marks;                  // ignorable stress/length marks

  static SampaTable defaults();
  // TSV `symbol<TAB>segment|mark`; '#' starts a comment line.
  static SampaTable load(const std::string& path);
};

struct PhoneticEntry {
  std::int64_t phoneme_count = 0;
  std::int64_t syllable_count = 0;
};

// Greedy longest-match segmentation of a syllabified SAMPA string ('-'
// separates syllables; marks are stripped). phoneme_count is the number of
// segments, syllable_count the number of syllable parts. Throws InputError
// for untokenizable bytes (with the byte offset) and for empty syllables.
PhoneticEntry analyze_sampa(const std::string& syllabified,
                            const SampaTable& table);

std::map<std::string, PhoneticEntry> load_phonetic_lexicon(
    const std::string& path, const SampaTable& table, WarningList& warnings);

// `form<TAB>count` or `form<TAB>id,id,...` (count = distinct ids). Duplicate
// forms merge: union of ids, max of counts.
std::map<std::string, std::int64_t> load_polysemy_lexicon(
    const std::string& path, WarningList& warnings);

// `form<SPACE or TAB>count`; duplicate lines sum.
std::map<std::string, std::int64_t> load_reference_frequencies(
    const std::string& path, WarningList& warnings);

// Retains forms with a polysemy entry and at least one countable character;
// attaches reference frequency and phonetic lengths when available; computes
// per-role coverage. Throws InputError when nothing is analyzable.
Dataset join_dataset(const std::string& language, const FreqTables& freqs,
                     const std::map<std::string, std::int64_t>& polysemy,
                     const std::map<std::string, PhoneticEntry>& phonetics,
                     const std::map<std::string, std::int64_t>& reference,
                     WarningList& warnings);

struct IngestInputs {
  std::string transcripts_dir;
  std::string polysemy_path;
  std::string phonetics_path;
  std::string ref_freq_path;   // optional: empty -> no reference frequencies
  std::string role_map_path;   // optional: empty -> default_role_map()
  std::string symbols_path;    // optional: empty -> SampaTable::defaults()
  std::string language = "corpus";
};

// Full pipeline: parse transcripts, load lexicons, join.
Dataset ingest_dataset(const IngestInputs& in, WarningList& warnings);

}  // namespace lexlaw
