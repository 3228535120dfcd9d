#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexlaw/common.hpp"

namespace lexlaw {

// Child vs everyone else; Adult aggregates all non-child speakers.
enum class Role { Child = 0, Adult = 1 };

enum class FreqSource { Childes = 0, Reference = 1 };

enum class CorrMethod { Pearson, Spearman, KendallA, KendallB };

const char* to_string(Role r);
const char* to_string(FreqSource s);
const char* to_string(CorrMethod m);
Role role_from_string(const std::string& s);
FreqSource freq_source_from_string(const std::string& s);

// One word form for one speaker role: two frequency counts, a meaning count,
// and three length measures. Optional fields are absent, never zero.
struct WordRecord {
  std::string form;
  Role role = Role::Adult;
  std::int64_t childes_freq = 0;
  std::optional<std::int64_t> reference_freq;
  std::optional<std::int64_t> polysemy;
  std::int64_t n_chars = 0;
  std::optional<std::int64_t> n_phonemes;
  std::optional<std::int64_t> n_syllables;

  // Validating constructor; throws InputError so no partially valid record is
  // observable. Checks: nonempty whitespace-free form, counts >= 1 where
  // present, n_syllables <= n_phonemes when both present.
  static WordRecord make(std::string form, Role role, std::int64_t childes_freq,
                         std::optional<std::int64_t> reference_freq,
                         std::optional<std::int64_t> polysemy,
                         std::int64_t n_chars,
                         std::optional<std::int64_t> n_phonemes,
                         std::optional<std::int64_t> n_syllables);

  bool operator==(const WordRecord&) const = default;
};

struct CoverageStats {
  std::int64_t analyzed_types = 0;
  std::int64_t total_types = 0;
  std::int64_t analyzed_tokens = 0;
  std::int64_t total_tokens = 0;
  double type_cover = 0.0;
  double token_cover = 0.0;

  // Computes the cover fractions; throws InputError if analyzed > total.
  static CoverageStats make(std::int64_t analyzed_types, std::int64_t total_types,
                            std::int64_t analyzed_tokens,
                            std::int64_t total_tokens);

  bool operator==(const CoverageStats&) const = default;
};

// Immutable analyzed collection. Records are sorted by (role, form) with
// Child before Adult, (form, role) keys are unique, and every record carries
// a polysemy count (the retention rule).
class Dataset {
 public:
  static Dataset make(std::string language, std::vector<WordRecord> records,
                      std::map<Role, CoverageStats> coverage);

  const std::string& language() const { return language_; }
  const std::vector<WordRecord>& records() const { return records_; }
  const std::map<Role, CoverageStats>& coverage() const { return coverage_; }

  std::vector<const WordRecord*> records_for(Role role) const;

  // Stable field names and record order; ends with a newline. Loading the
  // emitted text yields an equal Dataset (round-trip contract).
  std::string to_json() const;
  static Dataset from_json(const std::string& text);

  void save(const std::string& path) const;
  static Dataset load(const std::string& path);

 private:
  Dataset() = default;
  std::string language_;
  std::vector<WordRecord> records_;
  std::map<Role, CoverageStats> coverage_;
};

struct CorrelationResult {
  CorrMethod method = CorrMethod::Pearson;
  double coefficient = 0.0;
  // t for Pearson/Spearman, normal z for Kendall.
  double statistic = 0.0;
  double p_value = 1.0;
  std::int64_t n = 0;
};

}  // namespace lexlaw
