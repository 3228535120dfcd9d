#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lexlaw/corpus.hpp"

namespace lexlaw {

enum class LengthVar { Chars = 0, Phonemes = 1, Syllables = 2 };
const char* to_string(LengthVar v);

struct SteigerStat {
  double t = 0.0;
  double p = 1.0;
};

// Williams' T2 for two dependent correlations sharing a variable:
//   t = (r12 - r13) * sqrt( (n-1)(1+r23) /
//         ( 2 ((n-1)/(n-3)) |R| + rbar^2 (1-r23)^3 ) ),
// |R| = 1 - r12^2 - r13^2 - r23^2 + 2 r12 r13 r23, rbar = (r12+r13)/2,
// two-sided p on n-3 df. r12 == r13 short-circuits to t = 0, p = 1 (this also
// covers the degenerate r23 -> 1 case). Throws InputError for n < 4 or |r| > 1
// and NumericError for a non-PSD correlation matrix.
SteigerStat steiger_test(double r12, double r13, double r23, std::int64_t n);

enum class Relation { GtSig, LtSig, GtNs, LtNs };
const char* relation_symbol(Relation r);  // ">*", "<*", ">", "<"

struct SteigerResult {
  double r_fl1 = 0.0;
  double r_fl2 = 0.0;
  double r_l1l2 = 0.0;
  std::int64_t n = 0;
  double t = 0.0;
  double p = 1.0;
  Relation relation = Relation::LtNs;
};

// Restricts to records of `role` valid on all three of (frequency, l1, l2),
// computes the three correlations (Pearson, or Pearson of mid-ranks for
// Spearman), then Williams' T2. Returns nullopt when fewer than 4 records
// survive the filter or a correlation is degenerate. `kind` must be Pearson
// or Spearman; the dependent-correlation test does not extend to Kendall and
// Kendall kinds are rejected with InputError.
std::optional<SteigerResult> compare_lengths(const Dataset& ds, Role role,
                                             FreqSource src, CorrMethod kind,
                                             LengthVar l1, LengthVar l2,
                                             double alpha = 0.05);

struct SteigerCell {
  Role role = Role::Child;
  FreqSource source = FreqSource::Childes;
  CorrMethod kind = CorrMethod::Pearson;  // Pearson, Spearman, or KendallB
  LengthVar l1 = LengthVar::Chars;
  LengthVar l2 = LengthVar::Phonemes;
  std::int64_t n = 0;
  std::optional<SteigerResult> res;      // Pearson/Spearman cells
  std::optional<double> tau1, tau2;      // Kendall convention cells
  std::string symbol;                    // ">*", "<*", ">", "<", "" if n/a
};

// Full relation table: 2 roles x 2 sources x 3 kinds x 3 length pairs =
// 36 cells. Kendall cells compare |tau_B| magnitudes and are always rendered
// non-significant (convention; the test itself is undefined for Kendall).
std::vector<SteigerCell> steiger_table(const Dataset& ds, double alpha = 0.05);

}  // namespace lexlaw
