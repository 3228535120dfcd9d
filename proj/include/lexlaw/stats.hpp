#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexlaw/corpus.hpp"

namespace lexlaw {

// Average ranks for tied runs (mid-ranks), 1-based.
std::vector<double> midranks(const std::vector<double>& x);

struct PairCounts {
  std::int64_t n = 0;
  std::int64_t nc = 0;  // concordant
  std::int64_t nd = 0;  // discordant
  std::int64_t nt = 0;  // tied in x or y (neither concordant nor discordant)
  std::int64_t total() const { return n * (n - 1) / 2; }
};

// O(n^2) reference enumeration.
PairCounts count_pairs_brute(const std::vector<double>& x,
                             const std::vector<double>& y);
// O(n log n): sort by (x, y), tie-run bookkeeping, merge-sort inversion count.
// Must agree with count_pairs_brute on every input.
PairCounts count_pairs(const std::vector<double>& x,
                       const std::vector<double>& y);

struct TieStats {
  double upsilon = 0.0;          // tied pairs / C(n, 2)
  double tau_lower_bound = 0.0;  // upsilon - 1
  double rho_lower_bound = 0.0;  // max(3*upsilon/2 - 1, upsilon^2/2) - 1
};
TieStats tie_stats(const std::vector<double>& x, const std::vector<double>& y);
TieStats tie_stats(const PairCounts& pc);

double student_t_two_sided_p(double t, double df);
double normal_two_sided_p(double z);

// Pearson r with t = r*sqrt((n-2)/(1-r^2)), two-sided p on n-2 df.
// Throws InputError for n < 3, NumericError for a zero-variance vector.
CorrelationResult pearson(const std::vector<double>& x,
                          const std::vector<double>& y);

// Pearson on mid-ranks; p via the same t approximation.
CorrelationResult spearman(const std::vector<double>& x,
                           const std::vector<double>& y);

enum class KendallVariant { A, B };

// Variant A: tau = (Nc - Nd) / C(n, 2).
// Variant B: tau = (Nc - Nd) / sqrt((P - Tx)(P - Ty)).
// statistic is the normal z = S / sqrt(var S) with tie-corrected variance;
// the same z backs the variant-A p-value (approximation flag, see README).
// Variant B on an all-tied vector raises NumericError ("degenerate ties");
// variant A still returns its coefficient.
CorrelationResult kendall(const std::vector<double>& x,
                          const std::vector<double>& y, KendallVariant v);

enum class Companion { Polysemy = 0, Chars = 1, Phonemes = 2, Syllables = 3 };
const char* to_string(Companion c);
inline constexpr std::array<Companion, 4> kCompanions = {
    Companion::Polysemy, Companion::Chars, Companion::Phonemes,
    Companion::Syllables};

// Pairwise-complete (frequency, companion) columns for one role. Records
// enter only when the chosen frequency source and the companion are present.
std::pair<std::vector<double>, std::vector<double>> paired_values(
    const Dataset& ds, Role role, FreqSource src, Companion companion);

struct BatteryCell {
  Role role = Role::Child;
  Companion companion = Companion::Polysemy;
  CorrMethod method = CorrMethod::Pearson;
  std::optional<CorrelationResult> result;  // empty when not computable
  std::int64_t n = 0;                       // pairwise-complete sample size
  std::string note;                         // reason when result is empty
};

// For each role: four companions x {Pearson, Spearman, Kendall-B}, each on
// pairwise-complete records. Cells with n < 3 or degenerate data are marked
// not-computable instead of failing the whole battery. Ordering is fixed:
// (role, companion, method).
std::vector<BatteryCell> correlate_battery(const Dataset& ds, FreqSource src);

struct TiesRow {
  Role role = Role::Child;
  FreqSource source = FreqSource::Childes;
  // 100 * upsilon per companion, kCompanions order; absent when n < 2.
  std::array<std::optional<double>, 4> percent_ties;
  std::array<std::int64_t, 4> n = {0, 0, 0, 0};
};

// One row per role x frequency source; nullopt source means both sources.
std::vector<TiesRow> ties_table(const Dataset& ds,
                                std::optional<FreqSource> src = std::nullopt);

}  // namespace lexlaw
