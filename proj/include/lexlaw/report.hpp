#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexlaw/corpus.hpp"
#include "lexlaw/lawfit.hpp"
#include "lexlaw/stats.hpp"
#include "lexlaw/steiger.hpp"

namespace lexlaw {

// p >= 0.001 renders with 3 decimals; smaller values render "<1e-k" where k
// is the largest integer with p < 10^-k, floored at "<1e-323".
std::string format_p(double p);

struct ScatterOptions {
  std::string title;
  std::string x_label = "frequency";
  std::string y_label = "value";
  double bandwidth = 0.0;  // smoothing bandwidth in log10 units; <= 0: default
};

// Log-log scatter: hex-binned density cells on a green ramp (dark green =
// densest), one circle per point, the local-polynomial smooth in blue, and a
// scaled density curve in red. Points with a non-positive coordinate are
// dropped and counted in the caption. A <metadata> block carries the plotted
// curves in data space for downstream verification. Returns the number of
// dropped points. Throws InputError when fewer than 2 points remain.
int render_scatter(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& path, const ScatterOptions& opts = {});

struct RunConfig {
  // Corpus directories in the conventional layout (transcripts/, polysemy.tsv,
  // phonetics.tsv, reffreq.txt, roles.tsv); language label = directory name.
  std::vector<std::string> corpus_dirs;
  // Pre-ingested dataset JSON files.
  std::vector<std::string> dataset_paths;
  std::vector<FreqSource> sources = {FreqSource::Childes, FreqSource::Reference};
  std::vector<std::int64_t> lambdas = {100, 500};
  double significance = 0.05;
  std::string out_dir = "report";
  std::uint64_t seed = 1;

  void validate() const;  // InputError on out-of-range fields or empty inputs

  // key = value lines; '#' comments; keys corpus/dataset/freq/lambda/
  // significance/out/seed; corpus and dataset repeat, freq and lambda accept
  // comma lists. Relative paths resolve against base_dir.
  static RunConfig parse(std::istream& in, const std::string& base_dir);
  static RunConfig load(const std::string& path);
};

// Table writers shared by the report bundle and the single-table subcommands.
// Each writes a complete CSV document (header + rows).
void write_battery_csv(std::ostream& out, const std::string& language,
                       FreqSource src, const std::vector<BatteryCell>& cells,
                       double significance);

using LanguageTies = std::pair<std::string, std::vector<TiesRow>>;
void write_ties_csv(std::ostream& out, const std::vector<LanguageTies>& tables);

using LanguageSteiger = std::pair<std::string, std::vector<SteigerCell>>;
void write_steiger_csv(std::ostream& out,
                       const std::vector<LanguageSteiger>& tables,
                       double significance);
void write_steiger_symbols_csv(std::ostream& out,
                               const std::vector<LanguageSteiger>& tables);

struct FitRow {
  std::string language;
  Role role = Role::Child;
  FreqSource source = FreqSource::Childes;
  std::string law;  // meaning_distribution | meaning_frequency | rank_frequency
  std::int64_t lambda = 1;
  std::int64_t n_bins = 0;
  FitResult fit;
};
void write_fits_csv(std::ostream& out, const std::vector<FitRow>& rows);

struct RunResult {
  std::string out_dir;
  std::vector<std::string> files;  // bundle-relative, sorted
};

// Runs the full pipeline: ingest/load every dataset, correlation batteries
// per language and source, ties table, Steiger analytic + symbol tables, fit
// tables per lambda, law summary table, figures, warnings log, and a manifest
// hashing every artifact. Tables are emitted as CSV and JSON. Everything is
// written to a staging directory that replaces out_dir atomically at the end;
// any failure removes the staging area and rethrows with the stage name.
RunResult run_all(const RunConfig& config, bool quiet = false);

}  // namespace lexlaw
