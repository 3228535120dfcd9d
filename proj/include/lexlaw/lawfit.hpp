#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lexlaw/corpus.hpp"

namespace lexlaw {

struct RankedEntry {
  std::string form;
  std::int64_t freq = 0;
  std::int64_t rank = 0;  // 1-based
};

struct RankedLexicon {
  std::vector<RankedEntry> entries;  // descending frequency, ranks 1..n
};

// Descending frequency; frequency ties broken lexicographically by form so
// bin contents are deterministic. Throws InputError on an empty map.
RankedLexicon rank_by_frequency(const std::map<std::string, std::int64_t>& freq);

struct BinSeries {
  std::int64_t lambda = 1;
  // (bin index j, arithmetic mean of values at ranks lambda*(j-1)+1 .. lambda*j)
  std::vector<std::pair<std::int64_t, double>> points;
};

// Bin j covers ranks lambda*(j-1)+1 .. lambda*j; the incomplete final bin is
// dropped, so N = floor(n/lambda). Throws InputError when n < lambda.
BinSeries linear_binning(const std::vector<double>& values_by_rank,
                         std::int64_t lambda);

struct XY {
  std::vector<double> x, y;
};

// Log-space bin summary used by the fitting path: per bin of width lambda,
// x = geometric mean of the ranks, y = geometric mean of the values. A series
// that is exactly a power law stays exactly on the fitted line for every
// lambda under this summary, which arithmetic bin means do not preserve.
// lambda = 1 returns the raw (rank, value) series.
XY log_binned_series(const std::vector<double>& values_by_rank,
                     std::int64_t lambda);

enum class FitMethod { NlsNormal, OlsLoglog, MlLognormal };
const char* to_string(FitMethod m);

struct FitResult {
  FitMethod method = FitMethod::OlsLoglog;
  // Log-log slope: -gamma for meaning distribution, -alpha for rank-frequency,
  // +delta for meaning-frequency.
  double exponent = 0.0;
  double intercept_log = 0.0;  // log10 of the prefactor
  double prefactor = 0.0;      // 10^intercept_log
  double r_squared_loglog = 0.0;
};

// Fits y = A * x^b. OlsLoglog: closed-form regression of log10 y on log10 x.
// MlLognormal: Gaussian maximum likelihood in log space; its location
// estimates coincide with the log-log OLS solution and are reported under the
// distinct tag. NlsNormal: damped Gauss-Newton on normal-scale residuals,
// initialized from the log-log OLS solution; the objective never increases
// across accepted steps. r_squared_loglog is computed from log-log residuals
// for every method. Throws InputError for fewer than 3 points or non-positive
// values, NumericError when Gauss-Newton fails to converge.
FitResult fit_power_law(const XY& series, FitMethod method);

// Meaning counts ordered by frequency rank for one role and source.
std::vector<double> meanings_by_rank(const Dataset& ds, Role role,
                                     FreqSource src);

// Ranks by frequency, bins meanings with width lambda (log-space summaries),
// fits the power law; exponent estimates -gamma.
FitResult fit_meaning_distribution(const Dataset& ds, Role role, FreqSource src,
                                   std::int64_t lambda,
                                   FitMethod method = FitMethod::OlsLoglog);

// Log-log OLS of meaning count on frequency; exponent estimates +delta.
FitResult fit_meaning_frequency(const Dataset& ds, Role role, FreqSource src);

// Log-log OLS of frequency on rank; exponent estimates -alpha.
FitResult fit_zipf_rank_frequency(const RankedLexicon& lex);

struct GridCurve {
  std::vector<double> xs, ys;
};

// Local polynomial regression (default degree 1, Gaussian kernel) on a
// 401-point uniform grid over [min x, max x]. bandwidth <= 0 selects the
// default 0.2 * range(x). Throws InputError when all x coincide or
// n < degree + 2.
GridCurve locpoly_smooth(const std::vector<double>& x,
                         const std::vector<double>& y, double bandwidth = 0.0,
                         int degree = 1);

// 0.9 * min(sd, IQR/1.34) * n^(-1/5); falls back to sd alone when IQR is 0.
double silverman_bandwidth(const std::vector<double>& x);

// Gaussian kernel density on a 401-point grid extended 3 bandwidths past
// [min x, max x] so the trapezoid integral is 1 within 0.01. bandwidth <= 0
// selects the Silverman default. Throws NumericError on zero variance.
GridCurve density_curve(const std::vector<double>& x, double bandwidth = 0.0);

}  // namespace lexlaw
