#include "lexlaw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace lexlaw {

namespace {

void check_sizes(const std::vector<double>& x, const std::vector<double>& y,
                 std::size_t min_n) {
  if (x.size() != y.size()) throw InputError("vector length mismatch");
  if (x.size() < min_n)
    throw InputError("need at least " + std::to_string(min_n) + " points, got " +
                     std::to_string(x.size()));
}

// Sum over tied runs of f(run length), for the sorted copy of v.
template <class F>
double tie_run_sum(std::vector<double> v, F f) {
  std::sort(v.begin(), v.end());
  double acc = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    acc += f(static_cast<double>(j - i));
    i = j;
  }
  return acc;
}

std::int64_t tie_pair_count(const std::vector<double>& v) {
  return static_cast<std::int64_t>(
      tie_run_sum(v, [](double t) { return t * (t - 1) / 2; }));
}

std::int64_t merge_count_inversions(std::vector<double>& v,
                                    std::vector<double>& buf, std::size_t lo,
                                    std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = merge_count_inversions(v, buf, lo, mid) +
                     merge_count_inversions(v, buf, mid, hi);
  std::size_t a = lo, b = mid, k = lo;
  while (a < mid && b < hi) {
    if (v[b] < v[a]) {  // strict: equal keys are not inversions
      inv += static_cast<std::int64_t>(mid - a);
      buf[k++] = v[b++];
    } else {
      buf[k++] = v[a++];
    }
  }
  while (a < mid) buf[k++] = v[a++];
  while (b < hi) buf[k++] = v[b++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return inv;
}

}  // namespace

std::vector<double> midranks(const std::vector<double>& x) {
  std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && x[idx[j]] == x[idx[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
    for (std::size_t k = i; k < j; ++k) r[idx[k]] = avg;
    i = j;
  }
  return r;
}

PairCounts count_pairs_brute(const std::vector<double>& x,
                             const std::vector<double>& y) {
  check_sizes(x, y, 2);
  PairCounts pc;
  pc.n = static_cast<std::int64_t>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0.0 || dy == 0.0)
        ++pc.nt;
      else if ((dx > 0.0) == (dy > 0.0))
        ++pc.nc;
      else
        ++pc.nd;
    }
  return pc;
}

PairCounts count_pairs(const std::vector<double>& x,
                       const std::vector<double>& y) {
  check_sizes(x, y, 2);
  std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  // Tie pairs in x, and jointly in (x, y), from runs of the sorted order.
  std::int64_t n1 = 0, n3 = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && x[idx[j]] == x[idx[i]]) ++j;
    std::int64_t t = static_cast<std::int64_t>(j - i);
    n1 += t * (t - 1) / 2;
    std::size_t a = i;
    while (a < j) {
      std::size_t b = a;
      while (b < j && y[idx[b]] == y[idx[a]]) ++b;
      std::int64_t u = static_cast<std::int64_t>(b - a);
      n3 += u * (u - 1) / 2;
      a = b;
    }
    i = j;
  }

  std::int64_t n2 = tie_pair_count(y);

  // y in (x, y)-sorted order: equal-x blocks are y-sorted, so only pairs with
  // distinct x can produce strict inversions, and those are the discordant pairs.
  std::vector<double> ys(n), buf(n);
  for (std::size_t k = 0; k < n; ++k) ys[k] = y[idx[k]];
  std::int64_t nd = merge_count_inversions(ys, buf, 0, n);

  PairCounts pc;
  pc.n = static_cast<std::int64_t>(n);
  std::int64_t n0 = pc.total();
  pc.nt = n1 + n2 - n3;
  pc.nd = nd;
  pc.nc = n0 - pc.nt - pc.nd;
  return pc;
}

TieStats tie_stats(const PairCounts& pc) {
  double n0 = static_cast<double>(pc.total());
  TieStats ts;
  ts.upsilon = static_cast<double>(pc.nt) / n0;
  ts.tau_lower_bound = ts.upsilon - 1.0;
  ts.rho_lower_bound =
      std::max(1.5 * ts.upsilon - 1.0, ts.upsilon * ts.upsilon / 2.0) - 1.0;
  return ts;
}

TieStats tie_stats(const std::vector<double>& x, const std::vector<double>& y) {
  return tie_stats(count_pairs(x, y));
}

double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t)) throw NumericError("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(dist, -std::fabs(t));
}

double normal_two_sided_p(double z) {
  if (std::isnan(z)) throw NumericError("z statistic is NaN");
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

CorrelationResult pearson(const std::vector<double>& x,
                          const std::vector<double>& y) {
  check_sizes(x, y, 3);
  std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericError("zero variance");
  double r = sxy / std::sqrt(sxx * syy);
  r = std::clamp(r, -1.0, 1.0);
  double df = static_cast<double>(n - 2);
  double t;
  if (1.0 - r * r <= 0.0)
    t = r > 0 ? std::numeric_limits<double>::infinity()
              : -std::numeric_limits<double>::infinity();
  else
    t = r * std::sqrt(df / (1.0 - r * r));
  CorrelationResult res;
  res.method = CorrMethod::Pearson;
  res.coefficient = r;
  res.statistic = t;
  res.p_value = student_t_two_sided_p(t, df);
  res.n = static_cast<std::int64_t>(n);
  return res;
}

CorrelationResult spearman(const std::vector<double>& x,
                           const std::vector<double>& y) {
  check_sizes(x, y, 3);
  CorrelationResult res = pearson(midranks(x), midranks(y));
  res.method = CorrMethod::Spearman;
  return res;
}

CorrelationResult kendall(const std::vector<double>& x,
                          const std::vector<double>& y, KendallVariant v) {
  PairCounts pc = count_pairs(x, y);
  double n = static_cast<double>(pc.n);
  double n0 = static_cast<double>(pc.total());
  double s = static_cast<double>(pc.nc - pc.nd);

  double coeff;
  if (v == KendallVariant::A) {
    coeff = s / n0;
  } else {
    std::int64_t tx = tie_pair_count(x);
    std::int64_t ty = tie_pair_count(y);
    double fx = n0 - static_cast<double>(tx);
    double fy = n0 - static_cast<double>(ty);
    if (fx <= 0.0 || fy <= 0.0) throw NumericError("degenerate ties");
    coeff = s / std::sqrt(fx * fy);
  }

  // Tie-corrected variance of S (normal approximation, no continuity term).
  double v0 = n * (n - 1) * (2 * n + 5);
  double vt = tie_run_sum(x, [](double t) { return t * (t - 1) * (2 * t + 5); });
  double vu = tie_run_sum(y, [](double t) { return t * (t - 1) * (2 * t + 5); });
  double t2x = tie_run_sum(x, [](double t) { return t * (t - 1); });
  double t2y = tie_run_sum(y, [](double t) { return t * (t - 1); });
  double var = (v0 - vt - vu) / 18.0 + t2x * t2y / (2.0 * n * (n - 1));
  if (n > 2) {
    double t3x = tie_run_sum(x, [](double t) { return t * (t - 1) * (t - 2); });
    double t3y = tie_run_sum(y, [](double t) { return t * (t - 1) * (t - 2); });
    var += t3x * t3y / (9.0 * n * (n - 1) * (n - 2));
  }

  double z = (var > 0.0) ? s / std::sqrt(var) : 0.0;
  CorrelationResult res;
  res.method = (v == KendallVariant::A) ? CorrMethod::KendallA
                                        : CorrMethod::KendallB;
  res.coefficient = std::clamp(coeff, -1.0, 1.0);
  res.statistic = z;
  res.p_value = (var > 0.0) ? normal_two_sided_p(z) : 1.0;
  res.n = pc.n;
  return res;
}

const char* to_string(Companion c) {
  switch (c) {
    case Companion::Polysemy: return "polysemy";
    case Companion::Chars: return "n_chars";
    case Companion::Phonemes: return "n_phonemes";
    case Companion::Syllables: return "n_syllables";
  }
  return "?";
}

std::pair<std::vector<double>, std::vector<double>> paired_values(
    const Dataset& ds, Role role, FreqSource src, Companion companion) {
  std::vector<double> f, v;
  for (const WordRecord& r : ds.records()) {
    if (r.role != role) continue;
    double freq;
    if (src == FreqSource::Childes) {
      freq = static_cast<double>(r.childes_freq);
    } else {
      if (!r.reference_freq) continue;
      freq = static_cast<double>(*r.reference_freq);
    }
    std::optional<std::int64_t> c;
    switch (companion) {
      case Companion::Polysemy: c = r.polysemy; break;
      case Companion::Chars: c = r.n_chars; break;
      case Companion::Phonemes: c = r.n_phonemes; break;
      case Companion::Syllables: c = r.n_syllables; break;
    }
    if (!c) continue;
    f.push_back(freq);
    v.push_back(static_cast<double>(*c));
  }
  return {std::move(f), std::move(v)};
}

std::vector<BatteryCell> correlate_battery(const Dataset& ds, FreqSource src) {
  std::vector<BatteryCell> cells;
  for (Role role : {Role::Child, Role::Adult}) {
    for (Companion comp : kCompanions) {
      auto [f, v] = paired_values(ds, role, src, comp);
      for (CorrMethod m : {CorrMethod::Pearson, CorrMethod::Spearman,
                           CorrMethod::KendallB}) {
        BatteryCell cell;
        cell.role = role;
        cell.companion = comp;
        cell.method = m;
        cell.n = static_cast<std::int64_t>(f.size());
        if (f.size() < 3) {
          cell.note = "n < 3";
        } else {
          try {
            switch (m) {
              case CorrMethod::Pearson: cell.result = pearson(f, v); break;
              case CorrMethod::Spearman: cell.result = spearman(f, v); break;
              default: cell.result = kendall(f, v, KendallVariant::B); break;
            }
          } catch (const NumericError& e) {
            cell.note = e.what();
          }
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::vector<TiesRow> ties_table(const Dataset& ds,
                                std::optional<FreqSource> src) {
  std::vector<FreqSource> sources;
  if (src)
    sources = {*src};
  else
    sources = {FreqSource::Childes, FreqSource::Reference};
  std::vector<TiesRow> rows;
  for (Role role : {Role::Child, Role::Adult}) {
    for (FreqSource s : sources) {
      TiesRow row;
      row.role = role;
      row.source = s;
      for (std::size_t k = 0; k < kCompanions.size(); ++k) {
        auto [f, v] = paired_values(ds, role, s, kCompanions[k]);
        row.n[k] = static_cast<std::int64_t>(f.size());
        if (f.size() >= 2) {
          PairCounts pc = count_pairs(f, v);
          row.percent_ties[k] =
              100.0 * static_cast<double>(pc.nt) / static_cast<double>(pc.total());
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace lexlaw
