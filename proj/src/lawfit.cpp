#include "lexlaw/lawfit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace lexlaw {

const char* to_string(FitMethod m) {
  switch (m) {
    case FitMethod::NlsNormal: return "NLS_NORMAL";
    case FitMethod::OlsLoglog: return "OLS_LOGLOG";
    case FitMethod::MlLognormal: return "ML_LOGNORMAL";
  }
  return "?";
}

RankedLexicon rank_by_frequency(const std::map<std::string, std::int64_t>& freq) {
  if (freq.empty()) throw InputError("empty frequency map");
  RankedLexicon lex;
  lex.entries.reserve(freq.size());
  for (const auto& [form, f] : freq) {
    if (f < 1) throw InputError("frequency < 1 for form '" + form + "'");
    lex.entries.push_back({form, f, 0});
  }
  std::sort(lex.entries.begin(), lex.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.freq != b.freq) return a.freq > b.freq;
              return a.form < b.form;
            });
  for (std::size_t i = 0; i < lex.entries.size(); ++i)
    lex.entries[i].rank = static_cast<std::int64_t>(i) + 1;
  return lex;
}

BinSeries linear_binning(const std::vector<double>& values_by_rank,
                         std::int64_t lambda) {
  if (lambda < 1) throw InputError("bin width must be >= 1");
  std::int64_t n = static_cast<std::int64_t>(values_by_rank.size());
  if (n < lambda) throw InputError("no complete bin: n < lambda");
  std::int64_t nbins = n / lambda;
  BinSeries bs;
  bs.lambda = lambda;
  bs.points.reserve(static_cast<std::size_t>(nbins));
  for (std::int64_t j = 1; j <= nbins; ++j) {
    double sum = 0.0;
    for (std::int64_t i = lambda * (j - 1); i < lambda * j; ++i)
      sum += values_by_rank[static_cast<std::size_t>(i)];
    bs.points.emplace_back(j, sum / static_cast<double>(lambda));
  }
  return bs;
}

XY log_binned_series(const std::vector<double>& values_by_rank,
                     std::int64_t lambda) {
  if (lambda < 1) throw InputError("bin width must be >= 1");
  std::int64_t n = static_cast<std::int64_t>(values_by_rank.size());
  if (n < lambda) throw InputError("no complete bin: n < lambda");
  XY out;
  if (lambda == 1) {
    out.x.resize(values_by_rank.size());
    std::iota(out.x.begin(), out.x.end(), 1.0);
    out.y = values_by_rank;
    return out;
  }
  std::int64_t nbins = n / lambda;
  for (std::int64_t j = 1; j <= nbins; ++j) {
    double slx = 0.0, sly = 0.0;
    for (std::int64_t i = lambda * (j - 1); i < lambda * j; ++i) {
      double v = values_by_rank[static_cast<std::size_t>(i)];
      if (v <= 0.0) throw InputError("non-positive value in log binning");
      slx += std::log(static_cast<double>(i + 1));
      sly += std::log(v);
    }
    double lam = static_cast<double>(lambda);
    out.x.push_back(std::exp(slx / lam));
    out.y.push_back(std::exp(sly / lam));
  }
  return out;
}

namespace {

struct LoglogFit {
  double slope, intercept, r2;
};

LoglogFit ols_loglog(const XY& s) {
  std::size_t n = s.x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log10(s.x[i]);
    ly[i] = std::log10(s.y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = lx[i] - mx, dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw NumericError("zero variance in log x");
  double slope = sxy / sxx;
  double intercept = my - slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = ly[i] - (intercept + slope * lx[i]);
    sse += r * r;
  }
  double r2 = (syy == 0.0) ? 1.0 : 1.0 - sse / syy;
  return {slope, intercept, std::clamp(r2, 0.0, 1.0)};
}

double loglog_r2(const XY& s, double log_a, double b) {
  std::size_t n = s.x.size();
  double my = 0.0;
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    ly[i] = std::log10(s.y[i]);
    my += ly[i];
  }
  my /= static_cast<double>(n);
  double sse = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = ly[i] - (log_a + b * std::log10(s.x[i]));
    sse += r * r;
    double d = ly[i] - my;
    syy += d * d;
  }
  if (syy == 0.0) return sse == 0.0 ? 1.0 : 0.0;
  return std::clamp(1.0 - sse / syy, 0.0, 1.0);
}

double sse_normal(const XY& s, double a, double b) {
  double sse = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    double r = s.y[i] - a * std::pow(s.x[i], b);
    sse += r * r;
  }
  return sse;
}

// Damped Gauss-Newton on residuals r_i = y_i - A x_i^b starting from the
// log-log OLS estimate. Step halving keeps the objective non-increasing.
std::pair<double, double> gauss_newton(const XY& s, double a0, double b0) {
  double a = a0, b = b0;
  double sse = sse_normal(s, a, b);
  const int max_iter = 200;
  for (int iter = 0; iter < max_iter; ++iter) {
    // Normal equations J^T J d = -J^T r with dr/dA = -x^b, dr/db = -A ln(x) x^b.
    double jaa = 0.0, jab = 0.0, jbb = 0.0, ga = 0.0, gb = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double xb = std::pow(s.x[i], b);
      double lx = std::log(s.x[i]);
      double r = s.y[i] - a * xb;
      double da = -xb;
      double db = -a * lx * xb;
      jaa += da * da;
      jab += da * db;
      jbb += db * db;
      ga += da * r;
      gb += db * r;
    }
    double det = jaa * jbb - jab * jab;
    if (!(std::fabs(det) > 1e-300))
      throw NumericError("Gauss-Newton normal equations singular");
    double step_a = (-ga * jbb + gb * jab) / det;
    double step_b = (-gb * jaa + ga * jab) / det;

    double scale = 1.0;
    double new_a = a, new_b = b, new_sse = sse;
    bool accepted = false;
    for (int h = 0; h < 60; ++h) {
      double ca = a + scale * step_a;
      double cb = b + scale * step_b;
      double cs = sse_normal(s, ca, cb);
      if (std::isfinite(cs) && cs <= sse) {
        new_a = ca;
        new_b = cb;
        new_sse = cs;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted)
      throw NumericError("Gauss-Newton did not converge; last iterate A=" +
                         std::to_string(a) + " b=" + std::to_string(b));
    double rel = std::fabs(new_a - a) + std::fabs(new_b - b);
    a = new_a;
    b = new_b;
    bool done = rel <= 1e-12 * (1.0 + std::fabs(a) + std::fabs(b)) ||
                sse - new_sse <= 1e-15 * (1.0 + sse);
    sse = new_sse;
    if (done) return {a, b};
  }
  throw NumericError("Gauss-Newton did not converge; last iterate A=" +
                     std::to_string(a) + " b=" + std::to_string(b));
}

}  // namespace

FitResult fit_power_law(const XY& series, FitMethod method) {
  if (series.x.size() != series.y.size())
    throw InputError("series length mismatch");
  if (series.x.size() < 3) throw InputError("need at least 3 points to fit");
  for (std::size_t i = 0; i < series.x.size(); ++i)
    if (!(series.x[i] > 0.0) || !(series.y[i] > 0.0))
      throw InputError("non-positive value in power-law fit");

  LoglogFit base = ols_loglog(series);
  FitResult res;
  res.method = method;
  if (method == FitMethod::NlsNormal) {
    auto [a, b] = gauss_newton(series, std::pow(10.0, base.intercept),
                               base.slope);
    res.exponent = b;
    res.prefactor = a;
    res.intercept_log = std::log10(a);
    res.r_squared_loglog = loglog_r2(series, res.intercept_log, b);
  } else {
    // The lognormal ML location estimates coincide with log-log OLS; the
    // method tag records which noise model was requested.
    res.exponent = base.slope;
    res.intercept_log = base.intercept;
    res.prefactor = std::pow(10.0, base.intercept);
    res.r_squared_loglog = base.r2;
  }
  return res;
}

std::vector<double> meanings_by_rank(const Dataset& ds, Role role,
                                     FreqSource src) {
  struct Row {
    const WordRecord* rec;
    std::int64_t f;
  };
  std::vector<Row> rows;
  for (const WordRecord& r : ds.records()) {
    if (r.role != role) continue;
    if (!r.polysemy) continue;
    if (src == FreqSource::Childes) {
      rows.push_back({&r, r.childes_freq});
    } else {
      if (!r.reference_freq) continue;
      rows.push_back({&r, *r.reference_freq});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.f != b.f) return a.f > b.f;
    return a.rec->form < b.rec->form;
  });
  std::vector<double> m;
  m.reserve(rows.size());
  for (const Row& r : rows) m.push_back(static_cast<double>(*r.rec->polysemy));
  return m;
}

FitResult fit_meaning_distribution(const Dataset& ds, Role role, FreqSource src,
                                   std::int64_t lambda, FitMethod method) {
  std::vector<double> m = meanings_by_rank(ds, role, src);
  return fit_power_law(log_binned_series(m, lambda), method);
}

FitResult fit_meaning_frequency(const Dataset& ds, Role role, FreqSource src) {
  XY s;
  for (const WordRecord& r : ds.records()) {
    if (r.role != role || !r.polysemy) continue;
    if (src == FreqSource::Childes) {
      s.x.push_back(static_cast<double>(r.childes_freq));
    } else {
      if (!r.reference_freq) continue;
      s.x.push_back(static_cast<double>(*r.reference_freq));
    }
    s.y.push_back(static_cast<double>(*r.polysemy));
  }
  return fit_power_law(s, FitMethod::OlsLoglog);
}

FitResult fit_zipf_rank_frequency(const RankedLexicon& lex) {
  XY s;
  s.x.reserve(lex.entries.size());
  s.y.reserve(lex.entries.size());
  for (const RankedEntry& e : lex.entries) {
    s.x.push_back(static_cast<double>(e.rank));
    s.y.push_back(static_cast<double>(e.freq));
  }
  return fit_power_law(s, FitMethod::OlsLoglog);
}

namespace {
constexpr int kGridPoints = 401;
}

GridCurve locpoly_smooth(const std::vector<double>& x,
                         const std::vector<double>& y, double bandwidth,
                         int degree) {
  if (x.size() != y.size()) throw InputError("vector length mismatch");
  if (degree < 0 || degree > 1) throw InputError("degree must be 0 or 1");
  if (x.size() < static_cast<std::size_t>(degree) + 2)
    throw InputError("too few points for local polynomial fit");
  auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
  double mn = *mn_it, mx = *mx_it;
  if (mn == mx) throw InputError("all x identical");
  double h = bandwidth > 0.0 ? bandwidth : 0.2 * (mx - mn);

  GridCurve out;
  out.xs.resize(kGridPoints);
  out.ys.resize(kGridPoints);
  for (int g = 0; g < kGridPoints; ++g) {
    double gx = mn + (mx - mn) * static_cast<double>(g) / (kGridPoints - 1);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, t0 = 0.0, t1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double u = (x[i] - gx) / h;
      double w = std::exp(-0.5 * u * u);
      double d = x[i] - gx;
      s0 += w;
      s1 += w * d;
      s2 += w * d * d;
      t0 += w * y[i];
      t1 += w * d * y[i];
    }
    double val;
    if (s0 < 1e-300) {
      // Kernel mass underflowed: fall back to the nearest observation.
      std::size_t best = 0;
      for (std::size_t i = 1; i < x.size(); ++i)
        if (std::fabs(x[i] - gx) < std::fabs(x[best] - gx)) best = i;
      val = y[best];
    } else if (degree == 0) {
      val = t0 / s0;
    } else {
      double det = s0 * s2 - s1 * s1;
      if (det <= 1e-12 * s0 * s2 || det <= 0.0)
        val = t0 / s0;  // locally collinear weights: weighted mean
      else
        val = (s2 * t0 - s1 * t1) / det;
    }
    out.xs[g] = gx;
    out.ys[g] = val;
  }
  return out;
}

double silverman_bandwidth(const std::vector<double>& x) {
  std::size_t n = x.size();
  if (n < 2) throw InputError("need at least 2 points");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));

  std::vector<double> s(x);
  std::sort(s.begin(), s.end());
  auto quantile = [&](double p) {
    double pos = p * static_cast<double>(n - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= n) return s[n - 1];
    return s[lo] * (1.0 - frac) + s[lo + 1] * frac;
  };
  double iqr = quantile(0.75) - quantile(0.25);

  double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  if (spread <= 0.0) throw NumericError("zero variance");
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

GridCurve density_curve(const std::vector<double>& x, double bandwidth) {
  if (x.size() < 2) throw InputError("need at least 2 points");
  double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(x);
  if (!(h > 0.0)) throw NumericError("zero variance");
  auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
  double lo = *mn_it - 3.0 * h, hi = *mx_it + 3.0 * h;

  double n = static_cast<double>(x.size());
  double norm = 1.0 / (n * h * std::sqrt(2.0 * 3.14159265358979323846));
  GridCurve out;
  out.xs.resize(kGridPoints);
  out.ys.resize(kGridPoints);
  for (int g = 0; g < kGridPoints; ++g) {
    double gx = lo + (hi - lo) * static_cast<double>(g) / (kGridPoints - 1);
    double acc = 0.0;
    for (double xi : x) {
      double u = (gx - xi) / h;
      acc += std::exp(-0.5 * u * u);
    }
    out.xs[g] = gx;
    out.ys[g] = norm * acc;
  }
  return out;
}

}  // namespace lexlaw
