#include "lexlaw/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "lexlaw/common.hpp"
#include "lexlaw/ingest.hpp"

namespace lexlaw {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string fmtf(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_p(double p) {
  if (std::isnan(p)) p = 1.0;
  p = std::clamp(p, 0.0, 1.0);
  if (p >= 0.001) return fmtf("%.3f", p);
  // Thresholds come from strtod on the literal "1e-k" so the comparison uses
  // exactly the value the rendered string denotes.
  static const std::vector<double>& thresholds = *[] {
    auto* t = new std::vector<double>(324, 0.0);
    for (int k = 3; k <= 323; ++k) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "1e-%d", k);
      (*t)[static_cast<std::size_t>(k)] = std::strtod(buf, nullptr);
    }
    return t;
  }();
  for (int k = 323; k >= 3; --k)
    if (p < thresholds[static_cast<std::size_t>(k)])
      return "<1e-" + std::to_string(k);
  return "<1e-3";  // unreachable: p < 0.001 implies p < 1e-3
}

// ---------------------------------------------------------------------------
// Figures

namespace {

struct PixelMap {
  double lo = 0.0, hi = 1.0, p0 = 0.0, span = 1.0;
  double operator()(double v) const { return p0 + (v - lo) / (hi - lo) * span; }
};

std::string ramp_color(double t) {
  // #e8f5e9 (sparse) .. #1b5e20 (densest)
  const int a[3] = {232, 245, 233};
  const int b[3] = {27, 94, 32};
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(a[0] + t * (b[0] - a[0]))),
                static_cast<int>(std::lround(a[1] + t * (b[1] - a[1]))),
                static_cast<int>(std::lround(a[2] + t * (b[2] - a[2]))));
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

int render_scatter(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& path, const ScatterOptions& opts) {
  if (x.size() != y.size()) throw InputError("render_scatter: length mismatch");
  std::vector<double> lx, ly;
  int dropped = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log10(x[i]));
      ly.push_back(std::log10(y[i]));
    } else {
      dropped += 1;
    }
  }
  if (lx.size() < 2) throw InputError("render_scatter: fewer than 2 plottable points");

  GridCurve smooth, dens;
  bool have_smooth = false, have_dens = false;
  try {
    smooth = locpoly_smooth(lx, ly, opts.bandwidth);
    have_smooth = true;
  } catch (const std::exception&) {
  }
  try {
    dens = density_curve(lx);
    have_dens = true;
  } catch (const std::exception&) {
  }

  double xmin = *std::min_element(lx.begin(), lx.end());
  double xmax = *std::max_element(lx.begin(), lx.end());
  double ymin = *std::min_element(ly.begin(), ly.end());
  double ymax = *std::max_element(ly.begin(), ly.end());
  if (xmax == xmin) { xmin -= 0.5; xmax += 0.5; }
  if (ymax == ymin) { ymin -= 0.5; ymax += 0.5; }
  double padx = 0.04 * (xmax - xmin), pady = 0.04 * (ymax - ymin);
  xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;

  const double W = 640, H = 480, L = 70, R = 20, T = 40, B = 56;
  const double pw = W - L - R, ph = H - T - B;
  PixelMap mx{xmin, xmax, L, pw};
  PixelMap my_up{ymin, ymax, 0.0, ph};  // then flipped below
  auto my = [&](double v) { return T + ph - my_up(v); };

  // Hex binning on the two-lattice construction: pointy-top hexagons with
  // horizontal pitch sx tile as lattice A at (i*sx, j*sy) and lattice B at
  // ((i+.5)*sx, (j+.5)*sy), sy = sqrt(3)*sx; each point joins its nearest
  // center.
  const double sx = pw / 24.0;
  const double sy = sx * std::sqrt(3.0);
  std::map<std::tuple<int, int, int>, int> cells;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    double px = mx(lx[i]) - L, py = my(ly[i]) - T;
    int c1 = static_cast<int>(std::lround(px / sx));
    int r1 = static_cast<int>(std::lround(py / sy));
    int c2 = static_cast<int>(std::lround(px / sx - 0.5));
    int r2 = static_cast<int>(std::lround(py / sy - 0.5));
    double d1 = std::hypot(px - c1 * sx, py - r1 * sy);
    double d2 = std::hypot(px - (c2 + 0.5) * sx, py - (r2 + 0.5) * sy);
    if (d1 <= d2) cells[{0, c1, r1}] += 1;
    else cells[{1, c2, r2}] += 1;
  }
  int max_count = 1;
  for (const auto& [key, count] : cells) max_count = std::max(max_count, count);

  ordered_json meta;
  meta["n"] = lx.size();
  meta["dropped"] = dropped;
  if (have_smooth) {
    meta["smooth_x"] = smooth.xs;
    meta["smooth_y"] = smooth.ys;
  }
  if (have_dens) {
    meta["density_x"] = dens.xs;
    meta["density_y"] = dens.ys;
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg << "<metadata id=\"lexlaw-data\">" << meta.dump() << "</metadata>\n";
  svg << "<style>text{font-family:sans-serif;font-size:11px;fill:#37474f;}"
         ".title{font-size:13px;}</style>\n";
  svg << "<rect width=\"640\" height=\"480\" fill=\"#ffffff\"/>\n";
  svg << "<clipPath id=\"plot\"><rect x=\"" << fmtf("%.2f", L) << "\" y=\""
      << fmtf("%.2f", T) << "\" width=\"" << fmtf("%.2f", pw) << "\" height=\""
      << fmtf("%.2f", ph) << "\"/></clipPath>\n";

  // Grid and tick labels: five evenly spaced ticks per axis, labels written
  // back in linear units.
  for (int i = 0; i <= 4; ++i) {
    double vx = xmin + i * (xmax - xmin) / 4.0;
    double vy = ymin + i * (ymax - ymin) / 4.0;
    double gx = mx(vx), gy = my(vy);
    svg << "<line x1=\"" << fmtf("%.2f", gx) << "\" y1=\"" << fmtf("%.2f", T)
        << "\" x2=\"" << fmtf("%.2f", gx) << "\" y2=\"" << fmtf("%.2f", T + ph)
        << "\" stroke=\"#eceff1\"/>\n";
    svg << "<line x1=\"" << fmtf("%.2f", L) << "\" y1=\"" << fmtf("%.2f", gy)
        << "\" x2=\"" << fmtf("%.2f", L + pw) << "\" y2=\"" << fmtf("%.2f", gy)
        << "\" stroke=\"#eceff1\"/>\n";
    svg << "<text x=\"" << fmtf("%.2f", gx) << "\" y=\"" << fmtf("%.2f", T + ph + 16)
        << "\" text-anchor=\"middle\">" << fmtf("%.3g", std::pow(10.0, vx))
        << "</text>\n";
    svg << "<text x=\"" << fmtf("%.2f", L - 6) << "\" y=\"" << fmtf("%.2f", gy + 4)
        << "\" text-anchor=\"end\">" << fmtf("%.3g", std::pow(10.0, vy))
        << "</text>\n";
  }

  svg << "<g clip-path=\"url(#plot)\">\n";
  const double hex_r = sx / std::sqrt(3.0);
  for (const auto& [key, count] : cells) {
    auto [lat, c, r] = key;
    double cx = L + (c + 0.5 * lat) * sx;
    double cy = T + (r + 0.5 * lat) * sy;
    double t = max_count > 1
                   ? static_cast<double>(count - 1) / static_cast<double>(max_count - 1)
                   : 1.0;
    svg << "<polygon fill=\"" << ramp_color(t) << "\" points=\"";
    for (int k = 0; k < 6; ++k) {
      double ang = (90.0 + 60.0 * k) * M_PI / 180.0;
      if (k) svg << ' ';
      svg << fmtf("%.2f", cx + hex_r * std::cos(ang)) << ','
          << fmtf("%.2f", cy + hex_r * std::sin(ang));
    }
    svg << "\"/>\n";
  }
  for (std::size_t i = 0; i < lx.size(); ++i) {
    svg << "<circle cx=\"" << fmtf("%.2f", mx(lx[i])) << "\" cy=\""
        << fmtf("%.2f", my(ly[i]))
        << "\" r=\"1.60\" fill=\"#263238\" fill-opacity=\"0.45\"/>\n";
  }
  if (have_dens) {
    double dmax = *std::max_element(dens.ys.begin(), dens.ys.end());
    if (dmax > 0) {
      svg << "<polyline fill=\"none\" stroke=\"#c62828\" stroke-width=\"1.40\" "
             "stroke-dasharray=\"4 3\" points=\"";
      for (std::size_t i = 0; i < dens.xs.size(); ++i) {
        if (i) svg << ' ';
        svg << fmtf("%.2f", mx(dens.xs[i])) << ','
            << fmtf("%.2f", T + ph - dens.ys[i] / dmax * (0.25 * ph));
      }
      svg << "\"/>\n";
    }
  }
  if (have_smooth) {
    svg << "<polyline fill=\"none\" stroke=\"#1565c0\" stroke-width=\"1.80\" "
           "points=\"";
    for (std::size_t i = 0; i < smooth.xs.size(); ++i) {
      if (i) svg << ' ';
      svg << fmtf("%.2f", mx(smooth.xs[i])) << ',' << fmtf("%.2f", my(smooth.ys[i]));
    }
    svg << "\"/>\n";
  }
  svg << "</g>\n";

  svg << "<rect x=\"" << fmtf("%.2f", L) << "\" y=\"" << fmtf("%.2f", T)
      << "\" width=\"" << fmtf("%.2f", pw) << "\" height=\"" << fmtf("%.2f", ph)
      << "\" fill=\"none\" stroke=\"#90a4ae\"/>\n";

  std::string caption = "n = " + std::to_string(lx.size());
  if (dropped > 0)
    caption += " (" + std::to_string(dropped) + " dropped on log axes)";
  svg << "<text class=\"title\" x=\"" << fmtf("%.2f", L) << "\" y=\"20\">"
      << xml_escape(opts.title) << "</text>\n";
  svg << "<text x=\"" << fmtf("%.2f", L + pw) << "\" y=\"20\" text-anchor=\"end\">"
      << caption << "</text>\n";
  svg << "<text x=\"" << fmtf("%.2f", L + pw / 2) << "\" y=\""
      << fmtf("%.2f", H - 14) << "\" text-anchor=\"middle\">"
      << xml_escape(opts.x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << fmtf("%.2f", T + ph / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmtf("%.2f", T + ph / 2) << ")\">" << xml_escape(opts.y_label)
      << "</text>\n";
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw InputError("render_scatter: cannot write " + path);
  out << svg.str();
  return dropped;
}

// ---------------------------------------------------------------------------
// Config

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::string resolve_path(const std::string& base, const std::string& value) {
  fs::path p(value);
  if (p.is_absolute() || base.empty()) return p.lexically_normal().string();
  return (fs::path(base) / p).lexically_normal().string();
}

std::int64_t parse_int(const std::string& s, std::int64_t line_no) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("config line " + std::to_string(line_no) +
                     ": not an integer: " + s);
  }
}

double parse_double(const std::string& s, std::int64_t line_no) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == nullptr || *end != '\0' || s.empty())
    throw InputError("config line " + std::to_string(line_no) +
                     ": not a number: " + s);
  return v;
}

}  // namespace

void RunConfig::validate() const {
  if (!(significance > 0.0 && significance < 1.0))
    throw InputError("significance must lie in (0, 1)");
  if (lambdas.empty()) throw InputError("no lambda values configured");
  for (std::int64_t l : lambdas)
    if (l < 1) throw InputError("lambda values must be >= 1");
  if (sources.empty()) throw InputError("no frequency sources configured");
  if (corpus_dirs.empty() && dataset_paths.empty())
    throw InputError("no corpus or dataset inputs configured");
}

RunConfig RunConfig::parse(std::istream& in, const std::string& base_dir) {
  RunConfig cfg;
  std::string line;
  std::int64_t line_no = 0;
  bool saw_freq = false, saw_lambda = false;
  while (std::getline(in, line)) {
    line_no += 1;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "corpus") {
      cfg.corpus_dirs.push_back(resolve_path(base_dir, value));
    } else if (key == "dataset") {
      cfg.dataset_paths.push_back(resolve_path(base_dir, value));
    } else if (key == "freq") {
      if (!saw_freq) cfg.sources.clear();
      saw_freq = true;
      for (const std::string& s : split_list(value))
        cfg.sources.push_back(freq_source_from_string(s));
    } else if (key == "lambda") {
      if (!saw_lambda) cfg.lambdas.clear();
      saw_lambda = true;
      for (const std::string& s : split_list(value))
        cfg.lambdas.push_back(parse_int(s, line_no));
    } else if (key == "significance") {
      cfg.significance = parse_double(value, line_no);
    } else if (key == "out") {
      cfg.out_dir = resolve_path(base_dir, value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, line_no));
    } else {
      throw InputError("config line " + std::to_string(line_no) +
                       ": unknown key: " + key);
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  return parse(in, fs::path(path).parent_path().string());
}

// ---------------------------------------------------------------------------
// Tables

namespace {

const char* significance_mark(const std::optional<CorrelationResult>& res,
                              double alpha) {
  return res && res->p_value < alpha ? "*" : "";
}

}  // namespace

void write_battery_csv(std::ostream& out, const std::string& language,
                       FreqSource src, const std::vector<BatteryCell>& cells,
                       double significance) {
  out << "language,role,source,variable,method,n,coefficient,statistic,p,"
         "significant,note\n";
  for (const BatteryCell& c : cells) {
    out << csv_field(language) << ',' << to_string(c.role) << ','
        << to_string(src) << ',' << to_string(c.companion) << ','
        << to_string(c.method) << ',' << c.n << ',';
    if (c.result) {
      out << fmtf("%.6f", c.result->coefficient) << ','
          << fmtf("%.4f", c.result->statistic) << ','
          << format_p(c.result->p_value) << ','
          << significance_mark(c.result, significance) << ',';
    } else {
      out << ",,,,";
    }
    out << csv_field(c.note) << '\n';
  }
}

void write_ties_csv(std::ostream& out, const std::vector<LanguageTies>& tables) {
  out << "language,role,source,polysemy_pct,chars_pct,phonemes_pct,"
         "syllables_pct,polysemy_n,chars_n,phonemes_n,syllables_n\n";
  for (const auto& [language, rows] : tables) {
    for (const TiesRow& r : rows) {
      out << csv_field(language) << ',' << to_string(r.role) << ','
          << to_string(r.source);
      for (int i = 0; i < 4; ++i) {
        out << ',';
        if (r.percent_ties[static_cast<std::size_t>(i)])
          out << fmtf("%.4f", *r.percent_ties[static_cast<std::size_t>(i)]);
      }
      for (int i = 0; i < 4; ++i) out << ',' << r.n[static_cast<std::size_t>(i)];
      out << '\n';
    }
  }
}

void write_steiger_csv(std::ostream& out,
                       const std::vector<LanguageSteiger>& tables,
                       double significance) {
  out << "language,role,source,method,var1,var2,n,r_freq_var1,r_freq_var2,"
         "r_var1_var2,t,p,significant,relation\n";
  for (const auto& [language, cells] : tables) {
    for (const SteigerCell& c : cells) {
      if (c.kind != CorrMethod::Pearson && c.kind != CorrMethod::Spearman)
        continue;
      out << csv_field(language) << ',' << to_string(c.role) << ','
          << to_string(c.source) << ',' << to_string(c.kind) << ','
          << to_string(c.l1) << ',' << to_string(c.l2) << ',' << c.n << ',';
      if (c.res) {
        out << fmtf("%.6f", c.res->r_fl1) << ',' << fmtf("%.6f", c.res->r_fl2)
            << ',' << fmtf("%.6f", c.res->r_l1l2) << ','
            << fmtf("%.4f", c.res->t) << ',' << format_p(c.res->p) << ','
            << (c.res->p < significance ? "*" : "") << ',' << c.symbol << '\n';
      } else {
        out << ",,,,,,\n";
      }
    }
  }
}

void write_steiger_symbols_csv(std::ostream& out,
                               const std::vector<LanguageSteiger>& tables) {
  out << "language,role,source,method,chars_vs_phonemes,chars_vs_syllables,"
         "phonemes_vs_syllables\n";
  for (const auto& [language, cells] : tables) {
    // Preserve cell order: fixed as (role, source, kind) x 3 pairs.
    std::map<std::tuple<int, int, int>, std::array<std::string, 3>> grouped;
    std::vector<std::tuple<int, int, int>> order;
    for (const SteigerCell& c : cells) {
      std::tuple<int, int, int> key{static_cast<int>(c.role),
                                    static_cast<int>(c.source),
                                    static_cast<int>(c.kind)};
      if (grouped.find(key) == grouped.end()) order.push_back(key);
      int col;
      if (c.l1 == LengthVar::Chars && c.l2 == LengthVar::Phonemes) col = 0;
      else if (c.l1 == LengthVar::Chars && c.l2 == LengthVar::Syllables) col = 1;
      else col = 2;
      grouped[key][static_cast<std::size_t>(col)] = c.symbol;
    }
    for (const auto& key : order) {
      const auto& [role, source, kind] = key;
      const auto& cols = grouped[key];
      out << csv_field(language) << ',' << to_string(static_cast<Role>(role))
          << ',' << to_string(static_cast<FreqSource>(source)) << ','
          << to_string(static_cast<CorrMethod>(kind)) << ',' << cols[0] << ','
          << cols[1] << ',' << cols[2] << '\n';
    }
  }
}

void write_fits_csv(std::ostream& out, const std::vector<FitRow>& rows) {
  out << "language,role,source,law,lambda,method,N,slope,intercept_log,"
         "prefactor,r_squared\n";
  for (const FitRow& r : rows) {
    out << csv_field(r.language) << ',' << to_string(r.role) << ','
        << to_string(r.source) << ',' << r.law << ',' << r.lambda << ','
        << to_string(r.fit.method) << ',' << r.n_bins << ','
        << fmtf("%.6f", r.fit.exponent) << ','
        << fmtf("%.6f", r.fit.intercept_log) << ','
        << fmtf("%.6g", r.fit.prefactor) << ','
        << fmtf("%.6f", r.fit.r_squared_loglog) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Bundle

namespace {

ordered_json battery_json(const std::string& language, FreqSource src,
                          const std::vector<BatteryCell>& cells, double alpha) {
  ordered_json rows = ordered_json::array();
  for (const BatteryCell& c : cells) {
    ordered_json row;
    row["language"] = language;
    row["role"] = to_string(c.role);
    row["source"] = to_string(src);
    row["variable"] = to_string(c.companion);
    row["method"] = to_string(c.method);
    row["n"] = c.n;
    if (c.result) {
      row["coefficient"] = c.result->coefficient;
      row["statistic"] = c.result->statistic;
      row["p_value"] = c.result->p_value;
      row["p"] = format_p(c.result->p_value);
      row["significant"] = c.result->p_value < alpha;
    } else {
      row["coefficient"] = nullptr;
      row["note"] = c.note;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json ties_json(const std::vector<LanguageTies>& tables) {
  ordered_json rows = ordered_json::array();
  for (const auto& [language, table] : tables) {
    for (const TiesRow& r : table) {
      ordered_json row;
      row["language"] = language;
      row["role"] = to_string(r.role);
      row["source"] = to_string(r.source);
      const char* names[4] = {"polysemy", "chars", "phonemes", "syllables"};
      for (std::size_t i = 0; i < 4; ++i) {
        if (r.percent_ties[i]) row[std::string(names[i]) + "_pct"] = *r.percent_ties[i];
        else row[std::string(names[i]) + "_pct"] = nullptr;
        row[std::string(names[i]) + "_n"] = r.n[i];
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

ordered_json steiger_json(const std::vector<LanguageSteiger>& tables,
                          double alpha) {
  ordered_json rows = ordered_json::array();
  for (const auto& [language, cells] : tables) {
    for (const SteigerCell& c : cells) {
      ordered_json row;
      row["language"] = language;
      row["role"] = to_string(c.role);
      row["source"] = to_string(c.source);
      row["method"] = to_string(c.kind);
      row["var1"] = to_string(c.l1);
      row["var2"] = to_string(c.l2);
      row["n"] = c.n;
      if (c.res) {
        row["r_freq_var1"] = c.res->r_fl1;
        row["r_freq_var2"] = c.res->r_fl2;
        row["r_var1_var2"] = c.res->r_l1l2;
        row["t"] = c.res->t;
        row["p_value"] = c.res->p;
        row["p"] = format_p(c.res->p);
        row["significant"] = c.res->p < alpha;
      }
      if (c.tau1) row["tau1"] = *c.tau1;
      if (c.tau2) row["tau2"] = *c.tau2;
      row["symbol"] = c.symbol;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

ordered_json fits_json(const std::vector<FitRow>& rows) {
  ordered_json out = ordered_json::array();
  for (const FitRow& r : rows) {
    ordered_json row;
    row["language"] = r.language;
    row["role"] = to_string(r.role);
    row["source"] = to_string(r.source);
    row["law"] = r.law;
    row["lambda"] = r.lambda;
    row["method"] = to_string(r.fit.method);
    row["N"] = r.n_bins;
    row["slope"] = r.fit.exponent;
    row["intercept_log"] = r.fit.intercept_log;
    row["prefactor"] = r.fit.prefactor;
    row["r_squared"] = r.fit.r_squared_loglog;
    out.push_back(std::move(row));
  }
  return out;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

std::map<std::string, std::int64_t> source_frequencies(const Dataset& ds,
                                                       Role role,
                                                       FreqSource src) {
  std::map<std::string, std::int64_t> freq;
  for (const WordRecord* r : ds.records_for(role)) {
    if (src == FreqSource::Childes) freq[r->form] = r->childes_freq;
    else if (r->reference_freq) freq[r->form] = *r->reference_freq;
  }
  return freq;
}

}  // namespace

RunResult run_all(const RunConfig& config, bool quiet) {
  config.validate();

  fs::path out_dir(config.out_dir);
  fs::path staging = out_dir;
  staging += ".staging";
  std::error_code ec;
  fs::remove_all(staging, ec);
  fs::create_directories(staging);

  auto say = [&](const std::string& msg) {
    if (!quiet) std::cout << "[lexlaw] " << msg << '\n';
  };

  std::string stage = "setup";
  try {
    stage = "ingest";
    WarningList warnings;
    std::vector<Dataset> datasets;
    for (const std::string& dir : config.corpus_dirs) {
      fs::path root(dir);
      IngestInputs in;
      in.transcripts_dir = (root / "transcripts").string();
      in.polysemy_path = (root / "polysemy.tsv").string();
      in.phonetics_path = (root / "phonetics.tsv").string();
      if (fs::exists(root / "reffreq.txt"))
        in.ref_freq_path = (root / "reffreq.txt").string();
      if (fs::exists(root / "roles.tsv"))
        in.role_map_path = (root / "roles.tsv").string();
      if (fs::exists(root / "sampa_symbols.tsv"))
        in.symbols_path = (root / "sampa_symbols.tsv").string();
      in.language = root.filename().string();
      if (in.language.empty()) in.language = root.parent_path().filename().string();
      say("ingest " + in.language);
      datasets.push_back(ingest_dataset(in, warnings));
    }
    for (const std::string& path : config.dataset_paths) {
      say("load " + path);
      datasets.push_back(Dataset::load(path));
    }
    {
      std::ostringstream w;
      for (const Warning& wn : warnings)
        w << wn.file << ':' << wn.line << ": " << wn.message << '\n';
      write_text_file(staging / "warnings.txt", w.str());
    }

    stage = "correlations";
    for (const Dataset& ds : datasets) {
      for (FreqSource src : config.sources) {
        std::vector<BatteryCell> cells = correlate_battery(ds, src);
        std::string base = "correlations_" + ds.language() + "_" + to_string(src);
        std::ostringstream csv;
        write_battery_csv(csv, ds.language(), src, cells, config.significance);
        write_text_file(staging / (base + ".csv"), csv.str());
        write_text_file(
            staging / (base + ".json"),
            battery_json(ds.language(), src, cells, config.significance).dump(2) +
                "\n");
        say("wrote " + base + ".csv");
      }
    }

    stage = "ties";
    {
      std::vector<LanguageTies> tables;
      for (const Dataset& ds : datasets)
        tables.emplace_back(ds.language(), ties_table(ds));
      std::ostringstream csv;
      write_ties_csv(csv, tables);
      write_text_file(staging / "ties.csv", csv.str());
      write_text_file(staging / "ties.json", ties_json(tables).dump(2) + "\n");
      say("wrote ties.csv");
    }

    stage = "steiger";
    {
      std::vector<LanguageSteiger> tables;
      for (const Dataset& ds : datasets)
        tables.emplace_back(ds.language(), steiger_table(ds, config.significance));
      std::ostringstream csv;
      write_steiger_csv(csv, tables, config.significance);
      write_text_file(staging / "steiger.csv", csv.str());
      std::ostringstream sym;
      write_steiger_symbols_csv(sym, tables);
      write_text_file(staging / "steiger_symbols.csv", sym.str());
      write_text_file(staging / "steiger.json",
                      steiger_json(tables, config.significance).dump(2) + "\n");
      {
        // Symbol table JSON mirrors the CSV grouping.
        ordered_json rows = ordered_json::array();
        for (const auto& [language, cells] : tables) {
          for (const SteigerCell& c : cells) {
            ordered_json row;
            row["language"] = language;
            row["role"] = to_string(c.role);
            row["source"] = to_string(c.source);
            row["method"] = to_string(c.kind);
            row["pair"] = std::string(to_string(c.l1)) + "_vs_" + to_string(c.l2);
            row["symbol"] = c.symbol;
            rows.push_back(std::move(row));
          }
        }
        write_text_file(staging / "steiger_symbols.json", rows.dump(2) + "\n");
      }
      say("wrote steiger.csv");
    }

    stage = "fits";
    for (std::int64_t lambda : config.lambdas) {
      std::vector<FitRow> rows;
      for (const Dataset& ds : datasets) {
        for (Role role : {Role::Child, Role::Adult}) {
          for (FreqSource src : config.sources) {
            std::vector<double> meanings = meanings_by_rank(ds, role, src);
            if (static_cast<std::int64_t>(meanings.size()) < lambda ||
                meanings.size() < 3)
              continue;
            std::int64_t n_bins =
                lambda == 1 ? static_cast<std::int64_t>(meanings.size())
                            : static_cast<std::int64_t>(meanings.size()) / lambda;
            for (FitMethod m : {FitMethod::NlsNormal, FitMethod::OlsLoglog,
                                FitMethod::MlLognormal}) {
              FitRow row;
              row.language = ds.language();
              row.role = role;
              row.source = src;
              row.law = "meaning_distribution";
              row.lambda = lambda;
              row.n_bins = n_bins;
              row.fit = fit_meaning_distribution(ds, role, src, lambda, m);
              rows.push_back(std::move(row));
            }
          }
        }
      }
      std::string base = "fits_lambda" + std::to_string(lambda);
      std::ostringstream csv;
      write_fits_csv(csv, rows);
      write_text_file(staging / (base + ".csv"), csv.str());
      write_text_file(staging / (base + ".json"), fits_json(rows).dump(2) + "\n");
      say("wrote " + base + ".csv");
    }

    stage = "laws";
    {
      std::vector<FitRow> rows;
      for (const Dataset& ds : datasets) {
        for (Role role : {Role::Child, Role::Adult}) {
          for (FreqSource src : config.sources) {
            std::map<std::string, std::int64_t> freq =
                source_frequencies(ds, role, src);
            if (freq.size() >= 3) {
              FitRow row;
              row.language = ds.language();
              row.role = role;
              row.source = src;
              row.law = "meaning_frequency";
              row.lambda = 1;
              row.n_bins = 0;
              row.fit = fit_meaning_frequency(ds, role, src);
              // n: records valid on both columns
              row.n_bins = static_cast<std::int64_t>(freq.size());
              rows.push_back(std::move(row));

              RankedLexicon lex = rank_by_frequency(freq);
              FitRow zipf;
              zipf.language = ds.language();
              zipf.role = role;
              zipf.source = src;
              zipf.law = "rank_frequency";
              zipf.lambda = 1;
              zipf.n_bins = static_cast<std::int64_t>(lex.entries.size());
              zipf.fit = fit_zipf_rank_frequency(lex);
              rows.push_back(std::move(zipf));
            }
          }
        }
      }
      std::ostringstream csv;
      write_fits_csv(csv, rows);
      write_text_file(staging / "laws.csv", csv.str());
      write_text_file(staging / "laws.json", fits_json(rows).dump(2) + "\n");
      say("wrote laws.csv");
    }

    stage = "figures";
    for (const Dataset& ds : datasets) {
      auto [fx, fy] = paired_values(ds, Role::Child, FreqSource::Childes,
                                    Companion::Polysemy);
      if (fx.size() >= 2) {
        ScatterOptions opts;
        opts.title = ds.language() + ": meaning count vs frequency (child)";
        opts.x_label = "frequency";
        opts.y_label = "meaning count";
        render_scatter(fx, fy,
                       (staging / ("fig_" + ds.language() + "_meaning.svg")).string(),
                       opts);
        say("wrote fig_" + ds.language() + "_meaning.svg");
      }
      auto [cx, cy] = paired_values(ds, Role::Child, FreqSource::Childes,
                                    Companion::Chars);
      if (cx.size() >= 2) {
        ScatterOptions opts;
        opts.title = ds.language() + ": characters vs frequency (child)";
        opts.x_label = "frequency";
        opts.y_label = "characters";
        render_scatter(cx, cy,
                       (staging / ("fig_" + ds.language() + "_chars.svg")).string(),
                       opts);
        say("wrote fig_" + ds.language() + "_chars.svg");
      }
    }

    stage = "manifest";
    {
      std::vector<std::string> names;
      for (const auto& entry : fs::directory_iterator(staging))
        if (entry.is_regular_file())
          names.push_back(entry.path().filename().string());
      std::sort(names.begin(), names.end());
      ordered_json manifest;
      manifest["files"] = ordered_json::array();
      for (const std::string& name : names) {
        std::ifstream in(staging / name, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string bytes = buf.str();
        ordered_json row;
        row["name"] = name;
        row["bytes"] = bytes.size();
        row["fnv1a64"] = fnv1a64_hex(bytes);
        manifest["files"].push_back(std::move(row));
      }
      write_text_file(staging / "manifest.json", manifest.dump(2) + "\n");
      say("wrote manifest.json");
    }

    stage = "publish";
    fs::remove_all(out_dir, ec);
    fs::rename(staging, out_dir);
  } catch (const InputError& e) {
    fs::remove_all(staging, ec);
    throw InputError("stage '" + stage + "' failed: " + e.what());
  } catch (const NumericError& e) {
    fs::remove_all(staging, ec);
    throw NumericError("stage '" + stage + "' failed: " + e.what());
  } catch (const std::exception& e) {
    fs::remove_all(staging, ec);
    throw InputError("stage '" + stage + "' failed: " + std::string(e.what()));
  }

  RunResult result;
  result.out_dir = out_dir.string();
  for (const auto& entry : fs::directory_iterator(out_dir))
    if (entry.is_regular_file())
      result.files.push_back(entry.path().filename().string());
  std::sort(result.files.begin(), result.files.end());
  return result;
}

}  // namespace lexlaw
