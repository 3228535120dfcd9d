#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lexlaw/common.hpp"
#include "lexlaw/lawfit.hpp"
#include "lexlaw/report.hpp"
#include "lexlaw/synth.hpp"
#include "temp_dir.hpp"

using namespace lexlaw;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::int64_t count_of(const std::string& text, const std::string& needle) {
  std::int64_t count = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

nlohmann::json svg_metadata(const std::string& svg) {
  const std::string open = "<metadata id=\"lexlaw-data\">";
  std::size_t a = svg.find(open);
  REQUIRE(a != std::string::npos);
  a += open.size();
  std::size_t b = svg.find("</metadata>", a);
  REQUIRE(b != std::string::npos);
  return nlohmann::json::parse(svg.substr(a, b - a));
}

}  // namespace

TEST_CASE("format_p: decimal rendering and the <1e-k ladder") {
  CHECK(format_p(0.376) == "0.376");
  CHECK(format_p(1.0) == "1.000");
  CHECK(format_p(0.05) == "0.050");
  CHECK(format_p(0.001) == "0.001");
  CHECK(format_p(0.0009) == "<1e-3");
  CHECK(format_p(1e-4) == "<1e-3");   // 1e-4 is not strictly below 1e-4
  CHECK(format_p(5e-5) == "<1e-4");
  CHECK(format_p(1e-9) == "<1e-8");
  CHECK(format_p(9.9e-10) == "<1e-9");
  CHECK(format_p(1e-300) == "<1e-299");
  CHECK(format_p(0.0) == "<1e-323");
  CHECK(format_p(-0.5) == "<1e-323");  // clamped
  CHECK(format_p(2.0) == "1.000");     // clamped
  CHECK(format_p(std::nan("")) == "1.000");
}

TEST_CASE("render_scatter: markers, caption, drop count, metadata") {
  TempDir tmp;
  std::vector<double> x{10, 100, 1000, -1};
  std::vector<double> y{4, 3, 2, 5};
  ScatterOptions opts;
  opts.title = "demo <plot> & more";
  opts.y_label = "meanings";
  std::string path = tmp.str("fig.svg");
  int dropped = render_scatter(x, y, path, opts);
  CHECK(dropped == 1);

  std::string svg = slurp(path);
  CHECK(svg.rfind("<svg ", 0) == 0);
  CHECK(svg.find("</svg>\n") == svg.size() - 7);
  CHECK(count_of(svg, "<circle ") == 3);
  CHECK(svg.find("n = 3 (1 dropped on log axes)") != std::string::npos);
  CHECK(svg.find("demo &lt;plot&gt; &amp; more") != std::string::npos);
  CHECK(svg.find("meanings") != std::string::npos);

  nlohmann::json meta = svg_metadata(svg);
  CHECK(meta.at("n").get<int>() == 3);
  CHECK(meta.at("dropped").get<int>() == 1);
  // The metadata curves are the smoothing output on log10 coordinates,
  // exactly as computed by the library.
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < 3; ++i) {
    lx.push_back(std::log10(x[i]));
    ly.push_back(std::log10(y[i]));
  }
  GridCurve want = locpoly_smooth(lx, ly);
  auto got_x = meta.at("smooth_x").get<std::vector<double>>();
  auto got_y = meta.at("smooth_y").get<std::vector<double>>();
  REQUIRE(got_x.size() == want.xs.size());
  CHECK(got_x == want.xs);  // shortest-round-trip doubles: exact
  CHECK(got_y == want.ys);
  GridCurve dens = density_curve(lx);
  CHECK(meta.at("density_y").get<std::vector<double>>() == dens.ys);
}

TEST_CASE("render_scatter: coincident points collapse to one dense cell") {
  TempDir tmp;
  std::vector<double> x{50, 50, 50, 50};
  std::vector<double> y{7, 7, 7, 7};
  std::string path = tmp.str("one.svg");
  CHECK(render_scatter(x, y, path) == 0);
  std::string svg = slurp(path);
  CHECK(count_of(svg, "<circle ") == 4);
  CHECK(count_of(svg, "<polygon ") == 1);
  CHECK(svg.find("#1b5e20") != std::string::npos);  // lone cell is densest
  // Degenerate geometry: no smooth or density overlay, metadata still valid.
  CHECK(count_of(svg, "<polyline ") == 0);
  nlohmann::json meta = svg_metadata(svg);
  CHECK(meta.count("smooth_x") == 0);
  CHECK(meta.at("n").get<int>() == 4);
}

TEST_CASE("render_scatter: failure modes") {
  TempDir tmp;
  CHECK_THROWS_AS(render_scatter({1, 2}, {1, 2, 3}, tmp.str("a.svg")),
                  InputError);
  CHECK_THROWS_AS(render_scatter({1, -2, -3}, {1, 2, 3}, tmp.str("b.svg")),
                  InputError);  // a single survivor is not plottable
  CHECK_THROWS_AS(render_scatter({1, 2}, {1, 2}, tmp.str("no/dir/c.svg")),
                  InputError);
}

TEST_CASE("RunConfig: parsing, path resolution, list semantics") {
  std::istringstream in(
      "# run configuration\n"
      "corpus = corpora/elva   # trailing comment\n"
      "corpus = /abs/karu\n"
      "dataset = sets/x.json\n"
      "freq = childes, reference\n"
      "lambda = 100, 500\n"
      "lambda = 50\n"
      "significance = 0.01\n"
      "out = bundle\n"
      "seed = 7\n");
  RunConfig cfg = RunConfig::parse(in, "/base");
  REQUIRE(cfg.corpus_dirs.size() == 2);
  CHECK(cfg.corpus_dirs[0] == "/base/corpora/elva");
  CHECK(cfg.corpus_dirs[1] == "/abs/karu");
  REQUIRE(cfg.dataset_paths.size() == 1);
  CHECK(cfg.dataset_paths[0] == "/base/sets/x.json");
  REQUIRE(cfg.sources.size() == 2);
  CHECK(cfg.sources[0] == FreqSource::Childes);
  CHECK(cfg.sources[1] == FreqSource::Reference);
  // The first lambda line replaces the defaults; later lines append.
  CHECK(cfg.lambdas == std::vector<std::int64_t>{100, 500, 50});
  CHECK(cfg.significance == 0.01);
  CHECK(cfg.out_dir == "/base/bundle");
  CHECK(cfg.seed == 7);
  cfg.validate();

  std::istringstream defaults("corpus = c\n");
  RunConfig d = RunConfig::parse(defaults, "");
  CHECK(d.lambdas == std::vector<std::int64_t>{100, 500});
  CHECK(d.sources.size() == 2);
  CHECK(d.significance == 0.05);

  std::istringstream bad_key("wibble = 3\n");
  CHECK_THROWS_AS(RunConfig::parse(bad_key, ""), InputError);
  std::istringstream bad_line("corpus\n");
  CHECK_THROWS_AS(RunConfig::parse(bad_line, ""), InputError);
  std::istringstream bad_int("lambda = ten\n");
  CHECK_THROWS_AS(RunConfig::parse(bad_int, ""), InputError);
  std::istringstream bad_src("freq = weekly\n");
  CHECK_THROWS_AS(RunConfig::parse(bad_src, ""), InputError);
}

TEST_CASE("RunConfig::validate: range checks") {
  RunConfig cfg;
  cfg.corpus_dirs = {"c"};
  cfg.validate();

  RunConfig bad = cfg;
  bad.significance = 0.0;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad.significance = 1.0;
  CHECK_THROWS_AS(bad.validate(), InputError);

  bad = cfg;
  bad.lambdas.clear();
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = cfg;
  bad.lambdas = {0};
  CHECK_THROWS_AS(bad.validate(), InputError);

  bad = cfg;
  bad.sources.clear();
  CHECK_THROWS_AS(bad.validate(), InputError);

  bad = cfg;
  bad.corpus_dirs.clear();
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad.dataset_paths = {"d.json"};
  bad.validate();  // datasets alone suffice
}

TEST_CASE("write_battery_csv: quoting, stars, empty cells") {
  std::vector<BatteryCell> cells(2);
  cells[0].role = Role::Child;
  cells[0].companion = Companion::Polysemy;
  cells[0].method = CorrMethod::Pearson;
  cells[0].n = 50;
  cells[0].result = CorrelationResult{CorrMethod::Pearson, -0.53, -2.25,
                                      0.012345, 50};
  cells[1].role = Role::Adult;
  cells[1].companion = Companion::Chars;
  cells[1].method = CorrMethod::Spearman;
  cells[1].n = 2;
  cells[1].note = "n < 3";

  std::ostringstream out;
  write_battery_csv(out, "toy,x", FreqSource::Childes, cells, 0.05);
  std::string want =
      "language,role,source,variable,method,n,coefficient,statistic,p,"
      "significant,note\n"
      "\"toy,x\",child,childes,polysemy,pearson,50,-0.530000,-2.2500,0.012,*,\n"
      "\"toy,x\",adult,childes,n_chars,spearman,2,,,,,n < 3\n";
  CHECK(out.str() == want);

  // At the threshold the star disappears.
  cells[0].result->p_value = 0.05;
  std::ostringstream out2;
  write_battery_csv(out2, "t", FreqSource::Reference, cells, 0.05);
  CHECK(out2.str().find("0.050,*") == std::string::npos);
  CHECK(out2.str().find("reference") != std::string::npos);
}

TEST_CASE("write_ties_csv: optional percentages") {
  TiesRow r;
  r.role = Role::Child;
  r.source = FreqSource::Childes;
  r.percent_ties = {12.34567, std::nullopt, 50.0, 99.99999};
  r.n = {10, 1, 20, 30};
  std::ostringstream out;
  write_ties_csv(out, {{"lang", {r}}});
  std::string want =
      "language,role,source,polysemy_pct,chars_pct,phonemes_pct,syllables_pct,"
      "polysemy_n,chars_n,phonemes_n,syllables_n\n"
      "lang,child,childes,12.3457,,50.0000,100.0000,10,1,20,30\n";
  CHECK(out.str() == want);
}

TEST_CASE("write_steiger_csv and symbols: Kendall handling") {
  SteigerCell p;
  p.role = Role::Child;
  p.source = FreqSource::Childes;
  p.kind = CorrMethod::Pearson;
  p.l1 = LengthVar::Chars;
  p.l2 = LengthVar::Phonemes;
  p.n = 120;
  SteigerResult res;
  res.r_fl1 = -0.25;
  res.r_fl2 = -0.125;
  res.r_l1l2 = 0.5;
  res.n = 120;
  res.t = -3.125;
  res.p = 0.002244;
  res.relation = Relation::LtSig;
  p.res = res;
  p.symbol = "<*";

  SteigerCell k = p;
  k.kind = CorrMethod::KendallB;
  k.res.reset();
  k.tau1 = -0.2;
  k.tau2 = -0.1;
  k.symbol = "<";

  SteigerCell empty;
  empty.role = Role::Adult;
  empty.source = FreqSource::Reference;
  empty.kind = CorrMethod::Spearman;
  empty.l1 = LengthVar::Phonemes;
  empty.l2 = LengthVar::Syllables;
  empty.n = 3;

  std::ostringstream out;
  write_steiger_csv(out, {{"L", {p, k, empty}}}, 0.05);
  std::string want =
      "language,role,source,method,var1,var2,n,r_freq_var1,r_freq_var2,"
      "r_var1_var2,t,p,significant,relation\n"
      "L,child,childes,pearson,n_chars,n_phonemes,120,-0.250000,-0.125000,"
      "0.500000,-3.1250,0.002,*,<*\n"
      "L,adult,reference,spearman,n_phonemes,n_syllables,3,,,,,,,\n";
  CHECK(out.str() == want);  // the Kendall cell is analytic-table-invisible

  SteigerCell k2 = k;
  k2.l1 = LengthVar::Chars;
  k2.l2 = LengthVar::Syllables;
  k2.symbol = ">";
  std::ostringstream sym;
  write_steiger_symbols_csv(sym, {{"L", {p, k, k2}}});
  std::string want_sym =
      "language,role,source,method,chars_vs_phonemes,chars_vs_syllables,"
      "phonemes_vs_syllables\n"
      "L,child,childes,pearson,<*,,\n"
      "L,child,childes,kendall_b,<,>,\n";
  CHECK(sym.str() == want_sym);
}

TEST_CASE("write_fits_csv: formatting") {
  FitRow r;
  r.language = "elva";
  r.role = Role::Child;
  r.source = FreqSource::Childes;
  r.law = "meaning_distribution";
  r.lambda = 100;
  r.n_bins = 162;
  r.fit.method = FitMethod::OlsLoglog;
  r.fit.exponent = -0.5;
  r.fit.intercept_log = 2.2430380486862944;
  r.fit.prefactor = 175.0;
  r.fit.r_squared_loglog = 0.999875;
  std::ostringstream out;
  write_fits_csv(out, {r});
  std::string want =
      "language,role,source,law,lambda,method,N,slope,intercept_log,prefactor,"
      "r_squared\n"
      "elva,child,childes,meaning_distribution,100,OLS_LOGLOG,162,-0.500000,"
      "2.243038,175,0.999875\n";
  CHECK(out.str() == want);
}

TEST_CASE("run_all: bundle content, manifest, determinism, lambda scoping") {
  TempDir tmp;
  SynthLanguage lang;
  lang.name = "tinua";
  lang.n_types = 260;
  lang.zipf_c = 900;
  lang.seed = 5;
  write_synthetic_language(tmp.str("tinua"), lang);

  RunConfig cfg;
  cfg.corpus_dirs = {tmp.str("tinua")};
  cfg.lambdas = {5, 20};
  cfg.out_dir = tmp.str("bundle");
  RunResult res = run_all(cfg, /*quiet=*/true);

  CHECK(res.out_dir == tmp.str("bundle"));
  CHECK(std::is_sorted(res.files.begin(), res.files.end()));
  for (const char* name :
       {"warnings.txt", "correlations_tinua_childes.csv",
        "correlations_tinua_childes.json", "correlations_tinua_reference.csv",
        "ties.csv", "ties.json", "steiger.csv", "steiger_symbols.csv",
        "steiger.json", "steiger_symbols.json", "fits_lambda5.csv",
        "fits_lambda20.csv", "fits_lambda5.json", "laws.csv", "laws.json",
        "fig_tinua_meaning.svg", "fig_tinua_chars.svg", "manifest.json"}) {
    CAPTURE(name);
    CHECK(std::count(res.files.begin(), res.files.end(), name) == 1);
    CHECK(fs::exists(fs::path(cfg.out_dir) / name));
  }
  CHECK_FALSE(fs::exists(tmp.str("bundle.staging")));

  // The manifest covers every other file with correct sizes and hashes.
  nlohmann::json manifest =
      nlohmann::json::parse(slurp(tmp.str("bundle/manifest.json")));
  const auto& files = manifest.at("files");
  CHECK(files.size() == res.files.size() - 1);  // all but the manifest itself
  for (const auto& row : files) {
    std::string name = row.at("name").get<std::string>();
    std::string bytes = slurp(tmp.str("bundle/" + name));
    CHECK(row.at("bytes").get<std::size_t>() == bytes.size());
    CHECK(row.at("fnv1a64").get<std::string>() == fnv1a64_hex(bytes));
  }

  // Same inputs, second output directory: every artifact byte-identical.
  RunConfig cfg2 = cfg;
  cfg2.out_dir = tmp.str("bundle2");
  RunResult res2 = run_all(cfg2, true);
  REQUIRE(res2.files == res.files);
  for (const std::string& name : res.files) {
    CAPTURE(name);
    CHECK(slurp(tmp.str("bundle/" + name)) == slurp(tmp.str("bundle2/" + name)));
  }

  // Narrowing the lambda list only affects the fit tables and the manifest.
  RunConfig cfg3 = cfg;
  cfg3.lambdas = {5};
  cfg3.out_dir = tmp.str("bundle3");
  RunResult res3 = run_all(cfg3, true);
  CHECK(std::count(res3.files.begin(), res3.files.end(), "fits_lambda20.csv") ==
        0);
  CHECK(slurp(tmp.str("bundle3/fits_lambda5.csv")) ==
        slurp(tmp.str("bundle/fits_lambda5.csv")));
  CHECK(slurp(tmp.str("bundle3/correlations_tinua_childes.csv")) ==
        slurp(tmp.str("bundle/correlations_tinua_childes.csv")));
  CHECK(slurp(tmp.str("bundle3/laws.csv")) == slurp(tmp.str("bundle/laws.csv")));
  CHECK(slurp(tmp.str("bundle3/manifest.json")) !=
        slurp(tmp.str("bundle/manifest.json")));
}

TEST_CASE("run_all: failures carry the stage name and clean up staging") {
  TempDir tmp;
  RunConfig cfg;
  cfg.corpus_dirs = {tmp.str("nonexistent")};
  cfg.out_dir = tmp.str("out");
  try {
    run_all(cfg, true);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).rfind("stage 'ingest' failed: ", 0) == 0);
  }
  CHECK_FALSE(fs::exists(tmp.str("out.staging")));
  CHECK_FALSE(fs::exists(tmp.str("out")));

  RunConfig invalid;
  invalid.out_dir = tmp.str("out2");
  CHECK_THROWS_AS(run_all(invalid, true), InputError);  // validate(): no inputs
}
