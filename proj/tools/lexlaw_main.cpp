#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexlaw/common.hpp"
#include "lexlaw/corpus.hpp"
#include "lexlaw/ingest.hpp"
#include "lexlaw/lawfit.hpp"
#include "lexlaw/report.hpp"
#include "lexlaw/stats.hpp"
#include "lexlaw/steiger.hpp"

namespace {

using namespace lexlaw;

void with_output(const std::string& path,
                 const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  fn(out);
}

void print_warnings(const WarningList& warnings, bool quiet) {
  if (quiet) return;
  for (const Warning& w : warnings) {
    std::cerr << w.file;
    if (w.line > 0) std::cerr << ':' << w.line;
    std::cerr << ": warning: " << w.message << '\n';
  }
}

// Battery rows, optionally recomputed for a single requested method. The
// default battery runs Pearson, Spearman, and Kendall-B; kendall_a is served
// by evaluating those cells directly.
std::vector<BatteryCell> battery_for(const Dataset& ds, FreqSource src,
                                     const std::optional<CorrMethod>& only) {
  std::vector<BatteryCell> cells = correlate_battery(ds, src);
  if (!only) return cells;
  if (*only == CorrMethod::KendallA) {
    std::vector<BatteryCell> out;
    for (Role role : {Role::Child, Role::Adult}) {
      for (Companion companion : kCompanions) {
        BatteryCell cell;
        cell.role = role;
        cell.companion = companion;
        cell.method = CorrMethod::KendallA;
        auto [fx, fy] = paired_values(ds, role, src, companion);
        cell.n = static_cast<std::int64_t>(fx.size());
        if (cell.n < 3) {
          cell.note = "n < 3";
        } else {
          try {
            cell.result = kendall(fx, fy, KendallVariant::A);
          } catch (const NumericError& e) {
            cell.note = e.what();
          }
        }
        out.push_back(std::move(cell));
      }
    }
    return out;
  }
  std::vector<BatteryCell> out;
  for (BatteryCell& c : cells)
    if (c.method == *only) out.push_back(std::move(c));
  return out;
}

std::vector<std::int64_t> parse_lambda_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (cur.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stoll(cur, &pos));
      if (pos != cur.size()) throw std::invalid_argument(cur);
    } catch (const std::exception&) {
      throw InputError("bad bin width: " + cur);
    }
  }
  if (out.empty()) throw InputError("empty bin width list");
  for (std::int64_t l : out)
    if (l < 1) throw InputError("bin widths must be >= 1");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical toolkit for the meaning-frequency law and the law "
               "of abbreviation"};
  app.require_subcommand(0, 1);

  std::string g_config, g_out;
  std::uint64_t g_seed = 0;
  bool g_quiet = false;
  bool g_seed_set = false, g_out_set = false;
  app.add_option("--config", g_config, "key = value configuration file");
  app.add_option("--seed", g_seed, "random seed override")
      ->each([&](const std::string&) { g_seed_set = true; });
  app.add_option("--out", g_out, "output path override")
      ->each([&](const std::string&) { g_out_set = true; });
  app.add_flag("--quiet", g_quiet, "suppress progress and warnings");

  // ingest
  auto* cmd_ingest = app.add_subcommand("ingest", "Parse transcripts and lexicons into a dataset");
  IngestInputs ing;
  std::string ingest_out = "dataset.json";
  cmd_ingest->add_option("--transcripts", ing.transcripts_dir, "transcript directory")->required();
  cmd_ingest->add_option("--polysemy", ing.polysemy_path, "polysemy lexicon (TSV)")->required();
  cmd_ingest->add_option("--phonetics", ing.phonetics_path, "phonetic lexicon (TSV)")->required();
  cmd_ingest->add_option("--ref-freq", ing.ref_freq_path, "reference frequency list");
  cmd_ingest->add_option("--role-map", ing.role_map_path, "speaker code to role map (TSV)");
  cmd_ingest->add_option("--symbols", ing.symbols_path, "transcription symbol table (TSV)");
  cmd_ingest->add_option("--language", ing.language, "language label");
  cmd_ingest->add_option("--out", ingest_out, "output dataset path");

  // correlate
  auto* cmd_corr = app.add_subcommand("correlate", "Frequency vs companion-variable correlation table");
  std::string corr_dataset, corr_freq = "childes", corr_method, corr_out;
  double corr_alpha = 0.05;
  cmd_corr->add_option("--dataset", corr_dataset, "dataset JSON")->required();
  cmd_corr->add_option("--freq", corr_freq, "frequency source: childes|reference");
  cmd_corr->add_option("--method", corr_method, "restrict to one method: pearson|spearman|kendall_a|kendall_b");
  cmd_corr->add_option("--alpha", corr_alpha, "significance level");
  cmd_corr->add_option("--out", corr_out, "output CSV (default stdout)");

  // ties
  auto* cmd_ties = app.add_subcommand("ties", "Percentage of tied pairs per variable");
  std::string ties_dataset, ties_out;
  cmd_ties->add_option("--dataset", ties_dataset, "dataset JSON")->required();
  cmd_ties->add_option("--out", ties_out, "output CSV (default stdout)");

  // steiger
  auto* cmd_steiger = app.add_subcommand("steiger", "Dependent-correlation comparison of length measures");
  std::string steiger_dataset, steiger_out;
  double steiger_alpha = 0.05;
  cmd_steiger->add_option("--dataset", steiger_dataset, "dataset JSON")->required();
  cmd_steiger->add_option("--alpha", steiger_alpha, "significance level");
  cmd_steiger->add_option("--out", steiger_out, "analytic table CSV; the symbol table lands next to it (default stdout)");

  // lawfit
  auto* cmd_lawfit = app.add_subcommand("lawfit", "Binned power-law fits of the meaning distribution");
  std::string lawfit_dataset, lawfit_freq = "childes", lawfit_role = "child";
  std::string lawfit_bins = "100,500", lawfit_out;
  cmd_lawfit->add_option("--dataset", lawfit_dataset, "dataset JSON")->required();
  cmd_lawfit->add_option("--freq", lawfit_freq, "frequency source: childes|reference");
  cmd_lawfit->add_option("--role", lawfit_role, "speaker role: child|adult");
  cmd_lawfit->add_option("--bin", lawfit_bins, "comma-separated bin widths");
  cmd_lawfit->add_option("--out", lawfit_out, "output CSV (default stdout)");

  // plot
  auto* cmd_plot = app.add_subcommand("plot", "Log-log scatter figure with smooth and density overlays");
  std::string plot_dataset, plot_freq = "childes", plot_role = "child";
  std::string plot_var = "polysemy", plot_out = "figure.svg";
  double plot_bandwidth = 0.0;
  cmd_plot->add_option("--dataset", plot_dataset, "dataset JSON")->required();
  cmd_plot->add_option("--freq", plot_freq, "frequency source: childes|reference");
  cmd_plot->add_option("--role", plot_role, "speaker role: child|adult");
  cmd_plot->add_option("--var", plot_var, "y variable: polysemy|chars|phonemes|syllables");
  cmd_plot->add_option("--bandwidth", plot_bandwidth, "smoothing bandwidth in log10 units");
  cmd_plot->add_option("--out", plot_out, "output SVG path");

  // all
  auto* cmd_all = app.add_subcommand("all", "Run the full pipeline into a report bundle");
  std::string all_config;
  cmd_all->add_option("--config", all_config, "key = value configuration file");

  // Global flags remain usable after a subcommand name.
  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(cmd_ingest)) {
      WarningList warnings;
      Dataset ds = ingest_dataset(ing, warnings);
      print_warnings(warnings, g_quiet);
      std::string out = g_out_set ? g_out : ingest_out;
      ds.save(out);
      if (!g_quiet)
        std::cout << "[lexlaw] wrote " << out << " (" << ds.records().size()
                  << " records)\n";
    } else if (app.got_subcommand(cmd_corr)) {
      Dataset ds = Dataset::load(corr_dataset);
      FreqSource src = freq_source_from_string(corr_freq);
      std::optional<CorrMethod> only;
      if (!corr_method.empty()) {
        if (corr_method == "pearson") only = CorrMethod::Pearson;
        else if (corr_method == "spearman") only = CorrMethod::Spearman;
        else if (corr_method == "kendall_a") only = CorrMethod::KendallA;
        else if (corr_method == "kendall_b") only = CorrMethod::KendallB;
        else throw InputError("unknown method: " + corr_method);
      }
      std::vector<BatteryCell> cells = battery_for(ds, src, only);
      with_output(g_out_set ? g_out : corr_out, [&](std::ostream& out) {
        write_battery_csv(out, ds.language(), src, cells, corr_alpha);
      });
    } else if (app.got_subcommand(cmd_ties)) {
      Dataset ds = Dataset::load(ties_dataset);
      std::vector<LanguageTies> tables{{ds.language(), ties_table(ds)}};
      with_output(g_out_set ? g_out : ties_out,
                  [&](std::ostream& out) { write_ties_csv(out, tables); });
    } else if (app.got_subcommand(cmd_steiger)) {
      Dataset ds = Dataset::load(steiger_dataset);
      std::vector<LanguageSteiger> tables{
          {ds.language(), steiger_table(ds, steiger_alpha)}};
      std::string out = g_out_set ? g_out : steiger_out;
      if (out.empty() || out == "-") {
        write_steiger_csv(std::cout, tables, steiger_alpha);
        std::cout << '\n';
        write_steiger_symbols_csv(std::cout, tables);
      } else {
        with_output(out, [&](std::ostream& o) {
          write_steiger_csv(o, tables, steiger_alpha);
        });
        std::string stem = out;
        std::size_t dot = stem.rfind('.');
        std::string symbols_path =
            dot == std::string::npos
                ? stem + "_symbols"
                : stem.substr(0, dot) + "_symbols" + stem.substr(dot);
        with_output(symbols_path, [&](std::ostream& o) {
          write_steiger_symbols_csv(o, tables);
        });
        if (!g_quiet)
          std::cout << "[lexlaw] wrote " << out << " and " << symbols_path << '\n';
      }
    } else if (app.got_subcommand(cmd_lawfit)) {
      Dataset ds = Dataset::load(lawfit_dataset);
      FreqSource src = freq_source_from_string(lawfit_freq);
      Role role = role_from_string(lawfit_role);
      std::vector<std::int64_t> lambdas = parse_lambda_list(lawfit_bins);
      std::vector<FitRow> rows;
      for (std::int64_t lambda : lambdas) {
        std::vector<double> meanings = meanings_by_rank(ds, role, src);
        if (static_cast<std::int64_t>(meanings.size()) < lambda)
          throw InputError("fewer ranked values than one bin of width " +
                           std::to_string(lambda));
        for (FitMethod m : {FitMethod::NlsNormal, FitMethod::OlsLoglog,
                            FitMethod::MlLognormal}) {
          FitRow row;
          row.language = ds.language();
          row.role = role;
          row.source = src;
          row.law = "meaning_distribution";
          row.lambda = lambda;
          row.n_bins = lambda == 1
                           ? static_cast<std::int64_t>(meanings.size())
                           : static_cast<std::int64_t>(meanings.size()) / lambda;
          row.fit = fit_meaning_distribution(ds, role, src, lambda, m);
          rows.push_back(std::move(row));
        }
      }
      with_output(g_out_set ? g_out : lawfit_out,
                  [&](std::ostream& out) { write_fits_csv(out, rows); });
    } else if (app.got_subcommand(cmd_plot)) {
      Dataset ds = Dataset::load(plot_dataset);
      FreqSource src = freq_source_from_string(plot_freq);
      Role role = role_from_string(plot_role);
      Companion companion;
      if (plot_var == "polysemy") companion = Companion::Polysemy;
      else if (plot_var == "chars") companion = Companion::Chars;
      else if (plot_var == "phonemes") companion = Companion::Phonemes;
      else if (plot_var == "syllables") companion = Companion::Syllables;
      else throw InputError("unknown variable: " + plot_var);
      auto [fx, fy] = paired_values(ds, role, src, companion);
      ScatterOptions opts;
      opts.title = ds.language() + ": " + plot_var + " vs frequency (" +
                   to_string(role) + ")";
      opts.x_label = "frequency";
      opts.y_label = plot_var;
      opts.bandwidth = plot_bandwidth;
      std::string out = g_out_set ? g_out : plot_out;
      int dropped = render_scatter(fx, fy, out, opts);
      if (!g_quiet) {
        std::cout << "[lexlaw] wrote " << out;
        if (dropped > 0) std::cout << " (" << dropped << " points dropped)";
        std::cout << '\n';
      }
    } else if (app.got_subcommand(cmd_all)) {
      std::string config_path = !all_config.empty() ? all_config : g_config;
      if (config_path.empty())
        throw InputError("`all` needs --config FILE");
      RunConfig cfg = RunConfig::load(config_path);
      if (g_out_set) cfg.out_dir = g_out;
      if (g_seed_set) cfg.seed = g_seed;
      RunResult res = run_all(cfg, g_quiet);
      if (!g_quiet)
        std::cout << "[lexlaw] bundle at " << res.out_dir << " ("
                  << res.files.size() << " files)\n";
    } else {
      std::cout << app.help();
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
