#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lexlaw/common.hpp"
#include "lexlaw/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deterministic synthetic corpus generator"};

  std::string out_dir = "corpus";
  std::uint64_t seed = 20240601;
  std::string name;
  int n_types = 2000;
  std::int64_t zipf_c = 3000;
  bool quiet = false;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--name", name,
                 "generate a single language with this label instead of the "
                 "bundled three-language corpus");
  app.add_option("--types", n_types, "lexicon size (single-language mode)");
  app.add_option("--zipf-c", zipf_c, "head frequency (single-language mode)");
  app.add_flag("--quiet", quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (name.empty()) {
      lexlaw::write_bundled_corpus(out_dir, seed);
      if (!quiet)
        std::cout << "[lexlaw-synth] bundled corpus (elva, karu, mosi) at "
                  << out_dir << '\n';
    } else {
      lexlaw::SynthLanguage cfg{name, n_types, zipf_c, seed};
      lexlaw::write_synthetic_language(out_dir, cfg);
      if (!quiet)
        std::cout << "[lexlaw-synth] language " << name << " at " << out_dir
                  << '\n';
    }
  } catch (const lexlaw::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
