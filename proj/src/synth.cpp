#include "lexlaw/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <vector>

#include "lexlaw/common.hpp"

namespace lexlaw {
namespace {

namespace fs = std::filesystem;

const char kOnsets[] = "bdfghjklmnprstvwz";
const char kVowels[] = "aeiou";

struct Syllable {
  std::string spell;   // letters contributed to the written form
  std::string sampa;   // transcription chunk (no hyphen)
  int phonemes = 0;
};

// One CV(C) syllable. Spelling quirks (digraphs, silent doublings) make
// character counts run slightly above phoneme counts; transcription quirks
// (affricate onsets, length marks, diphthongs) exercise multi-character
// segment matching without changing the phoneme count.
Syllable make_syllable(Rng& rng) {
  Syllable s;
  char onset = kOnsets[rng.uniform_int(0, 16)];
  char vowel = kVowels[rng.uniform_int(0, 4)];
  bool has_coda = rng.next_double() < 0.5;
  char coda = has_coda ? kOnsets[rng.uniform_int(0, 16)] : '\0';

  std::string spell_onset(1, onset);
  std::string sampa_onset(1, onset);
  std::string spell_vowel(1, vowel);
  std::string sampa_vowel(1, vowel);

  if (rng.next_double() < 0.07) sampa_onset = "tS";
  if (rng.next_double() < 0.10) spell_onset += 'h';
  if (rng.next_double() < 0.15) spell_vowel += vowel;
  if (rng.next_double() < 0.08) sampa_vowel += ':';
  if (rng.next_double() < 0.03) {
    sampa_vowel = "aI";
    spell_vowel = "ai";
  }

  s.spell = spell_onset + spell_vowel;
  s.sampa = sampa_onset + sampa_vowel;
  s.phonemes = 2;
  if (has_coda) {
    s.spell += coda;
    s.sampa += coda;
    s.phonemes += 1;
  }
  return s;
}

struct WordPlan {
  std::string form;
  std::string sampa;       // syllabified, hyphen-separated
  int n_syllables = 0;
  std::int64_t f_adult = 0;
  std::int64_t f_child = 0;   // 0: absent from child speech
  std::int64_t f_ref = 0;     // 0: absent from the reference list
  std::int64_t meanings = 1;
  double meaning_noise = 1.0;  // frozen multiplier used during calibration
  bool in_polysemy = false;
  bool in_phonetics = false;
};

// Syllable count grows with rank, planting the short-means-frequent profile.
int syllable_count_for_rank(int rank, Rng& rng) {
  int base = 1 + static_cast<int>(std::floor(std::log(static_cast<double>(rank)) /
                                             std::log(7.0)));
  double u = rng.next_double();
  if (u < 0.2) base -= 1;
  else if (u < 0.4) base += 1;
  return std::clamp(base, 1, 6);
}

std::vector<WordPlan> plan_words(const SynthLanguage& cfg, Rng& rng) {
  std::vector<WordPlan> words;
  words.reserve(static_cast<std::size_t>(cfg.n_types));
  std::set<std::string> used;

  for (int rank = 1; rank <= cfg.n_types; ++rank) {
    WordPlan w;
    int target_sylls = syllable_count_for_rank(rank, rng);
    for (int attempt = 0; attempt < 64; ++attempt) {
      std::string form;
      std::string sampa;
      int phonemes = 0;
      for (int k = 0; k < target_sylls; ++k) {
        Syllable s = make_syllable(rng);
        form += s.spell;
        if (!sampa.empty()) sampa += '-';
        sampa += s.sampa;
        phonemes += s.phonemes;
      }
      if (used.insert(form).second) {
        w.form = form;
        w.sampa = sampa;
        w.n_syllables = target_sylls;
        (void)phonemes;
        break;
      }
      if (attempt == 30) target_sylls += 1;  // widen the space if crowded
    }
    if (w.form.empty()) throw std::runtime_error("synth: form space exhausted");
    if (rng.next_double() < 0.06) w.sampa = "'" + w.sampa;

    w.f_adult = std::max<std::int64_t>(
        1, std::llround(static_cast<double>(cfg.zipf_c) / rank));

    bool child_knows = rank <= (cfg.n_types * 7) / 10 || rng.next_double() < 0.05;
    if (child_knows) {
      double noise = std::exp(0.3 * rng.normal());
      w.f_child = std::max<std::int64_t>(
          1, std::llround(0.4 * static_cast<double>(w.f_adult) * noise));
    }

    if (rng.next_double() < 0.95) {
      double noise = std::exp(0.25 * rng.normal());
      w.f_ref = std::max<std::int64_t>(
          1, std::llround(static_cast<double>(w.f_adult) * noise));
    }

    w.meaning_noise = std::exp(0.5 * rng.normal());
    w.in_polysemy = rank <= 20 || rng.next_double() < 0.60;
    w.in_phonetics = rng.next_double() < 0.90;
    words.push_back(std::move(w));
  }
  return words;
}

// Meaning counts follow c * sqrt(f) with frozen multiplicative noise; c is
// tuned by bisection so the emitted lexicon's mean synset count is 1.546.
void calibrate_meanings(std::vector<WordPlan>& words) {
  const double target = 1.546;
  auto mean_for = [&](double c) {
    double sum = 0.0;
    std::int64_t n = 0;
    for (const WordPlan& w : words) {
      if (!w.in_polysemy) continue;
      double raw = c * std::sqrt(static_cast<double>(w.f_adult)) * w.meaning_noise;
      sum += static_cast<double>(std::max<std::int64_t>(1, std::llround(raw)));
      n += 1;
    }
    return sum / static_cast<double>(n);
  };
  double lo = 1e-4, hi = 50.0;
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mean_for(mid) < target) lo = mid;
    else hi = mid;
  }
  double c = 0.5 * (lo + hi);
  for (WordPlan& w : words) {
    double raw = c * std::sqrt(static_cast<double>(w.f_adult)) * w.meaning_noise;
    w.meanings = std::max<std::int64_t>(1, std::llround(raw));
  }
}

std::string decorate_token(const std::string& form, Rng& rng) {
  double u = rng.next_double();
  if (u < 0.015) return form + ".";
  if (u < 0.03) return form + ",";
  if (u < 0.04) {
    std::string t = form;
    t[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
    return t;
  }
  return form;
}

void write_transcripts(const fs::path& dir, const std::vector<WordPlan>& words,
                       Rng& rng) {
  std::vector<const std::string*> child_stream;
  std::vector<const std::string*> adult_stream;
  for (const WordPlan& w : words) {
    for (std::int64_t i = 0; i < w.f_child; ++i) child_stream.push_back(&w.form);
    for (std::int64_t i = 0; i < w.f_adult; ++i) adult_stream.push_back(&w.form);
  }
  auto shuffle = [&](std::vector<const std::string*>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  };
  shuffle(child_stream);
  shuffle(adult_stream);

  const char* kAdultCodes[] = {"MOT", "MOT", "MOT", "FAT", "FAT", "INV", "GRA"};
  std::vector<std::string> lines;
  std::size_t ci = 0, ai = 0;
  while (ci < child_stream.size() || ai < adult_stream.size()) {
    std::size_t child_left = child_stream.size() - ci;
    std::size_t adult_left = adult_stream.size() - ai;
    double p_child =
        static_cast<double>(child_left) / static_cast<double>(child_left + adult_left);
    bool child_line = rng.next_double() < p_child;
    std::vector<const std::string*>& stream = child_line ? child_stream : adult_stream;
    std::size_t& idx = child_line ? ci : ai;
    std::size_t take = std::min<std::size_t>(
        stream.size() - idx, static_cast<std::size_t>(rng.uniform_int(3, 8)));
    std::string line = child_line
                           ? std::string("*CHI:")
                           : std::string("*") + kAdultCodes[rng.uniform_int(0, 6)] + ":";
    for (std::size_t k = 0; k < take; ++k) {
      line += '\t';
      line += decorate_token(*stream[idx + k], rng);
    }
    idx += take;
    lines.push_back(std::move(line));
  }

  fs::create_directories(dir);
  const int n_files = 8;
  std::size_t per_file = (lines.size() + n_files - 1) / n_files;
  std::size_t cursor = 0;
  for (int f = 0; f < n_files && cursor < lines.size(); ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "part%02d.txt", f + 1);
    std::ofstream out(dir / name);
    out << "@Begin\n@Participants:\tCHI Child, MOT Mother, FAT Father, INV "
           "Investigator, GRA Grandparent\n";
    std::size_t end = std::min(lines.size(), cursor + per_file);
    std::size_t mid = cursor + (end - cursor) / 2;
    for (std::size_t i = cursor; i < end; ++i) {
      out << lines[i] << '\n';
      if (i == mid) {
        out << "%com:\trecording resumed after a pause\n";
        if (f == 1 || f == 4) out << "*MAL this line lost its separator\n";
      }
    }
    out << "@End\n";
    cursor = end;
  }
}

void write_polysemy(const fs::path& path, const std::vector<WordPlan>& words,
                    Rng& rng) {
  std::vector<const WordPlan*> entries;
  for (const WordPlan& w : words)
    if (w.in_polysemy) entries.push_back(&w);
  std::sort(entries.begin(), entries.end(),
            [](const WordPlan* a, const WordPlan* b) { return a->form < b->form; });

  std::ofstream out(path);
  out << "# word sense inventory (count or sense-id list per line)\n";
  for (const WordPlan* w : entries) {
    bool id_style = w->meanings <= 6 && rng.next_double() < 0.30;
    if (id_style) {
      // Occasionally split the sense ids over two lines; the union restores
      // the full count.
      bool split = w->meanings >= 2 && rng.next_double() < 0.10;
      std::int64_t cut = split ? w->meanings / 2 : w->meanings;
      out << w->form;
      for (std::int64_t k = 1; k <= cut; ++k)
        out << (k == 1 ? '\t' : ',') << "syn_" << w->form << '_' << k;
      out << '\n';
      if (split) {
        out << w->form;
        for (std::int64_t k = cut; k <= w->meanings; ++k)
          out << (k == cut ? '\t' : ',') << "syn_" << w->form << '_' << k;
        out << '\n';
      }
    } else {
      out << w->form << '\t' << w->meanings << '\n';
      if (rng.next_double() < 0.01)
        out << w->form << '\t' << std::max<std::int64_t>(1, w->meanings - 1) << '\n';
    }
  }
  out << "aardwolfish\t2\n";  // lexicon-only entry, never appears in speech
}

void write_phonetics(const fs::path& path, const std::vector<WordPlan>& words,
                     Rng& rng) {
  std::vector<const WordPlan*> entries;
  for (const WordPlan& w : words)
    if (w.in_phonetics) entries.push_back(&w);
  std::sort(entries.begin(), entries.end(),
            [](const WordPlan* a, const WordPlan* b) { return a->form < b->form; });

  std::ofstream out(path);
  out << "# pronouncing lexicon: form<TAB>syllabified transcription\n";
  for (const WordPlan* w : entries) {
    out << w->form << '\t' << w->sampa << '\n';
    if (rng.next_double() < 0.005) out << w->form << '\t' << w->sampa << '\n';
  }
  out << "brokensyl\tka--ta\n";       // empty syllable: parse warning
  out << "badbyte\tb\xC3\xA4k\n";     // non-ASCII byte: parse warning
}

void write_reference(const fs::path& path, const std::vector<WordPlan>& words,
                     Rng& rng) {
  std::vector<const WordPlan*> entries;
  for (const WordPlan& w : words)
    if (w.f_ref > 0) entries.push_back(&w);
  std::sort(entries.begin(), entries.end(),
            [](const WordPlan* a, const WordPlan* b) { return a->form < b->form; });

  std::ofstream out(path);
  for (const WordPlan* w : entries) {
    if (w->f_ref >= 2 && rng.next_double() < 0.01) {
      std::int64_t a = std::max<std::int64_t>(1, w->f_ref / 2);
      out << w->form << ' ' << a << '\n';
      out << w->form << ' ' << (w->f_ref - a) << '\n';
    } else {
      char sep = rng.next_double() < 0.1 ? '\t' : ' ';
      out << w->form << sep << w->f_ref << '\n';
    }
  }
  out << "junkline notanumber\n";  // non-numeric count: parse warning
}

void write_roles(const fs::path& path) {
  std::ofstream out(path);
  out << "# speaker code -> role\n"
      << "CHI\tchild\n"
      << "MOT\tadult\n"
      << "FAT\tadult\n"
      << "INV\tadult\n"
      << "GRA\tadult\n";
}

}  // namespace

void write_synthetic_language(const std::string& dir, const SynthLanguage& cfg) {
  fs::path root(dir);
  fs::create_directories(root);
  Rng rng(cfg.seed);
  std::vector<WordPlan> words = plan_words(cfg, rng);
  calibrate_meanings(words);
  write_transcripts(root / "transcripts", words, rng);
  write_polysemy(root / "polysemy.tsv", words, rng);
  write_phonetics(root / "phonetics.tsv", words, rng);
  write_reference(root / "reffreq.txt", words, rng);
  write_roles(root / "roles.tsv");
}

void write_bundled_corpus(const std::string& dir, std::uint64_t seed) {
  fs::path root(dir);
  fs::create_directories(root);
  Rng seeds(seed);
  SynthLanguage elva{"elva", 9000, 6000, seeds.next_u64()};
  SynthLanguage karu{"karu", 4500, 4000, seeds.next_u64()};
  SynthLanguage mosi{"mosi", 4500, 3500, seeds.next_u64()};
  for (const SynthLanguage& lang : {elva, karu, mosi})
    write_synthetic_language((root / lang.name).string(), lang);

  std::ofstream conf(root / "run.conf");
  conf << "# analysis run over the bundled corpus\n"
       << "corpus = elva\n"
       << "corpus = karu\n"
       << "corpus = mosi\n"
       << "freq = childes,reference\n"
       << "lambda = 100,500\n"
       << "significance = 0.05\n";
}

}  // namespace lexlaw
