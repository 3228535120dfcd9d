#include "lexlaw/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace lexlaw {

namespace {

bool is_ascii_alnum(unsigned char c) {
  return std::isalnum(c) != 0 && c < 0x80;
}

// UTF-8 sequence length from the lead byte; 1 for ASCII and invalid leads.
std::size_t seq_len(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c & 0xE0) == 0xC0) return 2;
  if ((c & 0xF0) == 0xE0) return 3;
  if ((c & 0xF8) == 0xF0) return 4;
  return 1;
}

}  // namespace

std::string normalize_word(const std::string& raw) {
  std::string s;
  s.reserve(raw.size());
  // Lowercase ASCII and the Latin-1 letter block C0..DE (0xC3 0x80..0x9E),
  // skipping the multiplication sign 0xC3 0x97.
  for (std::size_t i = 0; i < raw.size();) {
    unsigned char c = raw[i];
    if (c < 0x80) {
      s.push_back(static_cast<char>(std::tolower(c)));
      ++i;
    } else if (c == 0xC3 && i + 1 < raw.size()) {
      unsigned char d = raw[i + 1];
      if (d >= 0x80 && d <= 0x9E && d != 0x97) d += 0x20;
      s.push_back(static_cast<char>(c));
      s.push_back(static_cast<char>(d));
      i += 2;
    } else {
      std::size_t len = std::min(seq_len(c), raw.size() - i);
      s.append(raw, i, len);
      i += len;
    }
  }
  // Strip leading/trailing ASCII non-alphanumerics; multibyte edges stay.
  std::size_t b = 0, e = s.size();
  while (b < e) {
    unsigned char c = s[b];
    if (c >= 0x80 || is_ascii_alnum(c)) break;
    ++b;
  }
  while (e > b) {
    unsigned char c = s[e - 1];
    if (c >= 0x80) break;  // never split a multibyte sequence
    if (is_ascii_alnum(c)) break;
    --e;
  }
  return s.substr(b, e - b);
}

std::int64_t char_length(const std::string& form) {
  std::int64_t count = 0;
  for (std::size_t i = 0; i < form.size();) {
    unsigned char c = form[i];
    std::size_t len = std::min(seq_len(c), form.size() - i);
    if (c < 0x80) {
      if (std::isalpha(c)) ++count;
    } else if (c == 0xC3 && len == 2) {
      unsigned char d = form[i + 1];
      if (d != 0x97 && d != 0xB7) ++count;  // Latin-1 letters, not times/divide
    } else if ((c == 0xC4 || c == 0xC5) && len == 2) {
      ++count;  // Latin Extended-A
    }
    i += len;
  }
  return count;
}

std::map<std::string, Role> default_role_map() {
  return {{"CHI", Role::Child},
          {"MOT", Role::Adult},
          {"FAT", Role::Adult},
          {"INV", Role::Adult}};
}

std::map<std::string, Role> load_role_map(const std::string& path,
                                          WarningList& warnings) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read role map '" + path + "'");
  std::map<std::string, Role> m;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      warnings.push_back({path, lineno, "role map line without tab"});
      continue;
    }
    std::string code = line.substr(0, tab);
    std::string role = line.substr(tab + 1);
    if (!role.empty() && role.back() == '\r') role.pop_back();
    if (role == "child")
      m[code] = Role::Child;
    else if (role == "adult")
      m[code] = Role::Adult;
    else
      warnings.push_back({path, lineno, "unknown role '" + role + "'"});
  }
  return m;
}

void parse_transcripts(std::istream& in,
                       const std::map<std::string, Role>& role_map,
                       FreqTables& acc, WarningList& warnings,
                       const std::string& filename) {
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] != '*') continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) {
      warnings.push_back({filename, lineno, "utterance line without colon"});
      continue;
    }
    std::string code = line.substr(1, colon - 1);
    while (!code.empty() && code.back() == ' ') code.pop_back();
    auto it = role_map.find(code);
    Role role = (it != role_map.end()) ? it->second : Role::Adult;
    auto& table = acc.for_role(role);

    std::istringstream toks(line.substr(colon + 1));
    std::string tok;
    while (toks >> tok) {
      std::string form = normalize_word(tok);
      if (form.empty()) continue;
      ++table[form];
    }
  }
}

void parse_transcript_dir(const std::string& dir,
                          const std::map<std::string, Role>& role_map,
                          FreqTables& acc, WarningList& warnings) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw InputError("transcript directory not found: '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  if (files.empty()) throw InputError("no transcript files in '" + dir + "'");
  std::sort(files.begin(), files.end());
  for (const fs::path& p : files) {
    std::ifstream in(p);
    if (!in) throw InputError("cannot read transcript '" + p.string() + "'");
    parse_transcripts(in, role_map, acc, warnings, p.string());
  }
}

SampaTable SampaTable::defaults() {
  SampaTable t;
  t.segments = {"tS", "dZ", "ts", "dz", "pf", "kv", "aI", "aU",
                "OI", "eI", "oU", "@U", "EI", "l=", "m=", "n="};
  t.marks = "'\"%:";
  return t;
}

SampaTable SampaTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read symbol table '" + path + "'");
  SampaTable t;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw InputError("symbol table line " + std::to_string(lineno) +
                       " has no tab");
    std::string sym = line.substr(0, tab);
    std::string kind = line.substr(tab + 1);
    if (kind == "segment") {
      t.segments.push_back(sym);
    } else if (kind == "mark") {
      if (sym.size() != 1)
        throw InputError("mark '" + sym + "' must be a single character");
      t.marks += sym;
    } else {
      throw InputError("unknown symbol kind '" + kind + "' at line " +
                       std::to_string(lineno));
    }
  }
  return t;
}

PhoneticEntry analyze_sampa(const std::string& s, const SampaTable& table) {
  // Longest candidates first so greedy matching is well defined.
  std::vector<const std::string*> segs;
  for (const std::string& seg : table.segments) segs.push_back(&seg);
  std::sort(segs.begin(), segs.end(),
            [](const std::string* a, const std::string* b) {
              if (a->size() != b->size()) return a->size() > b->size();
              return *a < *b;
            });

  PhoneticEntry entry;
  std::int64_t syllable_segments = 0;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    if (pos == s.size() || s[pos] == '-') {
      if (syllable_segments == 0)
        throw InputError("empty syllable at byte offset " +
                         std::to_string(pos));
      ++entry.syllable_count;
      syllable_segments = 0;
      if (pos == s.size()) break;
      ++pos;
      continue;
    }
    unsigned char c = s[pos];
    if (table.marks.find(static_cast<char>(c)) != std::string::npos) {
      ++pos;
      continue;
    }
    if (c >= 0x80 || c <= 0x20 || c == 0x7F)
      throw InputError("untokenizable SAMPA at byte offset " +
                       std::to_string(pos));
    bool matched = false;
    for (const std::string* seg : segs) {
      if (s.compare(pos, seg->size(), *seg) == 0) {
        pos += seg->size();
        matched = true;
        break;
      }
    }
    if (!matched) ++pos;  // single-character segment
    ++entry.phoneme_count;
    ++syllable_segments;
  }
  return entry;
}

std::map<std::string, PhoneticEntry> load_phonetic_lexicon(
    const std::string& path, const SampaTable& table, WarningList& warnings) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read phonetic lexicon '" + path + "'");
  std::map<std::string, PhoneticEntry> m;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      warnings.push_back({path, lineno, "line without tab"});
      continue;
    }
    std::string form = normalize_word(line.substr(0, tab));
    if (form.empty()) {
      warnings.push_back({path, lineno, "empty form"});
      continue;
    }
    try {
      PhoneticEntry e = analyze_sampa(line.substr(tab + 1), table);
      auto [it, inserted] = m.emplace(form, e);
      if (!inserted)
        warnings.push_back({path, lineno, "duplicate form '" + form +
                                              "' (first entry kept)"});
    } catch (const InputError& e) {
      warnings.push_back({path, lineno,
                          "rejected '" + form + "': " + e.what()});
    }
  }
  return m;
}

std::map<std::string, std::int64_t> load_polysemy_lexicon(
    const std::string& path, WarningList& warnings) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read polysemy lexicon '" + path + "'");
  std::map<std::string, std::int64_t> counts;
  std::map<std::string, std::set<std::string>> ids;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      warnings.push_back({path, lineno, "line without tab"});
      continue;
    }
    std::string form = normalize_word(line.substr(0, tab));
    std::string field = line.substr(tab + 1);
    if (form.empty()) {
      warnings.push_back({path, lineno, "empty form"});
      continue;
    }
    bool numeric = !field.empty() &&
                   std::all_of(field.begin(), field.end(), [](unsigned char c) {
                     return std::isdigit(c) != 0;
                   });
    if (numeric) {
      std::int64_t v = 0;
      try {
        v = std::stoll(field);
      } catch (const std::exception&) {
        warnings.push_back({path, lineno, "unparsable count"});
        continue;
      }
      if (v < 1) {
        warnings.push_back({path, lineno, "count < 1 rejected"});
        continue;
      }
      auto it = counts.find(form);
      if (it == counts.end())
        counts[form] = v;
      else
        it->second = std::max(it->second, v);  // duplicate: max of counts
    } else {
      std::set<std::string>& bucket = ids[form];
      std::size_t start = 0;
      while (start <= field.size()) {
        auto comma = field.find(',', start);
        std::string id = field.substr(
            start, comma == std::string::npos ? std::string::npos
                                              : comma - start);
        if (!id.empty()) bucket.insert(id);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (bucket.empty()) {
        warnings.push_back({path, lineno, "no synset ids"});
        ids.erase(form);
      }
    }
  }
  std::map<std::string, std::int64_t> out = std::move(counts);
  for (const auto& [form, bucket] : ids) {
    std::int64_t v = static_cast<std::int64_t>(bucket.size());
    auto it = out.find(form);
    if (it == out.end())
      out[form] = v;
    else
      it->second = std::max(it->second, v);
  }
  return out;
}

std::map<std::string, std::int64_t> load_reference_frequencies(
    const std::string& path, WarningList& warnings) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read reference frequencies '" + path + "'");
  std::map<std::string, std::int64_t> m;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto sep = line.find_first_of(" \t");
    if (sep == std::string::npos) {
      warnings.push_back({path, lineno, "line without separator"});
      continue;
    }
    std::string form = normalize_word(line.substr(0, sep));
    std::string field = line.substr(sep + 1);
    if (form.empty()) {
      warnings.push_back({path, lineno, "empty form"});
      continue;
    }
    bool numeric = !field.empty() &&
                   std::all_of(field.begin(), field.end(), [](unsigned char c) {
                     return std::isdigit(c) != 0;
                   });
    if (!numeric) {
      warnings.push_back({path, lineno, "non-numeric count rejected"});
      continue;
    }
    std::int64_t v = 0;
    try {
      v = std::stoll(field);
    } catch (const std::exception&) {
      warnings.push_back({path, lineno, "unparsable count"});
      continue;
    }
    if (v < 1) {
      warnings.push_back({path, lineno, "count < 1 rejected"});
      continue;
    }
    m[form] += v;  // later duplicates sum
  }
  return m;
}

Dataset join_dataset(const std::string& language, const FreqTables& freqs,
                     const std::map<std::string, std::int64_t>& polysemy,
                     const std::map<std::string, PhoneticEntry>& phonetics,
                     const std::map<std::string, std::int64_t>& reference,
                     WarningList& warnings) {
  std::vector<WordRecord> records;
  std::map<Role, CoverageStats> coverage;
  for (Role role : {Role::Child, Role::Adult}) {
    const auto& table = freqs.for_role(role);
    std::int64_t total_types = static_cast<std::int64_t>(table.size());
    std::int64_t total_tokens = 0, analyzed_types = 0, analyzed_tokens = 0;
    for (const auto& [form, count] : table) {
      total_tokens += count;
      auto pit = polysemy.find(form);
      if (pit == polysemy.end()) continue;  // not in the meaning lexicon
      std::int64_t nch = char_length(form);
      if (nch < 1) {
        warnings.push_back(
            {"", 0, "form '" + form + "' has no countable characters; excluded"});
        continue;
      }
      std::optional<std::int64_t> ref;
      if (auto rit = reference.find(form); rit != reference.end())
        ref = rit->second;
      std::optional<std::int64_t> nph, nsy;
      if (auto fit = phonetics.find(form); fit != phonetics.end()) {
        nph = fit->second.phoneme_count;
        nsy = fit->second.syllable_count;
      }
      records.push_back(WordRecord::make(form, role, count, ref, pit->second,
                                         nch, nph, nsy));
      ++analyzed_types;
      analyzed_tokens += count;
    }
    coverage[role] = CoverageStats::make(analyzed_types, total_types,
                                         analyzed_tokens, total_tokens);
  }
  if (records.empty()) throw InputError("no analyzable records after join");
  return Dataset::make(language, std::move(records), std::move(coverage));
}

Dataset ingest_dataset(const IngestInputs& in, WarningList& warnings) {
  std::map<std::string, Role> role_map =
      in.role_map_path.empty() ? default_role_map()
                               : load_role_map(in.role_map_path, warnings);
  SampaTable table = in.symbols_path.empty() ? SampaTable::defaults()
                                             : SampaTable::load(in.symbols_path);
  FreqTables freqs;
  parse_transcript_dir(in.transcripts_dir, role_map, freqs, warnings);
  auto polysemy = load_polysemy_lexicon(in.polysemy_path, warnings);
  auto phonetics = load_phonetic_lexicon(in.phonetics_path, table, warnings);
  std::map<std::string, std::int64_t> reference;
  if (!in.ref_freq_path.empty())
    reference = load_reference_frequencies(in.ref_freq_path, warnings);
  return join_dataset(in.language, freqs, polysemy, phonetics, reference,
                      warnings);
}

}  // namespace lexlaw
