#include "lexlaw/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace lexlaw {

using ordered_json = nlohmann::ordered_json;

const char* to_string(Role r) {
  return r == Role::Child ? "child" : "adult";
}

const char* to_string(FreqSource s) {
  return s == FreqSource::Childes ? "childes" : "reference";
}

const char* to_string(CorrMethod m) {
  switch (m) {
    case CorrMethod::Pearson: return "pearson";
    case CorrMethod::Spearman: return "spearman";
    case CorrMethod::KendallA: return "kendall_a";
    case CorrMethod::KendallB: return "kendall_b";
  }
  return "?";
}

Role role_from_string(const std::string& s) {
  if (s == "child") return Role::Child;
  if (s == "adult") return Role::Adult;
  throw InputError("unknown role '" + s + "' (expected child|adult)");
}

FreqSource freq_source_from_string(const std::string& s) {
  if (s == "childes") return FreqSource::Childes;
  if (s == "reference") return FreqSource::Reference;
  throw InputError("unknown frequency source '" + s +
                   "' (expected childes|reference)");
}

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw InputError(what);
}

void check_optional_count(const std::optional<std::int64_t>& v,
                          const char* name, const std::string& form) {
  if (v && *v < 1)
    throw InputError(std::string(name) + " < 1 for form '" + form + "'");
}

}  // namespace

WordRecord WordRecord::make(std::string form, Role role,
                            std::int64_t childes_freq,
                            std::optional<std::int64_t> reference_freq,
                            std::optional<std::int64_t> polysemy,
                            std::int64_t n_chars,
                            std::optional<std::int64_t> n_phonemes,
                            std::optional<std::int64_t> n_syllables) {
  require(!form.empty(), "empty word form");
  for (unsigned char c : form)
    require(!std::isspace(c), "whitespace in word form '" + form + "'");
  require(childes_freq >= 1, "childes_freq < 1 for form '" + form + "'");
  check_optional_count(reference_freq, "reference_freq", form);
  check_optional_count(polysemy, "polysemy", form);
  require(n_chars >= 1, "n_chars < 1 for form '" + form + "'");
  check_optional_count(n_phonemes, "n_phonemes", form);
  check_optional_count(n_syllables, "n_syllables", form);
  if (n_phonemes && n_syllables)
    require(*n_syllables <= *n_phonemes,
            "n_syllables > n_phonemes for form '" + form + "'");
  WordRecord r;
  r.form = std::move(form);
  r.role = role;
  r.childes_freq = childes_freq;
  r.reference_freq = reference_freq;
  r.polysemy = polysemy;
  r.n_chars = n_chars;
  r.n_phonemes = n_phonemes;
  r.n_syllables = n_syllables;
  return r;
}

CoverageStats CoverageStats::make(std::int64_t analyzed_types,
                                  std::int64_t total_types,
                                  std::int64_t analyzed_tokens,
                                  std::int64_t total_tokens) {
  require(analyzed_types >= 0 && total_types >= 0 && analyzed_tokens >= 0 &&
              total_tokens >= 0,
          "negative coverage count");
  require(analyzed_types <= total_types, "analyzed_types > total_types");
  require(analyzed_tokens <= total_tokens, "analyzed_tokens > total_tokens");
  CoverageStats c;
  c.analyzed_types = analyzed_types;
  c.total_types = total_types;
  c.analyzed_tokens = analyzed_tokens;
  c.total_tokens = total_tokens;
  c.type_cover = total_types == 0
                     ? 0.0
                     : static_cast<double>(analyzed_types) / total_types;
  c.token_cover = total_tokens == 0
                      ? 0.0
                      : static_cast<double>(analyzed_tokens) / total_tokens;
  return c;
}

Dataset Dataset::make(std::string language, std::vector<WordRecord> records,
                      std::map<Role, CoverageStats> coverage) {
  require(!language.empty(), "empty language label");
  std::sort(records.begin(), records.end(),
            [](const WordRecord& a, const WordRecord& b) {
              return std::tuple(static_cast<int>(a.role), a.form) <
                     std::tuple(static_cast<int>(b.role), b.form);
            });
  for (std::size_t i = 0; i + 1 < records.size(); ++i)
    require(records[i].role != records[i + 1].role ||
                records[i].form != records[i + 1].form,
            "duplicate (form, role) key '" + records[i].form + "'");
  for (const WordRecord& r : records)
    require(r.polysemy.has_value(),
            "record without polysemy retained: '" + r.form + "'");
  Dataset d;
  d.language_ = std::move(language);
  d.records_ = std::move(records);
  d.coverage_ = std::move(coverage);
  return d;
}

std::vector<const WordRecord*> Dataset::records_for(Role role) const {
  std::vector<const WordRecord*> out;
  for (const WordRecord& r : records_)
    if (r.role == role) out.push_back(&r);
  return out;
}

namespace {

ordered_json opt_to_json(const std::optional<std::int64_t>& v) {
  if (v) return *v;
  return nullptr;
}

std::optional<std::int64_t> opt_from_json(const ordered_json& j,
                                          const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::int64_t>();
}

ordered_json coverage_to_json(const CoverageStats& c) {
  ordered_json j;
  j["analyzed_types"] = c.analyzed_types;
  j["total_types"] = c.total_types;
  j["analyzed_tokens"] = c.analyzed_tokens;
  j["total_tokens"] = c.total_tokens;
  j["type_cover"] = c.type_cover;
  j["token_cover"] = c.token_cover;
  return j;
}

CoverageStats coverage_from_json(const ordered_json& j) {
  return CoverageStats::make(
      j.at("analyzed_types").get<std::int64_t>(),
      j.at("total_types").get<std::int64_t>(),
      j.at("analyzed_tokens").get<std::int64_t>(),
      j.at("total_tokens").get<std::int64_t>());
}

}  // namespace

std::string Dataset::to_json() const {
  ordered_json j;
  j["language"] = language_;
  ordered_json cov = ordered_json::object();
  for (const auto& [role, stats] : coverage_)
    cov[to_string(role)] = coverage_to_json(stats);
  j["coverage"] = cov;
  ordered_json recs = ordered_json::array();
  for (const WordRecord& r : records_) {
    ordered_json jr;
    jr["form"] = r.form;
    jr["role"] = to_string(r.role);
    jr["childes_freq"] = r.childes_freq;
    jr["reference_freq"] = opt_to_json(r.reference_freq);
    jr["polysemy"] = opt_to_json(r.polysemy);
    jr["n_chars"] = r.n_chars;
    jr["n_phonemes"] = opt_to_json(r.n_phonemes);
    jr["n_syllables"] = opt_to_json(r.n_syllables);
    recs.push_back(std::move(jr));
  }
  j["records"] = std::move(recs);
  return j.dump(2) + "\n";
}

Dataset Dataset::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw InputError(std::string("dataset JSON parse failure: ") + e.what());
  }
  try {
    std::string language = j.at("language").get<std::string>();
    std::map<Role, CoverageStats> coverage;
    for (const auto& [key, val] : j.at("coverage").items())
      coverage[role_from_string(key)] = coverage_from_json(val);
    std::vector<WordRecord> records;
    for (const ordered_json& jr : j.at("records"))
      records.push_back(WordRecord::make(
          jr.at("form").get<std::string>(),
          role_from_string(jr.at("role").get<std::string>()),
          jr.at("childes_freq").get<std::int64_t>(),
          opt_from_json(jr, "reference_freq"), opt_from_json(jr, "polysemy"),
          jr.at("n_chars").get<std::int64_t>(),
          opt_from_json(jr, "n_phonemes"), opt_from_json(jr, "n_syllables")));
    return Dataset::make(std::move(language), std::move(records),
                         std::move(coverage));
  } catch (const ordered_json::exception& e) {
    throw InputError(std::string("dataset JSON field failure: ") + e.what());
  }
}

void Dataset::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << to_json();
  if (!out) throw InputError("write failure on '" + path + "'");
}

Dataset Dataset::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace lexlaw
