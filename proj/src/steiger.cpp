#include "lexlaw/steiger.hpp"

#include <cmath>

#include "lexlaw/stats.hpp"

namespace lexlaw {

const char* to_string(LengthVar v) {
  switch (v) {
    case LengthVar::Chars: return "n_chars";
    case LengthVar::Phonemes: return "n_phonemes";
    case LengthVar::Syllables: return "n_syllables";
  }
  return "?";
}

const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::GtSig: return ">*";
    case Relation::LtSig: return "<*";
    case Relation::GtNs: return ">";
    case Relation::LtNs: return "<";
  }
  return "?";
}

SteigerStat steiger_test(double r12, double r13, double r23, std::int64_t n) {
  if (n < 4) throw InputError("steiger_test needs n >= 4");
  for (double r : {r12, r13, r23})
    if (!(std::fabs(r) <= 1.0)) throw InputError("correlation outside [-1, 1]");
  if (r12 == r13) return {0.0, 1.0};

  // Symmetric grouping: swapping r12 and r13 leaves every intermediate
  // bit-identical, so t is exactly antisymmetric in the two correlations.
  double det = 1.0 - (r12 * r12 + r13 * r13) - r23 * r23 +
               2.0 * (r12 * r13) * r23;
  if (det < -1e-12) throw NumericError("correlation matrix not PSD");
  if (det < 0.0) det = 0.0;

  double nn = static_cast<double>(n);
  double rbar = (r12 + r13) / 2.0;
  double one_m = 1.0 - r23;
  double denom = 2.0 * ((nn - 1.0) / (nn - 3.0)) * det +
                 rbar * rbar * one_m * one_m * one_m;
  if (denom <= 0.0) throw NumericError("degenerate denominator in Williams T2");
  double t = (r12 - r13) * std::sqrt((nn - 1.0) * (1.0 + r23) / denom);
  return {t, student_t_two_sided_p(t, nn - 3.0)};
}

namespace {

std::optional<std::int64_t> length_value(const WordRecord& r, LengthVar v) {
  switch (v) {
    case LengthVar::Chars: return r.n_chars;
    case LengthVar::Phonemes: return r.n_phonemes;
    case LengthVar::Syllables: return r.n_syllables;
  }
  return std::nullopt;
}

struct Triple {
  std::vector<double> f, a, b;
};

// Records of `role` with the source frequency and both length variables.
Triple filtered_triple(const Dataset& ds, Role role, FreqSource src,
                       LengthVar l1, LengthVar l2) {
  Triple t;
  for (const WordRecord& r : ds.records()) {
    if (r.role != role) continue;
    double freq;
    if (src == FreqSource::Childes) {
      freq = static_cast<double>(r.childes_freq);
    } else {
      if (!r.reference_freq) continue;
      freq = static_cast<double>(*r.reference_freq);
    }
    auto va = length_value(r, l1);
    auto vb = length_value(r, l2);
    if (!va || !vb) continue;
    t.f.push_back(freq);
    t.a.push_back(static_cast<double>(*va));
    t.b.push_back(static_cast<double>(*vb));
  }
  return t;
}

double plain_corr(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(x, y).coefficient;
}

Relation classify(double r_fl1, double r_fl2, double p, double alpha) {
  bool gt = std::fabs(r_fl1) > std::fabs(r_fl2);
  bool sig = p < alpha;
  if (gt) return sig ? Relation::GtSig : Relation::GtNs;
  return sig ? Relation::LtSig : Relation::LtNs;
}

}  // namespace

std::optional<SteigerResult> compare_lengths(const Dataset& ds, Role role,
                                             FreqSource src, CorrMethod kind,
                                             LengthVar l1, LengthVar l2,
                                             double alpha) {
  if (kind != CorrMethod::Pearson && kind != CorrMethod::Spearman)
    throw InputError(
        "dependent-correlation test is defined for Pearson and Spearman only");
  if (l1 == l2) throw InputError("length variables must differ");

  Triple t = filtered_triple(ds, role, src, l1, l2);
  std::int64_t n = static_cast<std::int64_t>(t.f.size());
  if (n < 4) return std::nullopt;

  if (kind == CorrMethod::Spearman) {
    t.f = midranks(t.f);
    t.a = midranks(t.a);
    t.b = midranks(t.b);
  }

  SteigerResult res;
  res.n = n;
  try {
    res.r_fl1 = plain_corr(t.f, t.a);
    res.r_fl2 = plain_corr(t.f, t.b);
    res.r_l1l2 = plain_corr(t.a, t.b);
    SteigerStat st = steiger_test(res.r_fl1, res.r_fl2, res.r_l1l2, n);
    res.t = st.t;
    res.p = st.p;
  } catch (const NumericError&) {
    return std::nullopt;
  }
  res.relation = classify(res.r_fl1, res.r_fl2, res.p, alpha);
  return res;
}

std::vector<SteigerCell> steiger_table(const Dataset& ds, double alpha) {
  static constexpr std::pair<LengthVar, LengthVar> kPairs[] = {
      {LengthVar::Chars, LengthVar::Phonemes},
      {LengthVar::Chars, LengthVar::Syllables},
      {LengthVar::Phonemes, LengthVar::Syllables}};
  std::vector<SteigerCell> cells;
  for (Role role : {Role::Child, Role::Adult}) {
    for (FreqSource src : {FreqSource::Childes, FreqSource::Reference}) {
      for (CorrMethod kind : {CorrMethod::Pearson, CorrMethod::Spearman,
                              CorrMethod::KendallB}) {
        for (auto [l1, l2] : kPairs) {
          SteigerCell cell;
          cell.role = role;
          cell.source = src;
          cell.kind = kind;
          cell.l1 = l1;
          cell.l2 = l2;
          if (kind == CorrMethod::KendallB) {
            Triple t = filtered_triple(ds, role, src, l1, l2);
            cell.n = static_cast<std::int64_t>(t.f.size());
            if (cell.n >= 3) {
              try {
                double t1 =
                    kendall(t.f, t.a, KendallVariant::B).coefficient;
                double t2 =
                    kendall(t.f, t.b, KendallVariant::B).coefficient;
                cell.tau1 = t1;
                cell.tau2 = t2;
                // Convention: Kendall rows are never starred.
                cell.symbol = std::fabs(t1) > std::fabs(t2) ? ">" : "<";
              } catch (const NumericError&) {
              }
            }
          } else {
            cell.res = compare_lengths(ds, role, src, kind, l1, l2, alpha);
            if (cell.res) {
              cell.n = cell.res->n;
              cell.symbol = relation_symbol(cell.res->relation);
            }
          }
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

}  // namespace lexlaw
