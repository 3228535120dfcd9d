#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "lexlaw/common.hpp"
#include "lexlaw/stats.hpp"
#include "lexlaw/steiger.hpp"
#include "oracles.hpp"

using namespace lexlaw;

namespace {

// Correlation triple from a random point cloud: sample correlation matrices
// are positive semidefinite by construction.
struct Triple {
  double r12, r13, r23;
};

Triple random_psd_triple(Rng& rng, std::int64_t pts) {
  std::vector<double> a(static_cast<std::size_t>(pts)), b(a.size()), c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double base = rng.normal();
    a[i] = base + 0.8 * rng.normal();
    b[i] = 0.5 * base + rng.normal();
    c[i] = -0.3 * base + rng.normal();
  }
  return {oracle::pearson_r(a, b), oracle::pearson_r(a, c),
          oracle::pearson_r(b, c)};
}

// A dataset engineered so frequency tracks chars tightly and phonemes
// loosely, with enough records for every kind of cell.
Dataset steiger_dataset(std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<WordRecord> records;
  for (std::int64_t i = 1; i <= n; ++i) {
    double base = static_cast<double>(i);
    std::int64_t chars = 1 + (i - 1) % 9;
    std::int64_t phonemes =
        std::max<std::int64_t>(2, chars + rng.uniform_int(-1, 4));
    std::int64_t syllables =
        std::max<std::int64_t>(1, std::min(phonemes, 1 + rng.uniform_int(0, 2)));
    std::int64_t freq = std::max<std::int64_t>(
        1, 200 - 18 * chars + rng.uniform_int(0, 20) + static_cast<std::int64_t>(base) % 3);
    char name[16];
    std::snprintf(name, sizeof(name), "w%05lld", static_cast<long long>(i));
    for (Role role : {Role::Child, Role::Adult})
      records.push_back(WordRecord::make(name, role, freq, freq + 5, 1 + i % 4,
                                         chars, phonemes, syllables));
  }
  std::map<Role, CoverageStats> cov;
  cov[Role::Child] = CoverageStats::make(n, n, n, n);
  cov[Role::Adult] = CoverageStats::make(n, n, n, n);
  return Dataset::make("steigerland", std::move(records), std::move(cov));
}

}  // namespace

TEST_CASE("steiger_test: exact special cases") {
  // Equal correlations short-circuit to t = 0 exactly, p = 1.
  SteigerStat eq = steiger_test(0.4, 0.4, 0.3, 100);
  CHECK(eq.t == 0.0);
  CHECK(eq.p == 1.0);
  // ... which also covers the r23 -> 1 degeneracy.
  SteigerStat deg = steiger_test(0.5, 0.5, 1.0, 50);
  CHECK(deg.t == 0.0);
  CHECK(deg.p == 1.0);

  // Antisymmetry holds bit-for-bit: swapping r12 and r13 flips the sign.
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    Triple tr = random_psd_triple(rng, 40);
    SteigerStat ab = steiger_test(tr.r12, tr.r13, tr.r23, 40);
    SteigerStat ba = steiger_test(tr.r13, tr.r12, tr.r23, 40);
    CHECK(ab.t == -ba.t);
    CHECK(ab.p == ba.p);
  }
}

TEST_CASE("steiger_test: input validation") {
  CHECK_THROWS_AS(steiger_test(0.1, 0.2, 0.3, 3), InputError);   // n < 4
  CHECK_THROWS_AS(steiger_test(1.2, 0.2, 0.3, 10), InputError);  // |r| > 1
  CHECK_THROWS_AS(steiger_test(0.1, -1.5, 0.3, 10), InputError);
  // Non-PSD correlation matrix: determinant clearly negative. (r12 must
  // differ from r13, or the equal-correlation short-circuit answers first.)
  CHECK_THROWS_AS(steiger_test(0.9, 0.8, -0.9, 10), NumericError);
}

TEST_CASE("steiger_test: 50-digit oracle agreement on 100 PSD triples") {
  Rng rng(1234);
  int checked = 0;
  while (checked < 100) {
    std::int64_t n = rng.uniform_int(10, 400);
    Triple tr = random_psd_triple(rng, n);
    if (tr.r12 == tr.r13) continue;
    SteigerStat got = steiger_test(tr.r12, tr.r13, tr.r23, n);
    oracle::WilliamsMp want = oracle::williams_mp(tr.r12, tr.r13, tr.r23, n);
    CHECK(std::fabs(got.t - static_cast<double>(want.t)) < 1e-10);
    CHECK(std::fabs(got.p - static_cast<double>(want.p)) < 1e-10);
    checked += 1;
  }
}

TEST_CASE("relation_symbol covers all four branches") {
  CHECK(std::string(relation_symbol(Relation::GtSig)) == ">*");
  CHECK(std::string(relation_symbol(Relation::LtSig)) == "<*");
  CHECK(std::string(relation_symbol(Relation::GtNs)) == ">");
  CHECK(std::string(relation_symbol(Relation::LtNs)) == "<");
}

TEST_CASE("compare_lengths: filtering, kinds, and classification") {
  Dataset ds = steiger_dataset(300, 99);

  std::optional<SteigerResult> pearson_cmp =
      compare_lengths(ds, Role::Child, FreqSource::Childes, CorrMethod::Pearson,
                      LengthVar::Chars, LengthVar::Phonemes);
  REQUIRE(pearson_cmp.has_value());
  CHECK(pearson_cmp->n == 300);
  // Frequency was built from chars, so |r(f, chars)| > |r(f, phonemes)|
  // and the comparison lands significant on this sample size.
  CHECK(std::fabs(pearson_cmp->r_fl1) > std::fabs(pearson_cmp->r_fl2));
  CHECK(pearson_cmp->relation == Relation::GtSig);
  CHECK(pearson_cmp->p < 0.05);

  // Spearman kind: the three correlations are Pearson on mid-ranks.
  std::optional<SteigerResult> spearman_cmp =
      compare_lengths(ds, Role::Child, FreqSource::Childes,
                      CorrMethod::Spearman, LengthVar::Chars,
                      LengthVar::Phonemes);
  REQUIRE(spearman_cmp.has_value());
  auto [fx, c1] = paired_values(ds, Role::Child, FreqSource::Childes,
                                Companion::Chars);
  auto [fx2, c2] = paired_values(ds, Role::Child, FreqSource::Childes,
                                 Companion::Phonemes);
  CHECK(spearman_cmp->r_fl1 ==
        doctest::Approx(pearson(midranks(fx), midranks(c1)).coefficient)
            .epsilon(1e-12));
  CHECK(spearman_cmp->r_fl2 ==
        doctest::Approx(pearson(midranks(fx2), midranks(c2)).coefficient)
            .epsilon(1e-12));

  // The Williams statistic matches a direct evaluation of the same triple.
  SteigerStat direct =
      steiger_test(pearson_cmp->r_fl1, pearson_cmp->r_fl2,
                   pearson_cmp->r_l1l2, pearson_cmp->n);
  CHECK(pearson_cmp->t == direct.t);
  CHECK(pearson_cmp->p == direct.p);

  // Kendall kinds are rejected: the test is undefined for tau.
  CHECK_THROWS_AS(compare_lengths(ds, Role::Child, FreqSource::Childes,
                                  CorrMethod::KendallB, LengthVar::Chars,
                                  LengthVar::Phonemes),
                  InputError);

  // Too few complete records -> nullopt.
  Dataset small = steiger_dataset(3, 5);
  CHECK(!compare_lengths(small, Role::Child, FreqSource::Childes,
                         CorrMethod::Pearson, LengthVar::Chars,
                         LengthVar::Phonemes)
             .has_value());
}

TEST_CASE("steiger_table: 36 cells in fixed order") {
  Dataset ds = steiger_dataset(120, 42);
  std::vector<SteigerCell> cells = steiger_table(ds);
  REQUIRE(cells.size() == 36);  // 2 roles x 2 sources x 3 kinds x 3 pairs

  // Ordering: role, source, kind, pair.
  CHECK(cells[0].role == Role::Child);
  CHECK(cells[0].source == FreqSource::Childes);
  CHECK(cells[0].kind == CorrMethod::Pearson);
  CHECK(cells[0].l1 == LengthVar::Chars);
  CHECK(cells[0].l2 == LengthVar::Phonemes);
  CHECK(cells[1].l1 == LengthVar::Chars);
  CHECK(cells[1].l2 == LengthVar::Syllables);
  CHECK(cells[2].l1 == LengthVar::Phonemes);
  CHECK(cells[2].l2 == LengthVar::Syllables);
  CHECK(cells[3].kind == CorrMethod::Spearman);
  CHECK(cells[6].kind == CorrMethod::KendallB);
  CHECK(cells[18].role == Role::Adult);

  for (const SteigerCell& c : cells) {
    if (c.kind == CorrMethod::KendallB) {
      // Kendall cells: |tau| comparison, never starred.
      CHECK((c.symbol == ">" || c.symbol == "<" || c.symbol.empty()));
      if (!c.symbol.empty()) {
        REQUIRE(c.tau1.has_value());
        REQUIRE(c.tau2.has_value());
        bool gt = std::fabs(*c.tau1) > std::fabs(*c.tau2);
        CHECK(c.symbol == (gt ? ">" : "<"));
      }
    } else if (c.res) {
      // Symbol agrees with the analytic relation.
      CHECK(c.symbol == relation_symbol(c.res->relation));
    } else {
      CHECK(c.symbol.empty());
    }
  }
}
