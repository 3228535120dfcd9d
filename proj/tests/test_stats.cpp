#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lexlaw/common.hpp"
#include "lexlaw/stats.hpp"
#include "oracles.hpp"

using namespace lexlaw;

namespace {

// Random vector with a controllable tie propensity: support size 2..huge.
std::vector<double> random_column(Rng& rng, std::int64_t n, std::int64_t support) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = static_cast<double>(rng.uniform_int(1, support));
  return v;
}

Dataset battery_dataset() {
  std::vector<WordRecord> records;
  // Child: 5 complete records; one lacking phonemes; one lacking reference.
  records.push_back(WordRecord::make("aa", Role::Child, 50, 100, 6, 2, 2, 1));
  records.push_back(WordRecord::make("bb", Role::Child, 30, 60, 4, 3, 3, 1));
  records.push_back(WordRecord::make("cc", Role::Child, 20, 45, 3, 4, 4, 2));
  records.push_back(WordRecord::make("dd", Role::Child, 10, 22, 2, 5, 5, 2));
  records.push_back(WordRecord::make("ee", Role::Child, 5, 11, 1, 6, 6, 3));
  records.push_back(WordRecord::make("ff", Role::Child, 4, 9, 1, 7,
                                     std::nullopt, std::nullopt));
  records.push_back(WordRecord::make("gg", Role::Child, 3, std::nullopt, 1, 8, 8, 4));
  // Adult: only two records, below the n >= 3 floor.
  records.push_back(WordRecord::make("aa", Role::Adult, 60, 110, 6, 2, 2, 1));
  records.push_back(WordRecord::make("bb", Role::Adult, 25, 50, 3, 3, 3, 1));
  std::map<Role, CoverageStats> cov;
  cov[Role::Child] = CoverageStats::make(7, 7, 122, 122);
  cov[Role::Adult] = CoverageStats::make(2, 2, 85, 85);
  return Dataset::make("battery", std::move(records), std::move(cov));
}

}  // namespace

TEST_CASE("midranks: worked examples") {
  CHECK(midranks({10, 20, 20, 30}) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
  CHECK(midranks({5, 5, 5}) == std::vector<double>{2.0, 2.0, 2.0});
  CHECK(midranks({3, 1, 2}) == std::vector<double>{3.0, 1.0, 2.0});
  CHECK(midranks({}) == std::vector<double>{});
}

TEST_CASE("midranks: counting oracle on random tied data") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::int64_t n = rng.uniform_int(1, 60);
    std::vector<double> x = random_column(rng, n, rng.uniform_int(2, 12));
    std::vector<double> got = midranks(x);
    std::vector<double> want = oracle::midranks(x);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == want[i]);
  }
}

TEST_CASE("count_pairs equals brute force; tau_A identity exact") {
  Rng rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    std::int64_t n = rng.uniform_int(2, 200);
    std::int64_t support = trial % 3 == 0 ? 1000000 : rng.uniform_int(2, 10);
    std::vector<double> x = random_column(rng, n, support);
    std::vector<double> y = random_column(rng, n, support);
    PairCounts fast = count_pairs(x, y);
    PairCounts brute = count_pairs_brute(x, y);
    REQUIRE(fast.n == brute.n);
    REQUIRE(fast.nc == brute.nc);
    REQUIRE(fast.nd == brute.nd);
    REQUIRE(fast.nt == brute.nt);
    // Partition: every pair is concordant, discordant, or tied.
    CHECK(fast.nc + fast.nd + fast.nt == fast.total());
    // tau_A = -1 + upsilon + 2 Nc / C(n,2), exactly, as integers:
    // Nc - Nd == -P + Nt + 2 Nc.
    CHECK(fast.nc - fast.nd == -fast.total() + fast.nt + 2 * fast.nc);
  }
}

TEST_CASE("tie_stats: upsilon and lower bounds") {
  Rng rng(33);
  for (int trial = 0; trial < 2000; ++trial) {
    std::int64_t n = rng.uniform_int(2, 80);
    // Planted tie fraction from near-zero to heavy.
    std::int64_t support = rng.uniform_int(1, 40);
    std::vector<double> x = random_column(rng, n, support);
    std::vector<double> y = random_column(rng, n, support);
    PairCounts pc = count_pairs(x, y);
    TieStats ts = tie_stats(pc);
    CHECK(ts.upsilon ==
          static_cast<double>(pc.nt) / static_cast<double>(pc.total()));
    CHECK(ts.tau_lower_bound == ts.upsilon - 1.0);
    CHECK(ts.rho_lower_bound ==
          std::max(1.5 * ts.upsilon - 1.0, ts.upsilon * ts.upsilon / 2.0) - 1.0);

    double tau_a = static_cast<double>(pc.nc - pc.nd) /
                   static_cast<double>(pc.total());
    CHECK(tau_a >= ts.tau_lower_bound - 1e-15);
    bool x_const = std::all_of(x.begin(), x.end(),
                               [&](double v) { return v == x[0]; });
    bool y_const = std::all_of(y.begin(), y.end(),
                               [&](double v) { return v == y[0]; });
    if (n >= 3 && !x_const && !y_const) {
      CorrelationResult rho = spearman(x, y);
      CHECK(rho.coefficient >= ts.rho_lower_bound - 1e-12);
    }
  }
}

TEST_CASE("pearson: oracle agreement and error contract") {
  Rng rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    std::int64_t n = rng.uniform_int(3, 300);
    std::vector<double> x(static_cast<std::size_t>(n)), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.uniform(-5, 5);
      y[i] = 0.6 * x[i] + rng.normal();
    }
    CorrelationResult r = pearson(x, y);
    double want_r = oracle::pearson_r(x, y);
    CHECK(r.coefficient == doctest::Approx(want_r).epsilon(1e-12));
    CHECK(r.statistic ==
          doctest::Approx(oracle::pearson_t(want_r, n)).epsilon(1e-12));
    CHECK(r.n == n);
    CHECK(r.method == CorrMethod::Pearson);
    CHECK(r.p_value == student_t_two_sided_p(r.statistic,
                                             static_cast<double>(n - 2)));
  }
  CHECK_THROWS_AS(pearson({1, 2}, {3, 4}), InputError);
  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), NumericError);
  // Perfect correlation: |r| = 1, p = 0.
  CorrelationResult perfect = pearson({1, 2, 3, 4}, {2, 4, 6, 8});
  CHECK(perfect.coefficient == doctest::Approx(1.0));
  CHECK(perfect.p_value == 0.0);
}

TEST_CASE("spearman is pearson of mid-ranks, identically") {
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    std::int64_t n = rng.uniform_int(3, 120);
    std::vector<double> x = random_column(rng, n, rng.uniform_int(2, 20));
    std::vector<double> y = random_column(rng, n, rng.uniform_int(2, 20));
    bool x_const = std::all_of(x.begin(), x.end(),
                               [&](double v) { return v == x[0]; });
    bool y_const = std::all_of(y.begin(), y.end(),
                               [&](double v) { return v == y[0]; });
    if (x_const || y_const) continue;
    CorrelationResult s = spearman(x, y);
    CorrelationResult p = pearson(midranks(x), midranks(y));
    // Identical, not merely close: the same arithmetic must run.
    CHECK(s.coefficient == p.coefficient);
    CHECK(s.statistic == p.statistic);
    CHECK(s.p_value == p.p_value);
    CHECK(s.method == CorrMethod::Spearman);
  }
}

TEST_CASE("kendall: oracle agreement on random tied data") {
  Rng rng(66);
  for (int trial = 0; trial < 150; ++trial) {
    std::int64_t n = rng.uniform_int(3, 150);
    std::vector<double> x = random_column(rng, n, rng.uniform_int(2, 15));
    std::vector<double> y = random_column(rng, n, rng.uniform_int(2, 15));
    bool x_const = std::all_of(x.begin(), x.end(),
                               [&](double v) { return v == x[0]; });
    bool y_const = std::all_of(y.begin(), y.end(),
                               [&](double v) { return v == y[0]; });
    oracle::KendallOracle want = oracle::kendall(x, y);

    CorrelationResult a = kendall(x, y, KendallVariant::A);
    CHECK(a.coefficient == doctest::Approx(want.tau_a).epsilon(1e-12));
    if (!x_const && !y_const) {
      CorrelationResult b = kendall(x, y, KendallVariant::B);
      CHECK(b.coefficient == doctest::Approx(want.tau_b).epsilon(1e-12));
      CHECK(b.statistic == doctest::Approx(want.z).epsilon(1e-12));
      // Variant A reuses the same z approximation for its p-value.
      CHECK(a.p_value == b.p_value);
      CHECK(a.statistic == b.statistic);
    }
  }
}

TEST_CASE("kendall: hand-checked example and degenerate ties") {
  // x: 1 2 2 3; y: 1 3 2 2. Pairs: (1,2):c (1,3):c (1,4):c (2,3):tx
  // (2,4):d (3,4):ty -> Nc=3, Nd=1, Nt=2.
  std::vector<double> x{1, 2, 2, 3}, y{1, 3, 2, 2};
  PairCounts pc = count_pairs(x, y);
  CHECK(pc.nc == 3);
  CHECK(pc.nd == 1);
  CHECK(pc.nt == 2);
  CorrelationResult a = kendall(x, y, KendallVariant::A);
  CHECK(a.coefficient == doctest::Approx(1.0 / 3.0));  // (3-1)/6
  // tau_B: S / sqrt((6-1)(6-1)) = 2/5.
  CorrelationResult b = kendall(x, y, KendallVariant::B);
  CHECK(b.coefficient == doctest::Approx(0.4));

  std::vector<double> all_tied{2, 2, 2, 2}, varying{1, 2, 3, 4};
  CHECK_THROWS_AS(kendall(all_tied, varying, KendallVariant::B), NumericError);
  CorrelationResult a2 = kendall(all_tied, varying, KendallVariant::A);
  CHECK(a2.coefficient == 0.0);
  CHECK(a2.p_value == 1.0);

  // Two points are enough for a pair count; one is not.
  CHECK(kendall({1, 2}, {1, 2}, KendallVariant::A).coefficient == 1.0);
  CHECK_THROWS_AS(kendall({1}, {1}, KendallVariant::A), InputError);
}

TEST_CASE("p-value helpers match frozen external references") {
  CHECK(student_t_two_sided_p(2.0, 10) ==
        doctest::Approx(0.07338803477074039).epsilon(1e-12));
  CHECK(student_t_two_sided_p(-1.5, 37) ==
        doctest::Approx(0.1420998627608298).epsilon(1e-12));
  CHECK(student_t_two_sided_p(12.0, 3) ==
        doctest::Approx(0.001245015800789336).epsilon(1e-12));
  CHECK(normal_two_sided_p(1.959963984540054) ==
        doctest::Approx(0.05).epsilon(1e-12));
  CHECK(normal_two_sided_p(-3.0) ==
        doctest::Approx(0.0026997960632601866).epsilon(1e-12));
  CHECK(normal_two_sided_p(10.0) ==
        doctest::Approx(1.523970604832094e-23).epsilon(1e-9));
  CHECK(normal_two_sided_p(0.0) == 1.0);
  CHECK(student_t_two_sided_p(0.0, 5) == 1.0);
}

TEST_CASE("paired_values: pairwise-complete filtering") {
  Dataset ds = battery_dataset();
  auto [f1, p1] = paired_values(ds, Role::Child, FreqSource::Childes,
                                Companion::Polysemy);
  CHECK(f1.size() == 7);  // every child record has polysemy
  auto [f2, p2] = paired_values(ds, Role::Child, FreqSource::Childes,
                                Companion::Phonemes);
  CHECK(f2.size() == 6);  // "ff" lacks phonemes
  auto [f3, p3] = paired_values(ds, Role::Child, FreqSource::Reference,
                                Companion::Polysemy);
  CHECK(f3.size() == 6);  // "gg" lacks a reference frequency
  auto [f4, p4] = paired_values(ds, Role::Child, FreqSource::Reference,
                                Companion::Phonemes);
  CHECK(f4.size() == 5);  // both filters apply
  // Columns align: frequency of "aa" pairs with its polysemy.
  auto [fa, pa] = paired_values(ds, Role::Adult, FreqSource::Childes,
                                Companion::Polysemy);
  REQUIRE(fa.size() == 2);
  CHECK(fa[0] == 60.0);
  CHECK(pa[0] == 6.0);
}

TEST_CASE("correlate_battery: structure and content") {
  Dataset ds = battery_dataset();
  std::vector<BatteryCell> cells = correlate_battery(ds, FreqSource::Childes);
  REQUIRE(cells.size() == 24);  // 2 roles x 4 companions x 3 methods
  // Fixed ordering: role, then companion, then method.
  CHECK(cells[0].role == Role::Child);
  CHECK(cells[0].companion == Companion::Polysemy);
  CHECK(cells[0].method == CorrMethod::Pearson);
  CHECK(cells[1].method == CorrMethod::Spearman);
  CHECK(cells[2].method == CorrMethod::KendallB);
  CHECK(cells[3].companion == Companion::Chars);
  CHECK(cells[12].role == Role::Adult);

  // Child polysemy cell matches a direct call.
  auto [fx, fy] = paired_values(ds, Role::Child, FreqSource::Childes,
                                Companion::Polysemy);
  REQUIRE(cells[0].result.has_value());
  CHECK(cells[0].result->coefficient == pearson(fx, fy).coefficient);
  CHECK(cells[0].n == 7);

  // Adult cells: n = 2 < 3 -> not computable, note says so.
  REQUIRE(!cells[12].result.has_value());
  CHECK(cells[12].n == 2);
  CHECK(cells[12].note.find("n < 3") != std::string::npos);
}

TEST_CASE("ties_table: brute-force agreement and structure") {
  Dataset ds = battery_dataset();
  std::vector<TiesRow> rows = ties_table(ds);
  REQUIRE(rows.size() == 4);  // 2 roles x 2 sources
  CHECK(rows[0].role == Role::Child);
  CHECK(rows[0].source == FreqSource::Childes);
  CHECK(rows[3].role == Role::Adult);
  CHECK(rows[3].source == FreqSource::Reference);

  for (const TiesRow& row : rows) {
    for (std::size_t c = 0; c < 4; ++c) {
      auto [fx, fy] =
          paired_values(ds, row.role, row.source, kCompanions[c]);
      CHECK(row.n[c] == static_cast<std::int64_t>(fx.size()));
      if (fx.size() >= 2) {
        PairCounts pc = count_pairs_brute(fx, fy);
        REQUIRE(row.percent_ties[c].has_value());
        CHECK(*row.percent_ties[c] ==
              100.0 * static_cast<double>(pc.nt) /
                  static_cast<double>(pc.total()));
      } else {
        CHECK(!row.percent_ties[c].has_value());
      }
    }
  }

  std::vector<TiesRow> only_ref = ties_table(ds, FreqSource::Reference);
  REQUIRE(only_ref.size() == 2);
  CHECK(only_ref[0].source == FreqSource::Reference);
  CHECK(only_ref[1].source == FreqSource::Reference);
}
