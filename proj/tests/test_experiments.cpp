#include "comac/csv.hpp"
#include "comac/experiments.hpp"

#include <gtest/gtest.h>

#include <map>
#include <tuple>
#include <sstream>

using namespace comac;

namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.figure = Figure::Custom;
  s.K_values = {8, 12};
  s.M_values = {2, 4};
  s.N_values = {1, 4};
  s.snr_db = {10.0};
  s.families = {RateFamily::Conventional, RateFamily::Opportunistic, RateFamily::SfaAvg};
  s.trials = 1000;
  s.gamma_trials = 20000;
  return s;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_rate_rows(out, rows);
  return out.str();
}

}  // namespace

TEST(Figures, NamesRoundTrip) {
  for (Figure f : {Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7, Figure::Custom}) {
    EXPECT_EQ(parse_figure(figure_name(f)), f);
  }
  EXPECT_FALSE(parse_figure("fig9").has_value());
}

TEST(Figures, DefaultSweepsAreValid) {
  for (Figure f : {Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7, Figure::Custom}) {
    const auto spec = default_sweep(f);
    EXPECT_NO_THROW(spec.validate()) << figure_name(f);
    for (int K : spec.K_values) {
      for (int M : spec.M_values) EXPECT_EQ(K % M, 0) << figure_name(f);
    }
  }
  const auto fig4 = default_sweep(Figure::Fig4);
  EXPECT_EQ(fig4.K_values, std::vector{128});
  EXPECT_EQ(fig4.M_values, divisors(128));
}

TEST(Sweep, ValidationRejectsBadGrids) {
  auto s = small_spec();
  s.trials = 999;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = small_spec();
  s.K_values.clear();
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = small_spec();
  s.K_values = {1024};
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Sweep, GridOrderAndErrorRows) {
  auto s = small_spec();
  s.K_values = {6};
  s.M_values = {3, 4};
  s.N_values = {2};
  s.families = {RateFamily::SfaAvg};
  const auto rows = run_sweep(s);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].M, 3);
  EXPECT_TRUE(rows[0].status.empty());
  EXPECT_GT(rows[0].rate, 0.0);
  EXPECT_EQ(rows[1].M, 4);
  EXPECT_FALSE(rows[1].status.empty());
  EXPECT_EQ(rows[1].rate, 0.0);
}

TEST(Sweep, RowsMatchDirectEstimates) {
  const auto s = small_spec();
  const auto rows = run_sweep(s);
  std::map<std::tuple<std::string, int, int, int>, int> seen;
  for (const auto& row : rows) {
    const int count = ++seen[{row.family, row.K, row.M, row.N}];
    EXPECT_EQ(count, 1);
    EXPECT_GE(row.std_error, 0.0);
    if (row.family != "sfa-avg" || !row.status.empty()) continue;
    SimParams p;
    p.K = row.K;
    p.M = row.M;
    p.N = row.N;
    p.power = db_to_linear(10.0);
    p.trials = s.trials;
    p.seed = s.seed;
    p.gamma_trials = s.gamma_trials;
    EXPECT_EQ(rate_sfa_avg(p).mean, row.rate);
  }
}

TEST(Sweep, ByteIdenticalAcrossRunsAndThreads) {
  auto s = small_spec();
  const std::string first = to_csv(run_sweep(s));
  EXPECT_EQ(first, to_csv(run_sweep(s)));
  s.exec = Execution{3};
  EXPECT_EQ(first, to_csv(run_sweep(s)));
}

TEST(Sweep, ProgressHookSeesEveryRow) {
  auto s = small_spec();
  std::vector<ResultRow> hooked;
  s.on_row = [&](const ResultRow& r) { hooked.push_back(r); };
  const auto rows = run_sweep(s);
  EXPECT_EQ(hooked, rows);
}

TEST(Fig4, AllNodesSingleCarrierPointIsConventional) {
  SimParams p;
  p.K = 128;
  p.M = 128;
  p.N = 1;
  p.power = db_to_linear(10.0);
  p.trials = 1000;
  p.gamma_trials = 20000;
  const auto sfa = rate_sfa_avg(p);
  const auto conv = rate_conventional(p);
  EXPECT_NEAR(sfa.mean, conv.mean, 1e-12 * conv.mean);
}

TEST(OptimalB, SmallCases) {
  const double P = db_to_linear(10.0);
  EXPECT_EQ(optimal_subfunction_count(1, 4, P, 1000, 3, 10000).B_opt, 1);
  const auto big = optimal_subfunction_count(256, 4, P, 1000, 3, 20000);
  EXPECT_GT(big.B_opt, 1);
  EXPECT_EQ(256 % big.B_opt, 0);
}

TEST(OptimalB, RowsCoverGrid) {
  SweepSpec s;
  s.figure = Figure::Fig5;
  s.K_values = {4, 8};
  s.N_values = {2, 4};
  s.snr_db = {10.0};
  s.families = {RateFamily::SfaAvg};
  s.trials = 1000;
  s.gamma_trials = 10000;
  const auto rows = run_optimal_b(s);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.K % r.B_opt, 0);
    EXPECT_GT(r.rate, 0.0);
    const auto again = optimal_subfunction_count(r.K, r.N, db_to_linear(10.0), 1000, s.seed, 10000);
    EXPECT_EQ(again, r);
  }
}

// Ranking of the five families at matched seed, P = 10 dB, K = 64, N = 16,
// with partition families at their best divisor.
TEST(Ordering, FamiliesRankAtK64) {
  SweepSpec s;
  s.K_values = {64};
  s.N_values = {16};
  s.snr_db = {10.0};
  s.families = {RateFamily::Conventional, RateFamily::Opportunistic, RateFamily::DirectOfdm, RateFamily::SfaAvg,
                RateFamily::SfaOpa};
  s.trials = 1000;
  s.gamma_trials = 50000;
  std::map<std::string, ResultRow> by_family;
  for (const auto& row : run_sweep(s)) by_family[row.family] = row;
  const auto& conv = by_family.at("conventional");
  const auto& opp = by_family.at("opportunistic");
  const auto& direct = by_family.at("direct-ofdm");
  const auto& avg = by_family.at("sfa-avg");
  const auto& opa = by_family.at("sfa-opa");
  EXPECT_GE(avg.rate, direct.rate);
  EXPECT_GE(avg.rate, opp.rate);
  for (const auto* r : {&opp, &direct, &avg, &opa}) EXPECT_GT(r->rate, conv.rate) << r->family;
  EXPECT_GE(opa.rate, avg.rate) << "per-symbol budget vs average budget";
}

TEST(NonVanishing, SfaStaysAboveFloorWhileConventionalDecays) {
  const double P = db_to_linear(10.0);
  double previous_conv = 1e300;
  for (int K : {32, 64, 128, 256}) {
    SimParams p;
    p.K = K;
    p.M = K;
    p.N = 16;
    p.power = P;
    p.trials = 1000;
    p.gamma_trials = 20000;
    const double conv = rate_conventional(p).mean;
    EXPECT_LT(conv, previous_conv) << K;
    previous_conv = conv;
    const auto best = optimal_subfunction_count(K, 16, P, 1000, p.seed, 20000);
    EXPECT_GT(best.rate, 0.5) << K;
    EXPECT_GT(best.rate, 2.0 * conv) << K;
  }
}

TEST(TopSets, CountsCoverAllSubsets) {
  const auto counts = top_set_counts(5, 2, 5000, 1);
  EXPECT_EQ(counts.size(), 10u);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  EXPECT_EQ(total, 5000u);
}

TEST(Selftest, AllChecksPass) {
  const auto report = run_selftest();
  EXPECT_EQ(report.checks.size(), 10u);
  for (const auto& c : report.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  EXPECT_TRUE(report.pass());
}
