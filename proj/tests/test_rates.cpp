#include "comac/power.hpp"
#include "comac/rates.hpp"
#include "oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace comac;

namespace {

SimParams scenario(int K, int M, int N, double power, std::uint64_t trials = 4000) {
  SimParams p;
  p.K = K;
  p.M = M;
  p.N = N;
  p.power = power;
  p.trials = trials;
  p.gamma_trials = 50000;
  return p;
}

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

}  // namespace

TEST(Gamma, SingleNodeIsExactlyOne) {
  const auto g = estimate_gamma(1, 1, 1000, 3);
  EXPECT_EQ(g.value, 1.0);
  EXPECT_EQ(g.std_error, 0.0);
}

TEST(Gamma, TwoNodesMatchesLn2) {
  const auto g = estimate_gamma(2, 2, 1000000, 1);
  EXPECT_NEAR(g.value, std::numbers::ln2, 0.003);
  EXPECT_LT(std::fabs(g.value - std::numbers::ln2), 3.0 * g.std_error);
}

TEST(Gamma, AgreesWithDirectOracle) {
  for (auto [K, M] : {std::pair{8, 2}, std::pair{8, 8}, std::pair{16, 4}, std::pair{5, 3}}) {
    const auto g = estimate_gamma(K, M, 200000, 21);
    const auto o = oracle::gamma_direct(K, M, 200000, 4242);
    EXPECT_GT(g.value, 0.0);
    EXPECT_LE(g.value, 1.0);
    EXPECT_LT(std::fabs(g.value - o.mean), 4.0 * combined(g.std_error, o.std_error)) << K << "," << M;
    EXPECT_NEAR(g.std_error / o.std_error, 1.0, 0.05);
  }
}

TEST(Gamma, ProfileMatchesIndividualEstimatesAndThreadCount) {
  const auto serial = estimate_gamma_profile(12, 30000, 5, Execution{1});
  const auto threaded = estimate_gamma_profile(12, 30000, 5, Execution{3});
  EXPECT_EQ(serial.value, threaded.value);
  EXPECT_EQ(serial.std_error, threaded.std_error);
  for (int M = 1; M <= 12; ++M) {
    const auto g = estimate_gamma(12, M, 30000, 5);
    EXPECT_EQ(g.value, serial.at(M).value);
    EXPECT_GT(g.value, 0.0);
    EXPECT_LE(g.value, 1.0);
  }
  EXPECT_EQ(serial.at(1).value, 1.0);
  EXPECT_THROW(serial.at(13), std::invalid_argument);
}

// With more nodes the M strongest gains bunch together relative to their
// spacing, so the ratio expectation climbs toward one as K grows.
TEST(Gamma, NondecreasingInKNonincreasingInM) {
  const int M = 2;
  GammaEstimate previous = estimate_gamma(2, M, 200000, 8);
  for (int K : {4, 8, 16, 32}) {
    const auto g = estimate_gamma(K, M, 200000, 8);
    EXPECT_GE(g.value, previous.value - 3.0 * combined(g.std_error, previous.std_error)) << K;
    previous = g;
  }
  const auto profile = estimate_gamma_profile(16, 200000, 8);
  for (int m = 2; m <= 16; ++m) {
    const auto a = profile.at(m - 1), b = profile.at(m);
    EXPECT_LE(b.value, a.value + 3.0 * combined(a.std_error, b.std_error)) << m;
  }
}

TEST(Gamma, CacheReturnsSameProfile) {
  const auto a = cached_gamma_profile(6, 1234, 9);
  const auto b = cached_gamma_profile(6, 1234, 9);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_NE(a.get(), cached_gamma_profile(6, 1234, 10).get());
}

TEST(Conventional, ZeroPowerGivesZero) {
  const std::vector<double> gain = {1.7};
  EXPECT_EQ(integrand::conventional(gain, 0.0, 1.0), 0.0);
  const std::vector<double> pair = {0.3, 2.0};
  EXPECT_EQ(integrand::opportunistic(pair, 1, 0.0, 0.5), 0.0);
}

TEST(Conventional, SingleNodeMatchesQuadrature) {
  const auto est = rate_conventional(scenario(1, 1, 1, 10.0, 100000));
  const double exact = oracle::expected_cplus_exponential(1.0, 10.0);
  EXPECT_NEAR(exact, 1.453, 0.001);
  EXPECT_NEAR(est.mean, 1.453, 0.01);
  EXPECT_LT(std::fabs(est.mean - exact), 4.0 * est.std_error);
}

TEST(Conventional, DecreasesWithK) {
  const auto k8 = rate_conventional(scenario(8, 8, 1, 10.0));
  const auto k64 = rate_conventional(scenario(64, 64, 1, 10.0));
  EXPECT_LT(k64.mean, k8.mean);
}

TEST(Opportunistic, MEqualsKCoincidesWithConventional) {
  const auto p = scenario(8, 8, 1, 10.0, 2000);
  const auto a = sample_rates(RateFamily::Conventional, p);
  const auto b = sample_rates(RateFamily::Opportunistic, p);
  for (std::size_t t = 0; t < a.values.size(); ++t) EXPECT_NEAR(a.values[t], b.values[t], 1e-12);
}

TEST(Opportunistic, MatchesIndependentImplementation) {
  const auto p = scenario(16, 4, 1, 10.0, 100000);
  const auto samples = sample_rates(RateFamily::Opportunistic, p);
  const auto est = rate_opportunistic(p);
  EXPECT_GT(est.mean, 0.0);
  const auto o = oracle::opportunistic_direct(16, 4, 10.0, samples.gamma.value, 100000, 77);
  // Same Gamma value on both sides isolates the rate formula.
  const double n = static_cast<double>(samples.values.size());
  double mean = 0.0, ss = 0.0;
  for (double v : samples.values) mean += v;
  mean /= n;
  for (double v : samples.values) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (n - 1.0) / n);
  EXPECT_LT(std::fabs(mean - o.mean), 4.0 * combined(se, o.std_error));
}

TEST(Opportunistic, RequiresDivisibility) {
  EXPECT_THROW(rate_opportunistic(scenario(10, 3, 1, 10.0)), DivisibilityError);
  EXPECT_THROW(rate_sfa_avg(scenario(10, 3, 4, 10.0)), DivisibilityError);
}

TEST(DirectOfdm, SingleCarrierEqualsConventionalPerRealization) {
  const auto p = scenario(16, 16, 1, 10.0, 5000);
  const auto a = sample_rates(RateFamily::Conventional, p);
  const auto b = sample_rates(RateFamily::DirectOfdm, p);
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t t = 0; t < a.values.size(); ++t) ASSERT_EQ(a.values[t], b.values[t]);
  EXPECT_EQ(rate_conventional(p).mean, rate_direct_ofdm(p).mean);
}

TEST(DirectOfdm, MoreCarriersHelpAndMoreNodesHurt) {
  EXPECT_GT(rate_direct_ofdm(scenario(8, 8, 16, 10.0)).mean, rate_direct_ofdm(scenario(8, 8, 1, 10.0)).mean);
  double previous = rate_direct_ofdm(scenario(8, 8, 16, 10.0)).mean;
  for (int K : {32, 128}) {
    const double r = rate_direct_ofdm(scenario(K, K, 16, 10.0, 2000)).mean;
    EXPECT_LT(r, previous) << K;
    previous = r;
  }
}

TEST(SfaAvg, SingleCarrierEqualsOpportunisticPerRealization) {
  for (auto [K, M] : {std::pair{16, 4}, std::pair{12, 3}, std::pair{8, 8}, std::pair{6, 1}}) {
    const auto p = scenario(K, M, 1, 10.0, 3000);
    const auto a = sample_rates(RateFamily::Opportunistic, p);
    const auto b = sample_rates(RateFamily::SfaAvg, p);
    for (std::size_t t = 0; t < a.values.size(); ++t) ASSERT_EQ(a.values[t], b.values[t]) << K << "," << M;
  }
}

TEST(SfaAvg, InteriorOptimumOverDivisors) {
  const auto p = scenario(128, 128, 16, 10.0, 2000);
  const auto ms = divisors(128);
  const auto est = rate_sfa_avg_profile(p, ms);
  std::size_t best = 0;
  for (std::size_t k = 1; k < est.size(); ++k) {
    if (est[k].mean > est[best].mean) best = k;
  }
  EXPECT_GT(best, 0u);
  EXPECT_LT(best, est.size() - 1);
}

TEST(SfaAvg, IncreasesWithCarriers) {
  const double n1 = rate_sfa_avg(scenario(128, 8, 1, 10.0, 2000)).mean;
  const double n4 = rate_sfa_avg(scenario(128, 8, 4, 10.0, 2000)).mean;
  const double n16 = rate_sfa_avg(scenario(128, 8, 16, 10.0, 2000)).mean;
  EXPECT_GT(n16, n4);
  EXPECT_GT(n4, n1);
}

TEST(SfaAvg, ProfileIsBitIdenticalToSingleEstimates) {
  const auto p = scenario(24, 24, 4, 10.0, 1500);
  const auto ms = divisors(24);
  const auto profile = rate_sfa_avg_profile(p, ms);
  for (std::size_t k = 0; k < ms.size(); ++k) {
    SimParams q = p;
    q.M = ms[k];
    const auto single = rate_sfa_avg(q);
    EXPECT_EQ(profile[k].mean, single.mean);
    EXPECT_EQ(profile[k].std_error, single.std_error);
    EXPECT_EQ(profile[k].params.M, ms[k]);
  }
  const std::vector<int> bad = {5};
  EXPECT_THROW(rate_sfa_avg_profile(p, bad), DivisibilityError);
}

TEST(SfaAvg, IntegrandNondecreasingInN) {
  for (std::uint64_t t = 0; t < 300; ++t) {
    Engine e = make_engine(3, Stream::Selftest, t);
    std::vector<double> column(16);
    draw_gains(e, column);
    for (int M : {1, 2, 4, 8, 16}) {
      double previous = 0.0;
      for (int N = 1; N <= 64; N *= 2) {
        const double v = integrand::sfa_avg(column, M, N, 10.0, 0.3);
        EXPECT_GE(v, previous);
        previous = v;
      }
    }
    double previous = 0.0;
    for (int N = 1; N <= 64; N *= 2) {
      const double v = integrand::direct_ofdm(column, N, 10.0, 0.1);
      EXPECT_GE(v, previous);
      previous = v;
    }
  }
}

TEST(Estimates, StandardErrorScalesWithTrials) {
  const auto small = rate_sfa_avg(scenario(16, 4, 4, 10.0, 4000));
  const auto large = rate_sfa_avg(scenario(16, 4, 4, 10.0, 16000));
  EXPECT_GT(small.std_error, 0.0);
  EXPECT_NEAR(small.std_error / large.std_error, 2.0, 0.3);
}

TEST(Estimates, ParallelEqualsSerial) {
  for (RateFamily f : kAllFamilies) {
    const auto p = scenario(8, 4, 4, 10.0, 1000);
    const auto a = estimate_rate(f, p, Execution{1});
    const auto b = estimate_rate(f, p, Execution{4});
    EXPECT_EQ(a.mean, b.mean) << family_name(f);
    EXPECT_EQ(a.std_error, b.std_error) << family_name(f);
  }
}

TEST(Estimates, GammaUncertaintyWidensError) {
  auto p = scenario(16, 4, 4, 10.0, 4000);
  p.gamma_trials = 200;
  const auto samples = sample_rates(RateFamily::SfaAvg, p);
  const auto est = rate_sfa_avg(p);
  double sum = 0.0, ss = 0.0;
  for (double v : samples.values) sum += v;
  const double mean = sum / samples.values.size();
  for (double v : samples.values) ss += (v - mean) * (v - mean);
  const double mc = std::sqrt(ss / (samples.values.size() - 1) / samples.values.size());
  EXPECT_GT(est.std_error, mc * 1.05);
}

TEST(SfaOpa, NonnegativeAndDeterministic) {
  const auto p = scenario(8, 2, 4, 10.0, 1000);
  const auto a = rate_sfa_opa(p);
  const auto b = rate_sfa_opa(p);
  EXPECT_GT(a.mean, 0.0);
  EXPECT_EQ(a.mean, b.mean);
}

TEST(General, ZeroPowerExamples) {
  SimParams p = scenario(4, 2, 4, 1.0);
  const auto h = draw_channel(p, 2, 0);
  const std::vector<PowerMatrix> zero(2, PowerMatrix(4, 4, 0.0));
  std::vector<AssignmentMatrix> omega;
  for (int m = 0; m < 2; ++m) omega.push_back(build_assignment(h.gains(m), 2));
  const double expected = 2.0 / (4.0 * 4.0) * 4.0 * cplus(2.0);
  EXPECT_DOUBLE_EQ(rate_general(h, zero, omega, p), expected);

  p = scenario(4, 4, 2, 1.0);
  const auto h2 = draw_channel(p, 2, 0);
  const std::vector<PowerMatrix> zero2(2, PowerMatrix(4, 2, 0.0));
  std::vector<AssignmentMatrix> all(2, AssignmentMatrix(4, 2, 1));
  EXPECT_EQ(rate_general(h2, zero2, all, p), 0.0);
}

TEST(General, HandBuiltInstances) {
  SimParams p = scenario(1, 1, 1, 1.0);
  ChannelTensor h(1, 1, 1);
  h.at(0, 0, 0) = {1.0, 1.0};  // |h|^2 = 2
  std::vector<PowerMatrix> power(1, PowerMatrix(1, 1, 1.5));
  std::vector<AssignmentMatrix> omega(1, AssignmentMatrix(1, 1, 1));
  EXPECT_DOUBLE_EQ(rate_general(h, power, omega, p), 1.0);

  // K=2, M=1, N=2: carrier 0 uses node 1 (|h|^2 = 4, P = 0.5), carrier 1 node 0 (|h|^2 = 1, P = 3.5).
  p = scenario(2, 1, 2, 1.0);
  ChannelTensor g(2, 2, 1);
  g.at(0, 0, 0) = {1.0, 0.0};
  g.at(1, 0, 0) = {0.0, 2.0};
  g.at(0, 1, 0) = {1.0, 0.0};
  g.at(1, 1, 0) = {0.5, 0.0};
  PowerMatrix pw(2, 2, 0.0);
  pw(1, 0) = 0.5;
  pw(0, 1) = 3.5;
  AssignmentMatrix om(2, 2, 0);
  om(1, 0) = 1;
  om(0, 1) = 1;
  const std::vector<PowerMatrix> pws = {pw};
  const std::vector<AssignmentMatrix> oms = {om};
  // (1/(2*2)) * [C+(2 + 2*2) + C+(2 + 2*3.5)] = 0.25 * [0.5 log2 6 + 0.5 log2 9]
  const double expected = 0.25 * (0.5 * std::log2(6.0) + 0.5 * std::log2(9.0));
  EXPECT_NEAR(rate_general(g, pws, oms, p), expected, 1e-15);

  EXPECT_THROW(rate_general(g, std::vector<PowerMatrix>{}, oms, p), std::invalid_argument);
  pw(0, 0) = -1.0;
  EXPECT_THROW(rate_general(g, std::vector<PowerMatrix>{pw}, oms, p), std::invalid_argument);
}

TEST(General, AveragePowerRuleConvergesToClosedForm) {
  SimParams p = scenario(8, 2, 4, 10.0, 20000);
  const int symbols = 20000;
  const auto gamma = cached_gamma_profile(8, p.gamma_trials, p.seed)->at(2);
  const auto h = draw_channel(p, symbols, 12345);
  std::vector<PowerMatrix> power;
  std::vector<AssignmentMatrix> omega;
  power.reserve(symbols);
  omega.reserve(symbols);
  for (int m = 0; m < symbols; ++m) {
    const auto gains = h.gains(m);
    power.push_back(allocate_average(gains, p, gamma));
    omega.push_back(build_assignment(gains, 2));
  }
  const double general = rate_general(h, power, omega, p);
  const auto closed = rate_sfa_avg(p);
  const double tol = 4.0 * closed.std_error * std::sqrt(2.0);
  EXPECT_LT(std::fabs(general - closed.mean), tol);
}

TEST(Instant, Examples) {
  const std::vector<double> g1 = {3.0}, p1 = {1.0};
  EXPECT_DOUBLE_EQ(subfunction_rate_instant(g1, p1, {0}, 1, 1), 1.0);
  const std::vector<double> g2 = {1.0, 0.0}, p2 = {1.0, 1.0};
  EXPECT_EQ(subfunction_rate_instant(g2, p2, {0, 1}, 2, 2), 0.0);
  const std::vector<double> g3 = {1.0, 2.0, 0.1}, p3 = {1.0, 1.0, 1.0};
  EXPECT_NEAR(subfunction_rate_instant(g3, p3, {0, 1}, 2, 4), 0.25 * 0.5 * std::log2(6.0), 1e-15);
  EXPECT_NEAR(0.25 * 0.5 * std::log2(6.0), 0.3231, 1e-4);
  EXPECT_THROW(subfunction_rate_instant(g3, p3, {}, 2, 4), std::invalid_argument);
}

TEST(Helpers, DivisorsAndFamilyNames) {
  EXPECT_EQ(divisors(12), (std::vector{1, 2, 3, 4, 6, 12}));
  EXPECT_EQ(divisors(1), (std::vector{1}));
  EXPECT_EQ(divisors(128).size(), 8u);
  for (RateFamily f : kAllFamilies) EXPECT_EQ(parse_family(family_name(f)), f);
  EXPECT_FALSE(parse_family("nope").has_value());
}
