#include "comac/combinatorics.hpp"
#include "comac/experiments.hpp"
#include "comac/power.hpp"
#include "comac/source_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace comac {

namespace {

std::string format(const char* label, double value) {
  std::ostringstream out;
  out.precision(6);
  out << label << value;
  return out.str();
}

SelftestCheck reduction(const char* name, RateFamily narrow, RateFamily wide, int K, int M, std::uint64_t seed,
                        const Execution& exec) {
  SimParams p;
  p.K = K;
  p.M = M;
  p.N = 1;
  p.power = db_to_linear(10.0);
  p.trials = 2000;
  p.seed = seed;
  p.gamma_trials = 20000;
  const auto a = sample_rates(narrow, p, exec);
  const auto b = sample_rates(wide, p, exec);
  double worst = 0.0;
  for (std::size_t t = 0; t < a.values.size(); ++t) worst = std::max(worst, std::fabs(a.values[t] - b.values[t]));
  return {name, worst == 0.0, format("max |difference| = ", worst)};
}

struct Instance {
  GainMatrix gains;
  AssignmentMatrix omega;
  SimParams params;
};

Instance random_instance(Engine& engine) {
  std::uniform_int_distribution<int> k_dist(1, 6), n_dist(1, 8);
  const double budgets[] = {0.5, 1.0, 10.0};
  Instance inst;
  inst.params.K = k_dist(engine);
  inst.params.N = n_dist(engine);
  inst.params.M = std::uniform_int_distribution<int>(1, inst.params.K)(engine);
  inst.params.power = budgets[std::uniform_int_distribution<int>(0, 2)(engine)];
  inst.gains = GainMatrix(inst.params.K, inst.params.N);
  draw_gains(engine, inst.gains.data());
  inst.omega = build_assignment(inst.gains, inst.params.M);
  return inst;
}

}  // namespace

bool SelftestReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const SelftestCheck& c) { return c.pass; });
}

SelftestReport run_selftest(std::uint64_t seed, const Execution& exec) {
  SelftestReport report;
  auto& checks = report.checks;

  checks.push_back(reduction("reduction-direct-ofdm", RateFamily::Conventional, RateFamily::DirectOfdm, 16, 16,
                             seed, exec));
  checks.push_back(reduction("reduction-sfa-avg", RateFamily::Opportunistic, RateFamily::SfaAvg, 16, 4, seed, exec));

  {
    const auto g11 = estimate_gamma(1, 1, 1000, seed, exec);
    checks.push_back({"gamma-1-1", g11.value == 1.0, format("estimate = ", g11.value)});
    const auto g22 = estimate_gamma(2, 2, 1000000, seed, exec);
    const double z = std::fabs(g22.value - std::numbers::ln2) / g22.std_error;
    checks.push_back({"gamma-2-2", z < 3.0, format("|z| = ", z)});
  }

  {
    const int K = 4, M = 2;
    const std::uint64_t draws = 100000;
    const auto counts = top_set_counts(K, M, draws, seed);
    const double p = 1.0 / static_cast<double>(counts.size());
    const double sigma = std::sqrt(draws * p * (1.0 - p));
    double worst = 0.0;
    for (auto c : counts) worst = std::max(worst, std::fabs(static_cast<double>(c) - draws * p) / sigma);
    checks.push_back({"top-set-frequencies", counts.size() == 6 && worst < 3.0, format("max |z| = ", worst)});
  }

  {
    bool ok = true;
    for (auto [K, M] : {std::pair{4, 2}, std::pair{6, 2}, std::pair{6, 3}, std::pair{8, 4}}) {
      ok = ok && BigInt(enumerate_subfunction_sets(K, M).size()) == count_subfunction_sets(K, M);
      ok = ok && BigInt(enumerate_combinations(K, M).size()) == count_combinations(K, M);
    }
    checks.push_back({"enumeration-counts", ok, ok ? "ok" : "mismatch"});
  }

  {
    const int K = 4, M = 2, p = 3;
    DataMatrix data(81, K, p);
    for (int r = 0; r < 81; ++r) {
      int code = r;
      for (int i = 0; i < K; ++i) {
        data.at(r, i) = code % p;
        code /= p;
      }
    }
    const auto combos = enumerate_combinations(K, M);
    int failures = 0;
    for (const FunctionSpec& spec : {FunctionSpec::sum(K), FunctionSpec::type(K, p)}) {
      for (int r = 0; r < data.rows(); ++r) {
        const auto row = data.row(r);
        const FunctionValue desired = eval_desired(spec, row);
        for (const auto& parts : combos) {
          std::vector<FunctionValue> subs;
          for (const auto& part : parts) subs.push_back(eval_subfunction(spec, row, part));
          if (!(reconstruct(spec, subs, parts) == desired)) ++failures;
        }
      }
    }
    checks.push_back({"reconstruction", failures == 0, format("failures = ", failures)});
  }

  {
    Engine engine = make_engine(seed, Stream::Selftest, 0);
    double worst_rel = 0.0;
    bool kkt = true;
    for (int n = 0; n < 20; ++n) {
      const Instance inst = random_instance(engine);
      const auto sponge = sponge_squeeze(inst.gains, inst.omega, inst.params);
      const auto oracle = oracle_solve(inst.gains, inst.omega, inst.params);
      const double rel = std::fabs(sponge.smooth_objective - oracle.smooth_objective) /
                         std::max(std::fabs(oracle.smooth_objective), 1e-12);
      worst_rel = std::max(worst_rel, rel);
      kkt = kkt && sponge.residuals.pass && sponge.residuals.max_power_gap <= 1e-8 * inst.params.power;
    }
    checks.push_back({"oracle-equivalence", worst_rel < 1e-6, format("max relative gap = ", worst_rel)});
    checks.push_back({"kkt-residuals", kkt, kkt ? "ok" : "residual above 1e-6"});
  }

  {
    SimParams p;
    p.K = 16;
    p.M = 4;
    p.N = 8;
    p.power = db_to_linear(10.0);
    int violations = 0;
    for (std::uint64_t t = 0; t < 200; ++t) {
      Engine engine = make_engine(seed, Stream::Selftest, 1000 + t);
      GainMatrix gains(p.K, p.N);
      draw_gains(engine, gains.data());
      const auto omega = build_assignment(gains, p.M);
      const auto sponge = sponge_squeeze(gains, omega, p);
      const double even = level_rate(equal_split_levels(gains, omega, p.power), p.K, p.M);
      if (sponge.objective < even - 1e-10) ++violations;
    }
    checks.push_back({"dominance", violations == 0, format("violations = ", violations)});
  }

  return report;
}

}  // namespace comac
