#include "comac/experiments.hpp"

#include "comac/combinatorics.hpp"
#include "comac/power.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace comac {

namespace {

const std::vector<int> kFigureK = {8, 16, 32, 64, 128, 256, 512};

ResultRow make_row(RateFamily family, int K, int M, int N, double snr_db) {
  ResultRow row;
  row.family = std::string(family_name(family));
  row.K = K;
  row.M = M;
  row.N = N;
  row.snr_db = snr_db;
  return row;
}

void fill(ResultRow& row, const RateEstimate& est) {
  row.rate = est.mean;
  row.std_error = est.std_error;
  row.trials = est.trials;
}

SimParams params_for(const SweepSpec& spec, int K, int M, int N, double power) {
  SimParams p;
  p.K = K;
  p.M = M;
  p.N = N;
  p.power = power;
  p.trials = spec.trials;
  p.seed = spec.seed;
  p.gamma_trials = spec.gamma_trials;
  return p;
}

// Best divisor for sfa-avg at one (K, N, P) point; ties keep the larger M
// (smaller B).
RateEstimate best_sfa_avg(const SimParams& base, const Execution& exec) {
  auto ms = divisors(base.K);
  std::reverse(ms.begin(), ms.end());  // B = K/M ascending
  const auto estimates = rate_sfa_avg_profile(base, ms, exec);
  std::size_t best = 0;
  for (std::size_t k = 1; k < estimates.size(); ++k) {
    if (estimates[k].mean > estimates[best].mean) best = k;
  }
  return estimates[best];
}

}  // namespace

std::string_view figure_name(Figure figure) {
  switch (figure) {
    case Figure::Fig4: return "fig4";
    case Figure::Fig5: return "fig5";
    case Figure::Fig6: return "fig6";
    case Figure::Fig7: return "fig7";
    case Figure::Custom: return "custom";
  }
  return "custom";
}

std::optional<Figure> parse_figure(std::string_view name) {
  for (Figure f : {Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7, Figure::Custom}) {
    if (figure_name(f) == name) return f;
  }
  return std::nullopt;
}

void SweepSpec::validate() const {
  if (K_values.empty() || N_values.empty() || snr_db.empty() || families.empty()) {
    throw std::invalid_argument("sweep: K, N, SNR and family grids must be non-empty");
  }
  if (trials < 1000) throw std::invalid_argument("sweep: at least 1000 trials per point");
  if (trials > max_trials) throw std::invalid_argument("sweep: trials exceed the configured cap");
  if (gamma_trials < 1) throw std::invalid_argument("sweep: gamma_trials must be positive");
  for (int K : K_values) {
    if (K < 1) throw std::invalid_argument("sweep: K must be positive");
    if (K > max_K) throw std::invalid_argument("sweep: K exceeds the configured cap");
  }
  for (int M : M_values) {
    if (M < 1) throw std::invalid_argument("sweep: M must be positive");
  }
  for (int N : N_values) {
    if (N < 1) throw std::invalid_argument("sweep: N must be positive");
  }
}

SweepSpec default_sweep(Figure figure) {
  SweepSpec spec;
  spec.figure = figure;
  spec.snr_db = {10.0};
  switch (figure) {
    case Figure::Fig4:
      spec.K_values = {128};
      spec.M_values = divisors(128);
      spec.N_values = {1, 4, 16};
      spec.families = {RateFamily::SfaAvg};
      break;
    case Figure::Fig5:
      spec.K_values = kFigureK;
      spec.N_values = {4, 16};
      spec.families = {RateFamily::SfaAvg};
      break;
    case Figure::Fig6:
      spec.K_values = kFigureK;
      spec.N_values = {16};
      spec.families = {RateFamily::Conventional, RateFamily::Opportunistic, RateFamily::DirectOfdm,
                       RateFamily::SfaAvg};
      break;
    case Figure::Fig7:
      spec.K_values = {8, 16, 32, 64, 128};
      spec.N_values = {16};
      spec.families = {RateFamily::Conventional, RateFamily::Opportunistic, RateFamily::DirectOfdm,
                       RateFamily::SfaAvg, RateFamily::SfaOpa};
      spec.trials = 2000;
      break;
    case Figure::Custom:
      spec.K_values = {16};
      spec.M_values = {4};
      spec.N_values = {4};
      spec.families = {RateFamily::SfaAvg};
      break;
  }
  return spec;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  using Clock = std::chrono::steady_clock;
  std::vector<ResultRow> rows;

  for (double snr : spec.snr_db) {
    const double power = db_to_linear(snr);
    for (int K : spec.K_values) {
      for (int N : spec.N_values) {
        std::optional<RateEstimate> best_avg;
        auto best_avg_estimate = [&] {
          if (!best_avg) best_avg = best_sfa_avg(params_for(spec, K, K, N, power), spec.exec);
          return *best_avg;
        };

        for (RateFamily family : spec.families) {
          auto evaluate = [&](int M, auto&& compute) {
            ResultRow row = make_row(family, K, M, N, snr);
            const auto start = Clock::now();
            try {
              fill(row, compute());
            } catch (const std::exception& e) {
              row.status = e.what();
              row.rate = 0.0;
              row.std_error = 0.0;
              row.trials = 0;
            }
            row.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
            if (spec.on_row) spec.on_row(row);
            rows.push_back(std::move(row));
          };

          if (uses_all_nodes(family)) {
            evaluate(K, [&] { return estimate_rate(family, params_for(spec, K, K, N, power), spec.exec); });
            continue;
          }
          if (!spec.M_values.empty()) {
            for (int M : spec.M_values) {
              evaluate(M, [&] { return estimate_rate(family, params_for(spec, K, M, N, power), spec.exec); });
            }
            continue;
          }
          // Best over divisors.
          if (family == RateFamily::SfaAvg) {
            const RateEstimate est = best_avg_estimate();
            evaluate(est.params.M, [&] { return est; });
          } else if (family == RateFamily::SfaOpa) {
            const int M = best_avg_estimate().params.M;
            evaluate(M, [&] { return estimate_rate(family, params_for(spec, K, M, N, power), spec.exec); });
          } else {
            std::optional<RateEstimate> best;
            auto ms = divisors(K);
            std::reverse(ms.begin(), ms.end());
            for (int M : ms) {
              auto est = estimate_rate(family, params_for(spec, K, M, N, power), spec.exec);
              if (!best || est.mean > best->mean) best = est;
            }
            evaluate(best->params.M, [&] { return *best; });
          }
        }
      }
    }
  }
  return rows;
}

OptimalBRow optimal_subfunction_count(int K, int N, double power, std::uint64_t trials, std::uint64_t seed,
                                      std::uint64_t gamma_trials, const Execution& exec) {
  SimParams base;
  base.K = K;
  base.M = K;
  base.N = N;
  base.power = power;
  base.trials = trials;
  base.seed = seed;
  base.gamma_trials = gamma_trials;
  base.validate();
  const RateEstimate best = best_sfa_avg(base, exec);
  return {K, N, K / best.params.M, best.mean, best.std_error};
}

std::vector<OptimalBRow> run_optimal_b(const SweepSpec& spec) {
  spec.validate();
  const double power = db_to_linear(spec.snr_db.front());
  std::vector<OptimalBRow> rows;
  for (int K : spec.K_values) {
    for (int N : spec.N_values) {
      rows.push_back(optimal_subfunction_count(K, N, power, spec.trials, spec.seed, spec.gamma_trials, spec.exec));
    }
  }
  return rows;
}

std::vector<std::uint64_t> top_set_counts(int K, int M, std::uint64_t draws, std::uint64_t seed) {
  if (M < 1 || M > K) throw std::invalid_argument("top_set_counts: need 1 <= M <= K");
  const auto sets = count_subfunction_sets(K, M);
  if (sets > BigInt(kDefaultEnumerationCap)) throw EnumerationTooLarge("top_set_counts", sets);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(sets), 0);
  std::vector<double> gains(K);
  std::vector<int> top(M);
  for (std::uint64_t d = 0; d < draws; ++d) {
    Engine engine = make_engine(seed, Stream::Channel, d);
    draw_gains(engine, gains);
    const auto order = order_indexes(gains);
    std::copy(order.begin(), order.begin() + M, top.begin());
    std::sort(top.begin(), top.end());
    ++counts[subset_rank(top, K)];
  }
  return counts;
}

}  // namespace comac
