#pragma once

#include "comac/numerics.hpp"
#include "comac/parallel.hpp"
#include "comac/rates.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace comac {

struct ResultRow;

enum class Figure { Fig4, Fig5, Fig6, Fig7, Custom };

std::string_view figure_name(Figure figure);
std::optional<Figure> parse_figure(std::string_view name);

/// Grid description for a Monte Carlo sweep.
///
/// An empty `M_values` means "best over the divisors of K": partition-based
/// families report the divisor M with the highest rate (sfa-opa reuses the M
/// chosen for sfa-avg, since optimizing it per divisor is costly).
struct SweepSpec {
  Figure figure = Figure::Custom;
  std::vector<int> K_values;
  std::vector<int> M_values;
  std::vector<int> N_values;
  std::vector<double> snr_db;
  std::vector<RateFamily> families;
  std::uint64_t trials = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t gamma_trials = 100000;
  int max_K = 512;
  std::uint64_t max_trials = 10000;
  Execution exec;
  std::function<void(const ResultRow&)> on_row;  // progress hook, called in grid order

  /// Throws std::invalid_argument on empty grids, trials < 1000 or caps exceeded.
  void validate() const;
};

/// Desk-scale defaults for the named figures.
SweepSpec default_sweep(Figure figure);

struct ResultRow {
  std::string family;
  int K = 0;
  int M = 0;
  int N = 0;
  double snr_db = 0.0;
  double rate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  double wall_seconds = 0.0;  // not serialized
  std::string status;         // empty when the point evaluated cleanly

  bool operator==(const ResultRow&) const = default;
};

/// Rows in grid order: SNR, then K, then N, then family, then M. Infeasible
/// points (M not dividing K) become rows with a non-empty status.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

struct OptimalBRow {
  int K = 0;
  int N = 0;
  int B_opt = 1;
  double rate = 0.0;
  double std_error = 0.0;

  bool operator==(const OptimalBRow&) const = default;
};

/// argmax over B | K of rate_sfa_avg with M = K/B; ties go to the smallest B.
OptimalBRow optimal_subfunction_count(int K, int N, double power, std::uint64_t trials, std::uint64_t seed,
                                      std::uint64_t gamma_trials = 100000, const Execution& exec = {});

/// optimal_subfunction_count over the K x N grid of a sweep (first SNR only).
std::vector<OptimalBRow> run_optimal_b(const SweepSpec& spec);

/// Counts of the top-M node set of a single sub-carrier over `draws` channel
/// draws, indexed by subset_rank.
std::vector<std::uint64_t> top_set_counts(int K, int M, std::uint64_t draws, std::uint64_t seed);

struct SelftestCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  bool pass() const;
};

/// Runs the invariant suite at reduced sizes with the given seed.
SelftestReport run_selftest(std::uint64_t seed = kDefaultSeed, const Execution& exec = {});

}  // namespace comac
