#pragma once

#include "comac/combinatorics.hpp"
#include "comac/numerics.hpp"
#include "comac/parallel.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace comac {

/// Monte Carlo estimate of the power-normalization expectation
///
///   Gamma(K, M) = (1/M) sum_{j=1..M} E[ g_(M) / g_(j) ]
///
/// where g_(1) >= ... >= g_(K) are K i.i.d. unit-mean exponential gains. The
/// ratio never exceeds one, so 0 < Gamma <= 1, and Gamma(K, K) plays the
/// role of E[|h_min|^2 / |h|^2] in the all-nodes formulas.
struct GammaEstimate {
  double value = 1.0;
  double std_error = 0.0;
  int K = 1;
  int M = 1;
  std::uint64_t trials = 0;
};

/// Gamma(K, M) for every M in [1, K] from a single set of draws.
struct GammaProfile {
  int K = 1;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> value;      // index M-1
  std::vector<double> std_error;  // index M-1

  GammaEstimate at(int M) const;
};

GammaProfile estimate_gamma_profile(int K, std::uint64_t trials, std::uint64_t seed,
                                    const Execution& exec = {});

GammaEstimate estimate_gamma(int K, int M, std::uint64_t trials, std::uint64_t seed,
                             const Execution& exec = {});

/// Memoized estimate_gamma_profile keyed by (K, trials, seed). Thread-safe.
std::shared_ptr<const GammaProfile> cached_gamma_profile(int K, std::uint64_t trials, std::uint64_t seed,
                                                         const Execution& exec = {});

enum class RateFamily {
  Conventional,   // all K nodes, single carrier, average power
  Opportunistic,  // top-M nodes, single carrier, average power
  DirectOfdm,     // all K nodes per sub-carrier, average power
  SfaAvg,         // sub-function allocation, average power
  SfaOpa,         // sub-function allocation, optimal per-symbol power
};

inline constexpr RateFamily kAllFamilies[] = {RateFamily::Conventional, RateFamily::Opportunistic,
                                              RateFamily::DirectOfdm, RateFamily::SfaAvg,
                                              RateFamily::SfaOpa};

std::string_view family_name(RateFamily family);
std::optional<RateFamily> parse_family(std::string_view name);

/// Families that split the K nodes into B = K/M groups and so need M | K.
bool needs_partition(RateFamily family);

/// Families that ignore M (all nodes participate).
bool uses_all_nodes(RateFamily family);

struct RateEstimate {
  RateFamily family = RateFamily::SfaAvg;
  double mean = 0.0;       // bits per channel use
  double std_error = 0.0;  // Monte Carlo error including the Gamma estimate
  std::uint64_t trials = 0;
  SimParams params;
};

/// Per-trial integrand values with their derivative with respect to Gamma.
/// Trial t always uses channel substream (params.seed, t).
struct RateSamples {
  std::vector<double> values;
  std::vector<double> gamma_slope;
  GammaEstimate gamma;  // default (value 1, error 0) for SfaOpa
};

RateSamples sample_rates(RateFamily family, const SimParams& params, const Execution& exec = {});

RateEstimate estimate_rate(RateFamily family, const SimParams& params, const Execution& exec = {});

RateEstimate rate_conventional(const SimParams& params, const Execution& exec = {});
RateEstimate rate_opportunistic(const SimParams& params, const Execution& exec = {});
RateEstimate rate_direct_ofdm(const SimParams& params, const Execution& exec = {});
RateEstimate rate_sfa_avg(const SimParams& params, const Execution& exec = {});
RateEstimate rate_sfa_opa(const SimParams& params, const Execution& exec = {});

/// rate_sfa_avg for several M on shared draws. Each entry equals the value
/// rate_sfa_avg returns for that M bit for bit; M values must divide K.
std::vector<RateEstimate> rate_sfa_avg_profile(const SimParams& params, std::span<const int> m_values,
                                               const Execution& exec = {});

/// Integrands of the closed-form rates for one sub-carrier (a column of K
/// gains). `slope` receives d(value)/d(Gamma) when non-null.
namespace integrand {

double conventional(std::span<const double> gains, double power, double gamma, double* slope = nullptr);
double opportunistic(std::span<const double> gains, int M, double power, double gamma,
                     double* slope = nullptr);
double direct_ofdm(std::span<const double> gains, int N, double power, double gamma,
                   double* slope = nullptr);
double sfa_avg(std::span<const double> gains, int M, int N, double power, double gamma,
               double* slope = nullptr);

}  // namespace integrand

/// Time-averaged general rate
///   (M/(K N)) (1/T_s) sum_m sum_g C+(N/M + N min_{i chosen} |h_{i,g}[m]|^2 P_{i,g}[m]).
double rate_general(const ChannelTensor& channel, std::span<const PowerMatrix> power,
                    std::span<const AssignmentMatrix> assignment, const SimParams& params);

/// Instantaneous rate of one sub-function on one sub-carrier:
///   (1/N) C+(N/M + N min_{i in chosen} |h_i|^2 P_i).
double subfunction_rate_instant(std::span<const double> gains, std::span<const double> power,
                                const NodeSet& chosen, int M, int N);

/// Divisors of K in increasing order.
std::vector<int> divisors(int K);

}  // namespace comac
