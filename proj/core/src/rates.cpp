#include "comac/rates.hpp"

#include "comac/power.hpp"
#include "summation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

namespace comac {

namespace {

constexpr std::uint64_t kGammaChunk = 4096;

// Fills `sorted` with the descending order statistics of one gain draw.
void descending(std::span<const double> gains, std::vector<double>& sorted) {
  sorted.assign(gains.begin(), gains.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
}

// M-th largest (1-based) of a column, without a full sort.
double order_statistic(std::span<const double> gains, int M) {
  std::vector<double> copy(gains.begin(), gains.end());
  auto nth = copy.begin() + (M - 1);
  std::nth_element(copy.begin(), nth, copy.end(), std::greater<>());
  return *nth;
}

void check_column(std::span<const double> gains, int M) {
  if (gains.empty()) throw std::invalid_argument("rate integrand: empty gain column");
  if (M < 1 || M > static_cast<int>(gains.size())) throw std::invalid_argument("rate integrand: need 1 <= M <= K");
}

// c * C+(a + b / gamma) and its derivative in gamma.
double scaled_cplus(double scale, double offset, double numerator, double gamma, double* slope) {
  const double arg = offset + numerator / gamma;
  const double value = scale * cplus(arg);
  if (slope != nullptr) {
    *slope = arg > 1.0 ? -scale * numerator / (gamma * gamma) / (arg * 2.0 * std::numbers::ln2) : 0.0;
  }
  return value;
}

// Closed forms evaluated on the relevant order statistic. The arithmetic is
// arranged so that the N = 1 single-carrier families reproduce the wide-band
// ones bit for bit.
double conventional_value(double weakest, int K, double power, double gamma, double* slope) {
  return scaled_cplus(1.0, 1.0 / K, weakest * power, gamma, slope);
}

double direct_value(double weakest, int K, int N, double power, double gamma, double* slope) {
  return scaled_cplus(1.0, static_cast<double>(N) / K, weakest * power, gamma, slope);
}

double opportunistic_value(double mth, int K, int M, double power, double gamma, double* slope) {
  const int B = K / M;
  return scaled_cplus(1.0 / B, 1.0 / M, mth * K * power / M, gamma, slope);
}

double sfa_value(double mth, int K, int M, int N, double power, double gamma, double* slope) {
  return scaled_cplus(static_cast<double>(M) / K, static_cast<double>(N) / M, mth * K * power / M, gamma, slope);
}

RateEstimate finalize(RateFamily family, const SimParams& params, const RateSamples& samples) {
  const auto stats = detail::mean_and_error(samples.values);
  const auto slope = detail::mean_and_error(samples.gamma_slope);
  const double gamma_part = slope.mean * samples.gamma.std_error;
  RateEstimate est;
  est.family = family;
  est.mean = stats.mean;
  est.std_error = std::sqrt(stats.std_error * stats.std_error + gamma_part * gamma_part);
  est.trials = samples.values.size();
  est.params = params;
  return est;
}

void validate_for(RateFamily family, const SimParams& params) {
  if (needs_partition(family)) {
    params.validate_partition();
  } else {
    params.validate();
  }
}

}  // namespace

GammaEstimate GammaProfile::at(int M) const {
  if (M < 1 || M > K) throw std::invalid_argument("GammaProfile::at: need 1 <= M <= K");
  return {value[M - 1], std_error[M - 1], K, M, trials};
}

GammaProfile estimate_gamma_profile(int K, std::uint64_t trials, std::uint64_t seed, const Execution& exec) {
  if (K < 1) throw std::invalid_argument("estimate_gamma: K must be positive");
  if (trials < 1) throw std::invalid_argument("estimate_gamma: trials must be positive");

  // Fixed-size chunks keep the reduction order independent of the thread count.
  const std::uint64_t chunks = (trials + kGammaChunk - 1) / kGammaChunk;
  struct ChunkSums {
    std::vector<detail::CompensatedSum> s1, s2;
  };
  std::vector<ChunkSums> partial(chunks);

  parallel_for(chunks, exec, [&](std::size_t c) {
    ChunkSums& sums = partial[c];
    sums.s1.resize(K);
    sums.s2.resize(K);
    std::vector<double> gains(K), sorted;
    const std::uint64_t begin = c * kGammaChunk;
    const std::uint64_t end = std::min(trials, begin + kGammaChunk);
    for (std::uint64_t t = begin; t < end; ++t) {
      Engine engine = make_engine(seed, Stream::Gamma, t);
      draw_gains(engine, gains);
      descending(gains, sorted);
      // sample(M) = (1/M) sum_{j<=M} g_(M)/g_(j); the j = M term is exactly 1.
      double inverse_sum = 0.0;  // sum_{j<M} 1/g_(j)
      for (int m = 1; m <= K; ++m) {
        const double gm = sorted[m - 1];
        const double cross = gm > 0.0 ? gm * inverse_sum : 0.0;
        const double sample = (1.0 + cross) / m;
        sums.s1[m - 1].add(sample);
        sums.s2[m - 1].add(sample * sample);
        if (gm > 0.0) inverse_sum += 1.0 / gm;
      }
    }
  });

  GammaProfile profile;
  profile.K = K;
  profile.trials = trials;
  profile.seed = seed;
  profile.value.resize(K);
  profile.std_error.resize(K);
  const double n = static_cast<double>(trials);
  for (int m = 0; m < K; ++m) {
    detail::CompensatedSum s1, s2;
    for (const auto& chunk : partial) {
      s1.add(chunk.s1[m].value());
      s2.add(chunk.s2[m].value());
    }
    const double mean = s1.value() / n;
    double variance = 0.0;
    if (trials > 1) variance = std::max(0.0, (s2.value() - n * mean * mean) / (n - 1.0));
    profile.value[m] = mean;
    profile.std_error[m] = std::sqrt(variance / n);
  }
  return profile;
}

GammaEstimate estimate_gamma(int K, int M, std::uint64_t trials, std::uint64_t seed, const Execution& exec) {
  if (M < 1 || M > K) throw std::invalid_argument("estimate_gamma: need 1 <= M <= K");
  return estimate_gamma_profile(K, trials, seed, exec).at(M);
}

std::shared_ptr<const GammaProfile> cached_gamma_profile(int K, std::uint64_t trials, std::uint64_t seed,
                                                         const Execution& exec) {
  static std::mutex mutex;
  static std::map<std::tuple<int, std::uint64_t, std::uint64_t>, std::shared_ptr<const GammaProfile>> cache;
  const auto key = std::make_tuple(K, trials, seed);
  std::lock_guard lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto profile = std::make_shared<const GammaProfile>(estimate_gamma_profile(K, trials, seed, exec));
  cache.emplace(key, profile);
  return profile;
}

std::string_view family_name(RateFamily family) {
  switch (family) {
    case RateFamily::Conventional: return "conventional";
    case RateFamily::Opportunistic: return "opportunistic";
    case RateFamily::DirectOfdm: return "direct-ofdm";
    case RateFamily::SfaAvg: return "sfa-avg";
    case RateFamily::SfaOpa: return "sfa-opa";
  }
  return "unknown";
}

std::optional<RateFamily> parse_family(std::string_view name) {
  for (RateFamily f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

bool needs_partition(RateFamily family) {
  return family == RateFamily::Opportunistic || family == RateFamily::SfaAvg || family == RateFamily::SfaOpa;
}

bool uses_all_nodes(RateFamily family) {
  return family == RateFamily::Conventional || family == RateFamily::DirectOfdm;
}

namespace integrand {

double conventional(std::span<const double> gains, double power, double gamma, double* slope) {
  check_column(gains, 1);
  const int K = static_cast<int>(gains.size());
  return conventional_value(*std::min_element(gains.begin(), gains.end()), K, power, gamma, slope);
}

double opportunistic(std::span<const double> gains, int M, double power, double gamma, double* slope) {
  check_column(gains, M);
  const int K = static_cast<int>(gains.size());
  if (K % M != 0) throw DivisibilityError("opportunistic rate: M must divide K");
  return opportunistic_value(order_statistic(gains, M), K, M, power, gamma, slope);
}

double direct_ofdm(std::span<const double> gains, int N, double power, double gamma, double* slope) {
  check_column(gains, 1);
  const int K = static_cast<int>(gains.size());
  return direct_value(*std::min_element(gains.begin(), gains.end()), K, N, power, gamma, slope);
}

double sfa_avg(std::span<const double> gains, int M, int N, double power, double gamma, double* slope) {
  check_column(gains, M);
  const int K = static_cast<int>(gains.size());
  if (K % M != 0) throw DivisibilityError("sfa rate: M must divide K");
  return sfa_value(order_statistic(gains, M), K, M, N, power, gamma, slope);
}

}  // namespace integrand

RateSamples sample_rates(RateFamily family, const SimParams& params, const Execution& exec) {
  validate_for(family, params);
  const int K = params.K;
  const int M = params.M;
  const int N = params.N;
  const std::uint64_t trials = params.trials;

  RateSamples out;
  out.values.resize(trials);
  out.gamma_slope.assign(trials, 0.0);

  if (family == RateFamily::SfaOpa) {
    out.gamma = GammaEstimate{1.0, 0.0, K, M, 0};
    parallel_for(trials, exec, [&](std::size_t t) {
      Engine engine = make_engine(params.seed, Stream::Channel, t);
      std::vector<double> buffer(static_cast<std::size_t>(K) * N);
      draw_gains(engine, buffer);
      GainMatrix gains(K, N);
      for (int g = 0; g < N; ++g) {
        for (int i = 0; i < K; ++i) gains(i, g) = buffer[static_cast<std::size_t>(g) * K + i];
      }
      const AssignmentMatrix omega = build_assignment(gains, M);
      out.values[t] = sponge_squeeze(gains, omega, params).objective;
    });
    return out;
  }

  const int gamma_m = uses_all_nodes(family) ? K : M;
  const auto profile = cached_gamma_profile(K, params.gamma_trials, params.seed, exec);
  out.gamma = profile->at(gamma_m);
  const double gamma = out.gamma.value;
  const bool single_carrier = family == RateFamily::Conventional || family == RateFamily::Opportunistic;
  const int carriers = single_carrier ? 1 : N;

  parallel_for(trials, exec, [&](std::size_t t) {
    Engine engine = make_engine(params.seed, Stream::Channel, t);
    std::vector<double> buffer(static_cast<std::size_t>(K) * carriers);
    draw_gains(engine, buffer);
    double total = 0.0;
    double slope_total = 0.0;
    for (int g = 0; g < carriers; ++g) {
      const std::span<const double> column(buffer.data() + static_cast<std::size_t>(g) * K, K);
      double slope = 0.0;
      switch (family) {
        case RateFamily::Conventional: total += integrand::conventional(column, params.power, gamma, &slope); break;
        case RateFamily::Opportunistic:
          total += integrand::opportunistic(column, M, params.power, gamma, &slope);
          break;
        case RateFamily::DirectOfdm: total += integrand::direct_ofdm(column, N, params.power, gamma, &slope); break;
        case RateFamily::SfaAvg: total += integrand::sfa_avg(column, M, N, params.power, gamma, &slope); break;
        case RateFamily::SfaOpa: break;
      }
      slope_total += slope;
    }
    out.values[t] = total / carriers;
    out.gamma_slope[t] = slope_total / carriers;
  });
  return out;
}

RateEstimate estimate_rate(RateFamily family, const SimParams& params, const Execution& exec) {
  return finalize(family, params, sample_rates(family, params, exec));
}

RateEstimate rate_conventional(const SimParams& params, const Execution& exec) {
  return estimate_rate(RateFamily::Conventional, params, exec);
}
RateEstimate rate_opportunistic(const SimParams& params, const Execution& exec) {
  return estimate_rate(RateFamily::Opportunistic, params, exec);
}
RateEstimate rate_direct_ofdm(const SimParams& params, const Execution& exec) {
  return estimate_rate(RateFamily::DirectOfdm, params, exec);
}
RateEstimate rate_sfa_avg(const SimParams& params, const Execution& exec) {
  return estimate_rate(RateFamily::SfaAvg, params, exec);
}
RateEstimate rate_sfa_opa(const SimParams& params, const Execution& exec) {
  return estimate_rate(RateFamily::SfaOpa, params, exec);
}

std::vector<RateEstimate> rate_sfa_avg_profile(const SimParams& params, std::span<const int> m_values,
                                               const Execution& exec) {
  for (int M : m_values) {
    SimParams p = params;
    p.M = M;
    p.validate_partition();
  }
  const int K = params.K;
  const int N = params.N;
  const std::size_t count = m_values.size();
  const auto profile = cached_gamma_profile(K, params.gamma_trials, params.seed, exec);

  std::vector<RateSamples> samples(count);
  for (std::size_t k = 0; k < count; ++k) {
    samples[k].values.resize(params.trials);
    samples[k].gamma_slope.resize(params.trials);
    samples[k].gamma = profile->at(m_values[k]);
  }

  parallel_for(params.trials, exec, [&](std::size_t t) {
    Engine engine = make_engine(params.seed, Stream::Channel, t);
    std::vector<double> buffer(static_cast<std::size_t>(K) * N), sorted;
    draw_gains(engine, buffer);
    std::vector<double> totals(count, 0.0), slopes(count, 0.0);
    for (int g = 0; g < N; ++g) {
      descending(std::span<const double>(buffer.data() + static_cast<std::size_t>(g) * K, K), sorted);
      for (std::size_t k = 0; k < count; ++k) {
        const int M = m_values[k];
        double slope = 0.0;
        totals[k] += sfa_value(sorted[M - 1], K, M, N, params.power, samples[k].gamma.value, &slope);
        slopes[k] += slope;
      }
    }
    for (std::size_t k = 0; k < count; ++k) {
      samples[k].values[t] = totals[k] / N;
      samples[k].gamma_slope[t] = slopes[k] / N;
    }
  });

  std::vector<RateEstimate> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    SimParams p = params;
    p.M = m_values[k];
    out.push_back(finalize(RateFamily::SfaAvg, p, samples[k]));
  }
  return out;
}

double rate_general(const ChannelTensor& channel, std::span<const PowerMatrix> power,
                    std::span<const AssignmentMatrix> assignment, const SimParams& params) {
  params.validate();
  const int K = params.K;
  const int M = params.M;
  const int N = params.N;
  const int symbols = channel.symbols();
  if (channel.nodes() != K || channel.subcarriers() != N) {
    throw std::invalid_argument("rate_general: channel shape does not match K x N");
  }
  if (static_cast<int>(power.size()) != symbols || static_cast<int>(assignment.size()) != symbols) {
    throw std::invalid_argument("rate_general: need one power and one assignment matrix per symbol");
  }
  double total = 0.0;
  for (int m = 0; m < symbols; ++m) {
    const PowerMatrix& p = power[m];
    const AssignmentMatrix& omega = assignment[m];
    if (p.rows() != static_cast<std::size_t>(K) || p.cols() != static_cast<std::size_t>(N) ||
        omega.rows() != p.rows() || omega.cols() != p.cols()) {
      throw std::invalid_argument("rate_general: power/assignment shape does not match K x N");
    }
    validate_assignment(omega, M);
    for (int g = 0; g < N; ++g) {
      double weakest = std::numeric_limits<double>::infinity();
      for (int i = 0; i < K; ++i) {
        if (p(i, g) < 0.0) throw std::invalid_argument("rate_general: negative power");
        if (omega(i, g)) weakest = std::min(weakest, std::norm(channel.at(i, g, m)) * p(i, g));
      }
      total += cplus(static_cast<double>(N) / M + N * weakest);
    }
  }
  return static_cast<double>(M) / (static_cast<double>(K) * N) * (total / symbols);
}

double subfunction_rate_instant(std::span<const double> gains, std::span<const double> power,
                                const NodeSet& chosen, int M, int N) {
  if (chosen.empty()) throw std::invalid_argument("subfunction_rate_instant: empty chosen set");
  if (gains.size() != power.size()) throw std::invalid_argument("subfunction_rate_instant: size mismatch");
  if (M < 1 || N < 1) throw std::invalid_argument("subfunction_rate_instant: M and N must be positive");
  double weakest = std::numeric_limits<double>::infinity();
  for (int i : chosen) {
    if (i < 0 || static_cast<std::size_t>(i) >= gains.size()) {
      throw std::out_of_range("subfunction_rate_instant: chosen node out of range");
    }
    weakest = std::min(weakest, gains[i] * power[i]);
  }
  return cplus(static_cast<double>(N) / M + N * weakest) / N;
}

std::vector<int> divisors(int K) {
  if (K < 1) throw std::invalid_argument("divisors: K must be positive");
  std::vector<int> out;
  for (int d = 1; d <= K; ++d) {
    if (K % d == 0) out.push_back(d);
  }
  return out;
}

}  // namespace comac
