#include "comac/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace comac {

void SimParams::validate() const {
  if (K < 1) throw std::invalid_argument("K must be a positive integer");
  if (M < 1) throw std::invalid_argument("M must be a positive integer");
  if (N < 1) throw std::invalid_argument("N must be a positive integer");
  if (M > K) throw std::invalid_argument("M must not exceed K");
  if (!(power > 0.0) || !std::isfinite(power)) throw std::invalid_argument("power P must be positive and finite");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (gamma_trials < 1) throw std::invalid_argument("gamma_trials must be at least 1");
}

void SimParams::validate_partition() const {
  validate();
  if (K % M != 0) {
    throw DivisibilityError("M must divide K (B = K/M sub-functions); got K=" + std::to_string(K) +
                            ", M=" + std::to_string(M));
  }
}

int SimParams::subfunctions() const {
  if (M < 1 || K % M != 0) throw DivisibilityError("M must divide K");
  return K / M;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double cplus(double x) {
  if (std::isnan(x) || x < 0.0) throw std::domain_error("cplus: argument must be non-negative");
  if (x <= 1.0) return 0.0;
  return 0.5 * std::log2(x);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t master, Stream stream, std::uint64_t index) {
  return mix64(mix64(mix64(master) ^ static_cast<std::uint64_t>(stream)) ^ index);
}

Engine make_engine(std::uint64_t master, Stream stream, std::uint64_t index) {
  return Engine(substream_seed(master, stream, index));
}

ChannelTensor::ChannelTensor(int nodes, int subcarriers, int symbols)
    : nodes_(nodes), subcarriers_(subcarriers), symbols_(symbols) {
  if (nodes < 1 || subcarriers < 1 || symbols < 1) {
    throw std::invalid_argument("ChannelTensor dimensions must be positive");
  }
  entries_.resize(static_cast<std::size_t>(nodes) * subcarriers * symbols);
}

std::size_t ChannelTensor::index(int node, int subcarrier, int symbol) const {
  if (node < 0 || node >= nodes_ || subcarrier < 0 || subcarrier >= subcarriers_ || symbol < 0 ||
      symbol >= symbols_) {
    throw std::out_of_range("ChannelTensor index out of range");
  }
  return (static_cast<std::size_t>(symbol) * subcarriers_ + subcarrier) * nodes_ + node;
}

std::complex<double>& ChannelTensor::at(int node, int subcarrier, int symbol) {
  return entries_[index(node, subcarrier, symbol)];
}

const std::complex<double>& ChannelTensor::at(int node, int subcarrier, int symbol) const {
  return entries_[index(node, subcarrier, symbol)];
}

GainMatrix ChannelTensor::gains(int symbol) const {
  GainMatrix out(nodes_, subcarriers_);
  for (int g = 0; g < subcarriers_; ++g) {
    for (int i = 0; i < nodes_; ++i) out(i, g) = std::norm(at(i, g, symbol));
  }
  return out;
}

namespace {

// Real and imaginary parts are N(0, 1/2) so that E|h|^2 = 1.
const double kComponentScale = std::sqrt(0.5);

std::complex<double> draw_entry(Engine& engine, std::normal_distribution<double>& normal) {
  const double re = kComponentScale * normal(engine);
  const double im = kComponentScale * normal(engine);
  return {re, im};
}

}  // namespace

ChannelTensor draw_channel(const SimParams& params, int symbols, std::uint64_t trial) {
  params.validate();
  ChannelTensor tensor(params.K, params.N, symbols);
  Engine engine = make_engine(params.seed, Stream::Channel, trial);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int m = 0; m < symbols; ++m) {
    for (int g = 0; g < params.N; ++g) {
      for (int i = 0; i < params.K; ++i) tensor.at(i, g, m) = draw_entry(engine, normal);
    }
  }
  return tensor;
}

void draw_gains(Engine& engine, std::span<double> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out) v = std::norm(draw_entry(engine, normal));
}

void validate_assignment(const AssignmentMatrix& omega, int M) {
  for (std::size_t g = 0; g < omega.cols(); ++g) {
    int ones = 0;
    for (std::size_t i = 0; i < omega.rows(); ++i) {
      const auto w = omega(i, g);
      if (w > 1) throw std::invalid_argument("assignment entries must be 0 or 1");
      ones += w;
    }
    if (ones != M) {
      throw std::invalid_argument("assignment column " + std::to_string(g) + " has " + std::to_string(ones) +
                                  " chosen nodes, expected M=" + std::to_string(M));
    }
  }
}

std::vector<int> order_indexes(std::span<const double> gains) {
  if (gains.empty()) throw std::invalid_argument("order_indexes: empty gain sequence");
  for (double g : gains) {
    if (std::isnan(g) || g < 0.0) throw std::invalid_argument("order_indexes: gains must be non-negative");
  }
  std::vector<int> idx(gains.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return gains[a] > gains[b]; });
  return idx;
}

}  // namespace comac
