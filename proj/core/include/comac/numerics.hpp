#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace comac {

/// Thrown when K is not a multiple of M in a scenario that needs B = K/M sub-functions.
class DivisibilityError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Scenario record shared by every estimator and sweep.
///
/// `power` is linear (an SNR of x dB is 10^(x/10)). `gamma_trials` controls the
/// separate Monte Carlo run used for the power-normalization expectation.
struct SimParams {
  int K = 1;
  int M = 1;
  int N = 1;
  double power = 1.0;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0x5EED'C0DE'2020ULL;
  std::uint64_t gamma_trials = 100000;

  /// Throws std::invalid_argument on non-positive sizes, M > K, P <= 0 or zero trials.
  void validate() const;
  /// Like validate(), and additionally requires M | K (throws DivisibilityError).
  void validate_partition() const;
  /// Number of sub-functions B = K / M. Requires M | K.
  int subfunctions() const;
};

inline constexpr std::uint64_t kDefaultSeed = SimParams{}.seed;

double db_to_linear(double db);
double linear_to_db(double linear);

/// max{ 1/2 log2(x), 0 }. Negative input is a domain error.
double cplus(double x);

// Random streams. Every random quantity is drawn from an engine keyed by
// (master seed, stream id, index) so that trial i never depends on how many
// trials ran before it or on which thread ran it.
using Engine = std::mt19937_64;

enum class Stream : std::uint64_t {
  Channel = 1,
  Gamma = 2,
  SourceData = 3,
  Selftest = 4,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based substream seed: mix(mix(mix(master) ^ stream) ^ index).
std::uint64_t substream_seed(std::uint64_t master, Stream stream, std::uint64_t index);

Engine make_engine(std::uint64_t master, Stream stream, std::uint64_t index);

/// Dense row-major matrix. Rows are nodes, columns are sub-carriers
/// everywhere in this library.
template <class T>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<T> column(std::size_t c) const {
    std::vector<T> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using GainMatrix = Matrix<double>;   // |h_{i,g}|^2
using PowerMatrix = Matrix<double>;  // P_{i,g}

/// Binary K x N sub-function allocation matrix omega; column g marks the M
/// nodes that carry the sub-function on sub-carrier g.
using AssignmentMatrix = Matrix<std::uint8_t>;

/// Throws std::invalid_argument unless every column of omega has exactly M ones.
void validate_assignment(const AssignmentMatrix& omega, int M);

/// Complex frequency responses h_{i,g}[m] for K nodes, N sub-carriers and
/// a number of OFDM symbols.
///
/// Storage is symbol-major, then sub-carrier, then node, which is also the
/// generation order of draw_channel: the first N' sub-carriers of an
/// N-carrier single-symbol draw equal the N'-carrier draw with the same key.
class ChannelTensor {
public:
  ChannelTensor() = default;
  ChannelTensor(int nodes, int subcarriers, int symbols);

  int nodes() const noexcept { return nodes_; }
  int subcarriers() const noexcept { return subcarriers_; }
  int symbols() const noexcept { return symbols_; }

  std::complex<double>& at(int node, int subcarrier, int symbol);
  const std::complex<double>& at(int node, int subcarrier, int symbol) const;

  /// |h|^2 for one symbol as a K x N matrix.
  GainMatrix gains(int symbol) const;

  std::span<const std::complex<double>> entries() const noexcept { return entries_; }

  bool operator==(const ChannelTensor&) const = default;

private:
  std::size_t index(int node, int subcarrier, int symbol) const;

  int nodes_ = 0;
  int subcarriers_ = 0;
  int symbols_ = 0;
  std::vector<std::complex<double>> entries_;
};

/// i.i.d. CN(0,1) entries, keyed by (params.seed, trial).
ChannelTensor draw_channel(const SimParams& params, int symbols, std::uint64_t trial);

/// Fills `out` with i.i.d. unit-mean exponential gains |h|^2 drawn the same way
/// as draw_channel (real and imaginary parts N(0, 1/2)).
void draw_gains(Engine& engine, std::span<double> out);

/// Node indexes (0-based) sorted by descending gain, ties by ascending index.
std::vector<int> order_indexes(std::span<const double> gains);

}  // namespace comac
