#pragma once

#include "comac/combinatorics.hpp"

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace comac {

/// Quantized node data: `rows` time slots by `nodes` columns, entries in [0, p-1].
class DataMatrix {
public:
  DataMatrix(int rows, int nodes, int alphabet);

  int rows() const noexcept { return rows_; }
  int nodes() const noexcept { return nodes_; }
  int alphabet() const noexcept { return alphabet_; }

  int& at(int row, int node) { return values_[static_cast<std::size_t>(row) * nodes_ + node]; }
  int at(int row, int node) const { return values_[static_cast<std::size_t>(row) * nodes_ + node]; }

  std::span<const int> row(int r) const {
    return {values_.data() + static_cast<std::size_t>(r) * nodes_, static_cast<std::size_t>(nodes_)};
  }

  bool operator==(const DataMatrix&) const = default;

private:
  int rows_;
  int nodes_;
  int alphabet_;
  std::vector<int> values_;
};

/// Uniform i.i.d. symbols over [0, p-1]; deterministic under seed.
DataMatrix sample_data_matrix(int alphabet, int nodes, int rows, std::uint64_t seed);

enum class FunctionKind { ArithmeticSum, Type };

/// Either the weighted sum sum_i a_i s_i, or the type (histogram) function.
struct FunctionSpec {
  FunctionKind kind = FunctionKind::ArithmeticSum;
  int node_count = 0;
  std::vector<double> weights;  // ArithmeticSum: one weight per node
  int alphabet = 2;             // Type: histogram length p

  static FunctionSpec sum(int nodes);
  static FunctionSpec mean(int nodes);
  static FunctionSpec weighted(std::vector<double> weights);
  static FunctionSpec type(int nodes, int alphabet);

  void validate() const;
};

/// Scalar for ArithmeticSum, histogram (counts per symbol) for Type.
using FunctionValue = std::variant<double, std::vector<std::int64_t>>;

FunctionValue eval_desired(const FunctionSpec& spec, std::span<const int> row);

/// Same formula restricted to the nodes in `members`.
FunctionValue eval_subfunction(const FunctionSpec& spec, std::span<const int> row, const NodeSet& members);

/// The combiner f_c: scalar addition for sums, element-wise addition of
/// histograms for the type function.
FunctionValue reconstruct(const FunctionSpec& spec, std::span<const FunctionValue> sub_values,
                          const Combination& parts);

/// Symmetric statistics recovered from a type-function histogram.
struct TypeStatistics {
  int minimum = 0;
  int maximum = 0;
  double mean = 0.0;
  double median = 0.0;
};

TypeStatistics statistics_from_type(std::span<const std::int64_t> histogram);

}  // namespace comac
