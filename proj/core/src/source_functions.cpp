#include "comac/source_functions.hpp"

#include "comac/numerics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace comac {

DataMatrix::DataMatrix(int rows, int nodes, int alphabet)
    : rows_(rows), nodes_(nodes), alphabet_(alphabet) {
  if (rows < 0 || nodes < 1) throw std::invalid_argument("DataMatrix: invalid shape");
  if (alphabet < 2) throw std::invalid_argument("DataMatrix: alphabet size p must be at least 2");
  values_.assign(static_cast<std::size_t>(rows) * nodes, 0);
}

DataMatrix sample_data_matrix(int alphabet, int nodes, int rows, std::uint64_t seed) {
  DataMatrix data(rows, nodes, alphabet);
  Engine engine = make_engine(seed, Stream::SourceData, 0);
  std::uniform_int_distribution<int> symbol(0, alphabet - 1);
  for (int r = 0; r < rows; ++r) {
    for (int i = 0; i < nodes; ++i) data.at(r, i) = symbol(engine);
  }
  return data;
}

FunctionSpec FunctionSpec::sum(int nodes) { return weighted(std::vector<double>(nodes, 1.0)); }

FunctionSpec FunctionSpec::mean(int nodes) {
  return weighted(std::vector<double>(nodes, 1.0 / static_cast<double>(nodes)));
}

FunctionSpec FunctionSpec::weighted(std::vector<double> weights) {
  FunctionSpec spec;
  spec.kind = FunctionKind::ArithmeticSum;
  spec.node_count = static_cast<int>(weights.size());
  spec.weights = std::move(weights);
  spec.validate();
  return spec;
}

FunctionSpec FunctionSpec::type(int nodes, int alphabet) {
  FunctionSpec spec;
  spec.kind = FunctionKind::Type;
  spec.node_count = nodes;
  spec.alphabet = alphabet;
  spec.validate();
  return spec;
}

void FunctionSpec::validate() const {
  if (node_count < 1) throw std::invalid_argument("FunctionSpec: need at least one node");
  if (kind == FunctionKind::ArithmeticSum) {
    if (static_cast<int>(weights.size()) != node_count) {
      throw std::invalid_argument("FunctionSpec: one weight per node required");
    }
  } else if (alphabet < 2) {
    throw std::invalid_argument("FunctionSpec: type function needs alphabet size p >= 2");
  }
}

namespace {

void check_row(const FunctionSpec& spec, std::span<const int> row) {
  spec.validate();
  if (static_cast<int>(row.size()) != spec.node_count) {
    throw std::invalid_argument("function evaluation: row has " + std::to_string(row.size()) +
                                " entries, expected " + std::to_string(spec.node_count));
  }
  if (spec.kind == FunctionKind::Type) {
    for (int s : row) {
      if (s < 0 || s >= spec.alphabet) throw std::invalid_argument("function evaluation: symbol outside alphabet");
    }
  }
}

template <class Indexes>
FunctionValue evaluate(const FunctionSpec& spec, std::span<const int> row, const Indexes& indexes) {
  if (spec.kind == FunctionKind::ArithmeticSum) {
    double total = 0.0;
    for (int i : indexes) total += spec.weights[i] * row[i];
    return total;
  }
  std::vector<std::int64_t> histogram(spec.alphabet, 0);
  for (int i : indexes) ++histogram[row[i]];
  return histogram;
}

}  // namespace

FunctionValue eval_desired(const FunctionSpec& spec, std::span<const int> row) {
  check_row(spec, row);
  std::vector<int> all(row.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return evaluate(spec, row, all);
}

FunctionValue eval_subfunction(const FunctionSpec& spec, std::span<const int> row, const NodeSet& members) {
  check_row(spec, row);
  for (int i : members) {
    if (i < 0 || i >= spec.node_count) {
      throw std::out_of_range("eval_subfunction: member " + std::to_string(i) + " outside node range");
    }
  }
  return evaluate(spec, row, members);
}

FunctionValue reconstruct(const FunctionSpec& spec, std::span<const FunctionValue> sub_values,
                          const Combination& parts) {
  spec.validate();
  if (!is_valid_partition(parts, spec.node_count)) {
    throw std::invalid_argument("reconstruct: parts do not form a partition of the nodes");
  }
  if (sub_values.size() != parts.size()) {
    throw std::invalid_argument("reconstruct: one sub-function value per part required");
  }
  if (spec.kind == FunctionKind::ArithmeticSum) {
    double total = 0.0;
    for (const FunctionValue& v : sub_values) total += std::get<double>(v);
    return total;
  }
  std::vector<std::int64_t> histogram(spec.alphabet, 0);
  for (const FunctionValue& v : sub_values) {
    const auto& part = std::get<std::vector<std::int64_t>>(v);
    if (static_cast<int>(part.size()) != spec.alphabet) {
      throw std::invalid_argument("reconstruct: histogram length differs from alphabet size");
    }
    for (int s = 0; s < spec.alphabet; ++s) histogram[s] += part[s];
  }
  return histogram;
}

TypeStatistics statistics_from_type(std::span<const std::int64_t> histogram) {
  std::int64_t total = 0;
  double weighted = 0.0;
  for (std::size_t s = 0; s < histogram.size(); ++s) {
    if (histogram[s] < 0) throw std::invalid_argument("statistics_from_type: negative count");
    total += histogram[s];
    weighted += static_cast<double>(s) * static_cast<double>(histogram[s]);
  }
  if (total == 0) throw std::invalid_argument("statistics_from_type: empty histogram");

  TypeStatistics stats;
  const auto first = std::find_if(histogram.begin(), histogram.end(), [](auto c) { return c > 0; });
  const auto last = std::find_if(histogram.rbegin(), histogram.rend(), [](auto c) { return c > 0; });
  stats.minimum = static_cast<int>(first - histogram.begin());
  stats.maximum = static_cast<int>(histogram.rend() - last) - 1;
  stats.mean = weighted / static_cast<double>(total);

  // k-th order statistic (0-based) read off the cumulative counts.
  auto order_stat = [&](std::int64_t k) {
    std::int64_t cumulative = 0;
    for (std::size_t s = 0; s < histogram.size(); ++s) {
      cumulative += histogram[s];
      if (cumulative > k) return static_cast<double>(s);
    }
    return static_cast<double>(histogram.size() - 1);
  };
  stats.median = total % 2 == 1 ? order_stat(total / 2)
                                 : 0.5 * (order_stat(total / 2 - 1) + order_stat(total / 2));
  return stats;
}

}  // namespace comac
