#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace comac {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Sorted 0-based node indexes of one sub-function (size M).
using NodeSet = std::vector<int>;

/// Ordered tuple (tau_1, ..., tau_B) of node sets.
using Combination = std::vector<NodeSet>;

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Raised when an enumeration would exceed the configured cap. Carries the
/// exact number of elements that were requested.
class EnumerationTooLarge : public std::length_error {
public:
  EnumerationTooLarge(const std::string& what, BigInt count)
      : std::length_error(what + ": too large to enumerate (" + count.str() + " elements)"),
        count_(std::move(count)) {}

  const BigInt& count() const noexcept { return count_; }

private:
  BigInt count_;
};

BigInt binomial(int n, int k);

/// |S| = C(K, M).
BigInt count_subfunction_sets(int K, int M);

/// |Q| = prod_{l=0}^{B-1} C(K - M l, M); counts ordered tuples. Requires M | K.
BigInt count_combinations(int K, int M);

/// All size-M subsets of {0..K-1} in lexicographic order.
std::vector<NodeSet> enumerate_subfunction_sets(int K, int M,
                                                std::uint64_t cap = kDefaultEnumerationCap);

/// All ordered tuples of B = K/M disjoint size-M sets covering {0..K-1}.
/// Lexicographic in (tau_1, tau_2, ...).
std::vector<Combination> enumerate_combinations(int K, int M,
                                                std::uint64_t cap = kDefaultEnumerationCap);

/// True iff the parts are pairwise disjoint, in range, and cover {0..K-1}.
bool is_valid_partition(const Combination& parts, int K);

struct SubcarrierShare {
  Rational per_subfunction;   // |M_tau| = n / |S|
  Rational per_combination;   // |M_rho^tau| = n / (B |Q|)
};

/// Expected number of sub-carrier slots each sub-function, and each
/// (combination, sub-function) pair, receives out of n slots.
SubcarrierShare expected_subcarrier_share(const BigInt& slots, int K, int M);

/// Index of a sorted size-M subset of {0..K-1} in lexicographic order
/// (combinatorial number system). Useful for histogramming top-M sets.
std::uint64_t subset_rank(std::span<const int> sorted_members, int K);

}  // namespace comac
