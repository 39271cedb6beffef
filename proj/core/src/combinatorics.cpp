#include "comac/combinatorics.hpp"

#include "comac/numerics.hpp"

#include <algorithm>
#include <numeric>

namespace comac {

namespace {

void check_sizes(int K, int M) {
  if (K < 1 || M < 1 || M > K) {
    throw std::invalid_argument("combinatorics: need 1 <= M <= K (got K=" + std::to_string(K) +
                                ", M=" + std::to_string(M) + ")");
  }
}

void check_partition_sizes(int K, int M) {
  check_sizes(K, M);
  if (K % M != 0) {
    throw DivisibilityError("combinatorics: M must divide K (got K=" + std::to_string(K) +
                                ", M=" + std::to_string(M) + ")");
  }
}

// Advances a sorted k-subset of `pool` positions to the next one in
// lexicographic order. Returns false after the last subset.
bool next_subset(std::vector<int>& pos, int n) {
  const int k = static_cast<int>(pos.size());
  int i = k - 1;
  while (i >= 0 && pos[i] == n - k + i) --i;
  if (i < 0) return false;
  ++pos[i];
  for (int j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
  return true;
}

void extend_combinations(const std::vector<int>& remaining, int M, Combination& prefix,
                         std::vector<Combination>& out) {
  if (remaining.empty()) {
    out.push_back(prefix);
    return;
  }
  const int n = static_cast<int>(remaining.size());
  std::vector<int> pos(M);
  std::iota(pos.begin(), pos.end(), 0);
  do {
    NodeSet part(M);
    std::vector<char> taken(n, 0);
    for (int j = 0; j < M; ++j) {
      part[j] = remaining[pos[j]];
      taken[pos[j]] = 1;
    }
    std::vector<int> rest;
    rest.reserve(n - M);
    for (int j = 0; j < n; ++j) {
      if (!taken[j]) rest.push_back(remaining[j]);
    }
    prefix.push_back(std::move(part));
    extend_combinations(rest, M, prefix, out);
    prefix.pop_back();
  } while (next_subset(pos, n));
}

}  // namespace

BigInt binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt result = 1;
  for (int i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

BigInt count_subfunction_sets(int K, int M) {
  check_sizes(K, M);
  return binomial(K, M);
}

BigInt count_combinations(int K, int M) {
  check_partition_sizes(K, M);
  BigInt product = 1;
  for (int l = 0; l < K / M; ++l) product *= binomial(K - M * l, M);
  return product;
}

std::vector<NodeSet> enumerate_subfunction_sets(int K, int M, std::uint64_t cap) {
  const BigInt count = count_subfunction_sets(K, M);
  if (count > cap) throw EnumerationTooLarge("enumerate_subfunction_sets", count);
  std::vector<NodeSet> out;
  out.reserve(count.convert_to<std::size_t>());
  NodeSet pos(M);
  std::iota(pos.begin(), pos.end(), 0);
  do {
    out.push_back(pos);
  } while (next_subset(pos, K));
  return out;
}

std::vector<Combination> enumerate_combinations(int K, int M, std::uint64_t cap) {
  const BigInt count = count_combinations(K, M);
  if (count > cap) throw EnumerationTooLarge("enumerate_combinations", count);
  std::vector<Combination> out;
  out.reserve(count.convert_to<std::size_t>());
  std::vector<int> all(K);
  std::iota(all.begin(), all.end(), 0);
  Combination prefix;
  extend_combinations(all, M, prefix, out);
  return out;
}

bool is_valid_partition(const Combination& parts, int K) {
  if (K < 1) return false;
  std::vector<char> seen(K, 0);
  int covered = 0;
  for (const NodeSet& part : parts) {
    for (int node : part) {
      if (node < 0 || node >= K || seen[node]) return false;
      seen[node] = 1;
      ++covered;
    }
  }
  return covered == K;
}

SubcarrierShare expected_subcarrier_share(const BigInt& slots, int K, int M) {
  if (slots <= 0) throw std::invalid_argument("expected_subcarrier_share: slot count must be positive");
  const BigInt s = count_subfunction_sets(K, M);
  const BigInt q = count_combinations(K, M);
  const BigInt b = K / M;
  return {Rational(slots, s), Rational(slots, b * q)};
}

std::uint64_t subset_rank(std::span<const int> sorted_members, int K) {
  // Lexicographic rank: count the subsets that precede it position by position.
  const int M = static_cast<int>(sorted_members.size());
  std::uint64_t rank = 0;
  int prev = -1;
  for (int j = 0; j < M; ++j) {
    for (int v = prev + 1; v < sorted_members[j]; ++v) {
      rank += binomial(K - 1 - v, M - 1 - j).convert_to<std::uint64_t>();
    }
    prev = sorted_members[j];
  }
  return rank;
}

}  // namespace comac
