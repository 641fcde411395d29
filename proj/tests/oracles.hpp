#pragma once

// Test-only brute-force oracles, independent of the dynamic-programming path
// they check. A uniform-attachment tree on nodes 0..N is a parent vector with
// parent(m) drawn from {0..m-1}, so there are prod_{m=1}^{N} m equally likely
// shapes, each with probability 1/N!.

#include <cstdint>
#include <vector>

#include "superdist/market.hpp"

namespace oracle {

// Calls fn(parents) for every parent vector; parents[m] is the parent of m,
// parents[0] unused.
template <typename F>
void for_each_tree(std::uint32_t N, F&& fn) {
  std::vector<std::uint32_t> parents(N + 1, 0);
  while (true) {
    fn(parents);
    std::uint32_t m = N;
    while (m >= 1) {
      if (parents[m] + 1 < m) {
        ++parents[m];
        break;
      }
      parents[m] = 0;
      --m;
    }
    if (m < 1) return;
  }
}

inline double tree_probability(std::uint32_t N) {
  double p = 1.0;
  for (std::uint32_t m = 1; m <= N; ++m) p /= static_cast<double>(m);
  return p;
}

// k-th ancestor of m in the parent vector, or none (root crossed).
inline std::optional<std::uint32_t> kth_ancestor(const std::vector<std::uint32_t>& parents,
                                                 std::uint32_t m, std::uint32_t k) {
  std::uint32_t cur = m;
  for (std::uint32_t step = 0; step < k; ++step) {
    if (cur == 0) return std::nullopt;
    cur = parents[cur];
  }
  return cur;
}

// P(node n is the level-k ancestor of node m) by exhaustive enumeration.
inline double ancestor_prob(std::uint32_t n, std::uint32_t m, std::uint32_t k) {
  const double p = tree_probability(m);
  double total = 0.0;
  for_each_tree(m, [&](const std::vector<std::uint32_t>& parents) {
    const auto anc = kth_ancestor(parents, m, k);
    if (anc && *anc == n) total += p;
  });
  return total;
}

// Expected level-reward income of entry index n by exhaustive enumeration.
inline double expected_revenue(std::uint32_t n, std::uint32_t N,
                               const superdist::RemunerationScheme& scheme,
                               const superdist::PriceSchedule& schedule) {
  const double p = tree_probability(N);
  double total = 0.0;
  for_each_tree(N, [&](const std::vector<std::uint32_t>& parents) {
    double income = 0.0;
    for (std::uint32_t m = n + 1; m <= N; ++m) {
      const double price = static_cast<double>(
          schedule.price_at(static_cast<double>(m) / static_cast<double>(N)));
      for (std::uint32_t k = 1; k <= scheme.levels(); ++k) {
        const auto anc = kth_ancestor(parents, m, k);
        if (anc && *anc == n) income += scheme.level_shares[k - 1] * price;
      }
    }
    total += income * p;
  });
  return total;
}

}  // namespace oracle
