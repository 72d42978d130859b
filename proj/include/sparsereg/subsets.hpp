#pragma once

#include <cstdint>
#include <vector>

namespace sparsereg {

// C(n, k) saturating at a large sentinel to avoid overflow in budget math.
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  constexpr std::uint64_t cap = 1ULL << 62;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    if (c > cap / static_cast<std::uint64_t>(n - k + i)) return cap;
    c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return c;
}

// rank-th k-subset of {0,...,n-1} in lexicographic order.
inline std::vector<int> unrank_combination(std::uint64_t rank, int k, int n) {
  std::vector<int> out;
  out.reserve(k);
  int start = 0;
  for (int slot = 0; slot < k; ++slot) {
    for (int v = start; v <= n - (k - slot); ++v) {
      const std::uint64_t block = binomial(n - v - 1, k - slot - 1);
      if (rank < block) {
        out.push_back(v);
        start = v + 1;
        break;
      }
      rank -= block;
    }
  }
  return out;
}

// Lexicographic successor over subsets of {0,...,n-1}; returns false after
// the last combination.
inline bool next_combination(std::vector<int>& comb, int n) {
  const int k = static_cast<int>(comb.size());
  if (k == 0) return false;
  int i = k - 1;
  while (i >= 0 && comb[i] == n - k + i) --i;
  if (i < 0) return false;
  ++comb[i];
  for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  return true;
}

}  // namespace sparsereg
