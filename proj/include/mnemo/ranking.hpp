#ifndef MNEMO_RANKING_HPP
#define MNEMO_RANKING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "mnemo/error.hpp"

namespace mnemo {

// Dense ranks, 1 = best. Tied raw scores share a rank and the next distinct
// value takes the next integer.
inline std::vector<int> dense_ranks(const std::vector<double>& scores,
                                    bool higher_is_better) {
  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return higher_is_better ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  std::vector<int> ranks(n, 0);
  int rank = 0;
  for (size_t i = 0; i < n; ++i) {
    if (i == 0 || scores[order[i]] != scores[order[i - 1]]) ++rank;
    ranks[order[i]] = rank;
  }
  return ranks;
}

inline double geometric_mean(const std::vector<int>& ranks) {
  if (ranks.empty()) throw Error("geometric_mean: no ranks");
  double log_sum = 0;
  for (int r : ranks) {
    if (r < 1) throw Error("geometric_mean: rank < 1");
    log_sum += std::log(static_cast<double>(r));
  }
  return std::exp(log_sum / static_cast<double>(ranks.size()));
}

// Best-first candidate order by ascending aggregate. Equal aggregates are
// broken by a seeded shuffle applied before the stable sort, so the order is
// random across seeds but fixed for a given seed.
inline std::vector<size_t> order_by_aggregate(
    const std::vector<double>& aggregates, std::uint64_t seed) {
  std::vector<size_t> idx(aggregates.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return aggregates[a] < aggregates[b];
  });
  return idx;
}

} // namespace mnemo

#endif
