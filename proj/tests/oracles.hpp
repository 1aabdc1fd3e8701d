#ifndef MNEMO_TEST_ORACLES_HPP
#define MNEMO_TEST_ORACLES_HPP

#include <functional>
#include <string>
#include <vector>

// Independent oracles used by unit and acceptance tests. These follow the
// textbook definitions directly and stay separate from the library code
// they check.

namespace oracle {

// Levenshtein distance straight from the recursive definition (memoized).
inline size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::vector<long>> memo(a.size() + 1,
                                      std::vector<long>(b.size() + 1, -1));
  std::function<size_t(size_t, size_t)> rec = [&](size_t i, size_t j) -> size_t {
    if (i == 0) return j;
    if (j == 0) return i;
    if (memo[i][j] >= 0) return static_cast<size_t>(memo[i][j]);
    size_t del = rec(i - 1, j) + 1;
    size_t ins = rec(i, j - 1) + 1;
    size_t sub = rec(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
    size_t best = std::min({del, ins, sub});
    memo[i][j] = static_cast<long>(best);
    return best;
  };
  return rec(a.size(), b.size());
}

// Exhaustive search over all index assignments: does `needle` occur in
// `haystack` as an in-order subsequence?
inline bool subsequence_exists(const std::vector<std::string>& needle,
                               const std::vector<std::string>& haystack,
                               size_t ni = 0, size_t hi = 0) {
  if (ni == needle.size()) return true;
  for (size_t h = hi; h < haystack.size(); ++h) {
    if (haystack[h] == needle[ni] &&
        subsequence_exists(needle, haystack, ni + 1, h + 1))
      return true;
  }
  return false;
}

// All strings over `alphabet` with length <= max_len.
inline std::vector<std::string> all_strings(const std::string& alphabet,
                                            size_t max_len) {
  std::vector<std::string> out{""};
  size_t level_start = 0;
  for (size_t len = 1; len <= max_len; ++len) {
    size_t level_end = out.size();
    for (size_t i = level_start; i < level_end; ++i)
      for (char c : alphabet) out.push_back(out[i] + c);
    level_start = level_end;
  }
  return out;
}

} // namespace oracle

#endif
