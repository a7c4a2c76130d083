// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "forge/textdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "forge/unicode.hpp"

namespace forge {

namespace {

constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;

}  // namespace

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);  // b is the shorter (column) string
  const std::size_t n = a.size(), m = b.size();
  if (m == 0) return n;

  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::size_t levenshtein(std::string_view a_utf8, std::string_view b_utf8) {
  return levenshtein(uni::decode_utf8(a_utf8), uni::decode_utf8(b_utf8));
}

std::optional<std::size_t> levenshtein_within(std::u32string_view a, std::u32string_view b,
                                              std::size_t max_dist) {
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t n = a.size(), m = b.size();
  if (n - m > max_dist) return std::nullopt;
  if (m == 0) return n;  // n <= max_dist here

  // Cells with |i - j| > max_dist cannot lie on a path of cost <= max_dist;
  // the band is fenced with kInf so reads outside it lose every min().
  const std::size_t k = max_dist;
  std::vector<std::size_t> prev(n + 1, kInf), cur(n + 1, kInf);
  for (std::size_t j = 0; j <= std::min(n, k); ++j) prev[j] = j;

  // Rows iterate over b (shorter); columns over a. dist(b[0..i), a[0..j)).
  for (std::size_t i = 1; i <= m; ++i) {
    std::size_t lo = i > k ? i - k : 0;
    const std::size_t hi = std::min(n, i + k);
    if (lo == 0) {
      cur[0] = i;
      lo = 1;
    } else {
      cur[lo - 1] = kInf;
    }
    std::size_t row_min = kInf;
    for (std::size_t j = lo; j <= hi; ++j) {
      const std::size_t sub = prev[j - 1] + (b[i - 1] == a[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
      row_min = std::min(row_min, cur[j]);
    }
    if (hi + 1 <= n) cur[hi + 1] = kInf;
    if (row_min > k) return std::nullopt;
    std::swap(prev, cur);
  }
  // prev now addresses columns over a, but the answer cell is dist(b, a) == dist(a, b).
  return prev[n] <= k ? std::optional<std::size_t>(prev[n]) : std::nullopt;
}

double lev_ratio(std::u32string_view a, std::u32string_view b) {
  const std::size_t max_len = std::max(a.size(), b.size());
  if (max_len == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(max_len);
}

double lev_ratio(std::string_view a_utf8, std::string_view b_utf8) {
  return lev_ratio(uni::decode_utf8(a_utf8), uni::decode_utf8(b_utf8));
}

bool lev_ratio_at_least(std::u32string_view a, std::u32string_view b, double threshold) {
  const std::size_t max_len = std::max(a.size(), b.size());
  if (max_len == 0) return true;
  // d <= (1-t)*max is necessary for ratio >= t; +1 absorbs the rounding of
  // (1-t) so the band never excludes a qualifying distance.
  const auto band =
      static_cast<std::size_t>(std::ceil((1.0 - threshold) * static_cast<double>(max_len))) + 1;
  auto d = levenshtein_within(a, b, band);
  if (!d) return false;
  return 1.0 - static_cast<double>(*d) / static_cast<double>(max_len) >= threshold;
}

}  // namespace forge
