// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace forge {

// Edit distance over Unicode scalar values (insert/delete/substitute, unit
// cost). Two-row DP, O(min(|a|,|b|)) memory.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a_utf8, std::string_view b_utf8);

// Banded variant for threshold checks: returns the exact distance when it is
// <= max_dist, nullopt otherwise. Cost is O((max_dist+1) * min(|a|,|b|)).
std::optional<std::size_t> levenshtein_within(std::u32string_view a, std::u32string_view b,
                                              std::size_t max_dist);

// 1 - d / max(|a|,|b|); 1.0 when both strings are empty.
double lev_ratio(std::u32string_view a, std::u32string_view b);
double lev_ratio(std::string_view a_utf8, std::string_view b_utf8);

// ratio(a,b) >= threshold, computed with the banded kernel so dissimilar
// pairs bail out early.
bool lev_ratio_at_least(std::u32string_view a, std::u32string_view b, double threshold);

}  // namespace forge
