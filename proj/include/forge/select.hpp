// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "forge/ngram_lm.hpp"

namespace forge {

// Cross-entropy difference; lower diff reads as more in-domain.
struct MLScore {
  double h_in = 0.0;   // nats/token under the in-domain model
  double h_out = 0.0;  // nats/token under the out-domain model
  double diff = 0.0;   // h_in - h_out
};

// Throws DataError when the models disagree on order or training profile.
MLScore moore_lewis_score(const NGramModel& in_model, const NGramModel& out_model,
                          const Sentence& s, const LanguageProfile& profile);

struct ScoredSentence {
  Sentence sentence;
  MLScore score;
};

// The K lowest-diff candidates, ties broken by earlier line number, sorted
// ascending by (diff, line_no).
std::vector<ScoredSentence> select_topk(const std::vector<Sentence>& candidates,
                                        const NGramModel& in_model,
                                        const NGramModel& out_model, std::size_t k,
                                        const LanguageProfile& profile, unsigned workers = 1);

// Empirical distribution of token counts, pooled at cap.
struct LengthHistogram {
  std::map<int, double> buckets;  // token count -> probability
  int cap = 150;

  int bucket_of(std::size_t token_count) const {
    return static_cast<int>(std::min<std::size_t>(token_count, static_cast<std::size_t>(cap)));
  }
};

LengthHistogram length_histogram(const std::vector<Sentence>& reference,
                                 const LanguageProfile& profile, int cap = 150);

// Hamilton / largest-remainder apportionment of n over nonnegative weights.
// Quotas sum to n exactly (weights must not all be zero); remainder ties go
// to the smaller bucket key.
std::map<int, std::uint64_t> apportion_largest_remainder(const std::map<int, double>& weights,
                                                         std::uint64_t n);

// Picks quota sentences whose length distribution matches hist: per-bucket
// quotas by largest remainder, lowest diff first within a bucket, shortfall
// re-apportioned over buckets that still have candidates. The seed only
// breaks exact diff ties. Output is in original line order and has size
// min(quota, |candidates|).
std::vector<ScoredSentence> sample_matched(const std::vector<ScoredSentence>& candidates,
                                           const LengthHistogram& hist, std::uint64_t quota,
                                           std::uint64_t seed, const LanguageProfile& profile);

}  // namespace forge
