// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "forge/select.hpp"

#include <algorithm>
#include <cmath>

#include "forge/common.hpp"

namespace forge {

MLScore moore_lewis_score(const NGramModel& in_model, const NGramModel& out_model,
                          const Sentence& s, const LanguageProfile& profile) {
  if (in_model.order() != out_model.order()) {
    throw DataError("model order mismatch: " + std::to_string(in_model.order()) + " vs " +
                    std::to_string(out_model.order()));
  }
  if (in_model.lang() != out_model.lang() || in_model.mode() != out_model.mode()) {
    throw DataError("model profile mismatch: " + in_model.lang() + "/" +
                    std::string(mode_name(in_model.mode())) + " vs " + out_model.lang() + "/" +
                    std::string(mode_name(out_model.mode())));
  }
  MLScore score;
  score.h_in = in_model.cross_entropy(s, profile);
  score.h_out = out_model.cross_entropy(s, profile);
  score.diff = score.h_in - score.h_out;
  return score;
}

std::vector<ScoredSentence> select_topk(const std::vector<Sentence>& candidates,
                                        const NGramModel& in_model,
                                        const NGramModel& out_model, std::size_t k,
                                        const LanguageProfile& profile, unsigned workers) {
  std::vector<ScoredSentence> scored(candidates.size());
  parallel_for(candidates.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      scored[i] = ScoredSentence{candidates[i],
                                 moore_lewis_score(in_model, out_model, candidates[i], profile)};
    }
  });
  std::sort(scored.begin(), scored.end(), [](const ScoredSentence& a, const ScoredSentence& b) {
    if (a.score.diff != b.score.diff) return a.score.diff < b.score.diff;
    return a.sentence.line_no < b.sentence.line_no;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

LengthHistogram length_histogram(const std::vector<Sentence>& reference,
                                 const LanguageProfile& profile, int cap) {
  if (reference.empty()) throw DataError("length histogram needs a nonempty reference");
  if (cap <= 0) throw UsageError("length histogram cap must be positive");

  LengthHistogram hist;
  hist.cap = cap;
  std::map<int, std::uint64_t> counts;
  for (const auto& s : reference) ++counts[hist.bucket_of(count_tokens(s, profile))];
  for (const auto& [bucket, count] : counts) {
    hist.buckets[bucket] =
        static_cast<double>(count) / static_cast<double>(reference.size());
  }
  return hist;
}

std::map<int, std::uint64_t> apportion_largest_remainder(const std::map<int, double>& weights,
                                                         std::uint64_t n) {
  double total = 0.0;
  for (const auto& [_, w] : weights) {
    if (w < 0.0) throw UsageError("apportionment weights must be nonnegative");
    total += w;
  }
  if (weights.empty() || total <= 0.0) {
    throw UsageError("apportionment needs positive total weight");
  }

  std::map<int, std::uint64_t> quotas;
  struct Rem {
    double remainder;
    int bucket;
  };
  std::vector<Rem> remainders;
  std::uint64_t assigned = 0;
  for (const auto& [bucket, w] : weights) {
    const double exact = static_cast<double>(n) * (w / total);
    const auto base = static_cast<std::uint64_t>(std::floor(exact));
    quotas[bucket] = base;
    assigned += base;
    remainders.push_back(Rem{exact - std::floor(exact), bucket});
  }
  std::sort(remainders.begin(), remainders.end(), [](const Rem& a, const Rem& b) {
    if (a.remainder != b.remainder) return a.remainder > b.remainder;
    return a.bucket < b.bucket;
  });
  for (std::size_t i = 0; assigned < n; ++i) {
    ++quotas[remainders[i % remainders.size()].bucket];
    ++assigned;
  }
  return quotas;
}

std::vector<ScoredSentence> sample_matched(const std::vector<ScoredSentence>& candidates,
                                           const LengthHistogram& hist, std::uint64_t quota,
                                           std::uint64_t seed, const LanguageProfile& profile) {
  if (quota == 0 || candidates.empty()) return {};

  // Bucketed candidate indices, best (lowest diff) first. The seed feeds a
  // per-line tie key so exact-diff ties are stable but seed-dependent.
  std::map<int, std::vector<std::size_t>> pools;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    pools[hist.bucket_of(count_tokens(candidates[i].sentence, profile))].push_back(i);
  }
  auto tie_key = [seed](const ScoredSentence& s) {
    return mix64(seed ^ mix64(s.sentence.line_no));
  };
  for (auto& [_, pool] : pools) {
    std::sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
      if (candidates[a].score.diff != candidates[b].score.diff) {
        return candidates[a].score.diff < candidates[b].score.diff;
      }
      const auto ka = tie_key(candidates[a]), kb = tie_key(candidates[b]);
      if (ka != kb) return ka < kb;
      return candidates[a].sentence.line_no < candidates[b].sentence.line_no;
    });
  }

  const std::uint64_t target = std::min<std::uint64_t>(quota, candidates.size());
  std::map<int, std::size_t> taken;  // per bucket
  std::uint64_t total_taken = 0;

  // First round apportions over the full histogram; further rounds
  // re-apportion the shortfall over buckets that still have candidates.
  std::map<int, double> weights(hist.buckets);
  while (total_taken < target) {
    double live_weight = 0.0;
    std::map<int, double> live;
    for (const auto& [bucket, w] : weights) {
      auto it = pools.find(bucket);
      if (w > 0.0 && it != pools.end() && taken[bucket] < it->second.size()) {
        live[bucket] = w;
        live_weight += w;
      }
    }
    if (live.empty() || live_weight <= 0.0) {
      // Histogram mass exhausted: fall back to the globally best remaining.
      std::vector<std::size_t> rest;
      for (const auto& [bucket, pool] : pools) {
        for (std::size_t i = taken[bucket]; i < pool.size(); ++i) rest.push_back(pool[i]);
      }
      std::sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
        if (candidates[a].score.diff != candidates[b].score.diff) {
          return candidates[a].score.diff < candidates[b].score.diff;
        }
        const auto ka = tie_key(candidates[a]), kb = tie_key(candidates[b]);
        if (ka != kb) return ka < kb;
        return candidates[a].sentence.line_no < candidates[b].sentence.line_no;
      });
      std::vector<std::size_t> chosen_rest(rest.begin(),
                                           rest.begin() + (target - total_taken));
      std::vector<ScoredSentence> out;
      for (const auto& [bucket, pool] : pools) {
        for (std::size_t i = 0; i < taken[bucket]; ++i) out.push_back(candidates[pool[i]]);
      }
      for (std::size_t idx : chosen_rest) out.push_back(candidates[idx]);
      std::sort(out.begin(), out.end(), [](const ScoredSentence& a, const ScoredSentence& b) {
        return a.sentence.line_no < b.sentence.line_no;
      });
      return out;
    }

    // Every live bucket has at least one candidate left and the quotas sum to
    // the shortfall, so each round takes at least one sentence.
    const auto quotas = apportion_largest_remainder(live, target - total_taken);
    for (const auto& [bucket, q] : quotas) {
      const auto& pool = pools[bucket];
      const std::size_t available = pool.size() - taken[bucket];
      const std::size_t take = std::min<std::size_t>(q, available);
      taken[bucket] += take;
      total_taken += take;
    }
  }

  std::vector<ScoredSentence> out;
  out.reserve(total_taken);
  for (const auto& [bucket, pool] : pools) {
    for (std::size_t i = 0; i < taken[bucket]; ++i) out.push_back(candidates[pool[i]]);
  }
  std::sort(out.begin(), out.end(), [](const ScoredSentence& a, const ScoredSentence& b) {
    return a.sentence.line_no < b.sentence.line_no;
  });
  return out;
}

}  // namespace forge
