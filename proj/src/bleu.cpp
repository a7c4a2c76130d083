// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "forge/bleu.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "forge/common.hpp"

namespace forge {

namespace {

// n-gram hash key with length-framed tokens, so boundaries are unambiguous.
std::string ngram_key(const std::vector<Token>& tokens, std::size_t start, int n) {
  std::string key;
  for (int k = 0; k < n; ++k) {
    const std::string& t = tokens[start + k].text;
    const std::uint32_t len = static_cast<std::uint32_t>(t.size());
    for (int b = 0; b < 4; ++b) key.push_back(static_cast<char>((len >> (8 * b)) & 0xFF));
    key += t;
  }
  return key;
}

}  // namespace

double BleuReport::precision(int n) const {
  const auto i = static_cast<std::size_t>(n - 1);
  if (total[i] == 0) return 0.0;
  return static_cast<double>(matched[i]) / static_cast<double>(total[i]);
}

double BleuReport::brevity_penalty() const {
  if (hyp_len == 0) return 0.0;
  if (hyp_len > ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
}

double BleuReport::score() const {
  double log_sum = 0.0;
  for (int n = 1; n <= 4; ++n) {
    // Orders with no n-grams anywhere (very short corpora) are skipped, so
    // identity still scores 100; a genuine zero precision zeroes the score.
    if (total[n - 1] == 0) continue;
    const double p = precision(n);
    if (p <= 0.0) return 0.0;
    log_sum += std::log(p);
  }
  return 100.0 * brevity_penalty() * std::exp(log_sum / 4.0);
}

std::pair<std::uint64_t, std::uint64_t> ngram_clip_counts(const std::vector<Token>& hyp,
                                                          const std::vector<Token>& ref, int n) {
  if (n < 1 || n > 4) throw UsageError("BLEU n-gram order must be in [1,4]");
  if (hyp.size() < static_cast<std::size_t>(n)) return {0, 0};
  const std::uint64_t total = hyp.size() - n + 1;

  std::unordered_map<std::string, std::uint64_t> hyp_counts;
  for (std::size_t i = 0; i + n <= hyp.size(); ++i) ++hyp_counts[ngram_key(hyp, i, n)];
  std::unordered_map<std::string, std::uint64_t> ref_counts;
  for (std::size_t i = 0; i + n <= ref.size(); ++i) ++ref_counts[ngram_key(ref, i, n)];

  std::uint64_t matched = 0;
  for (const auto& [key, count] : hyp_counts) {
    auto it = ref_counts.find(key);
    if (it != ref_counts.end()) matched += std::min(count, it->second);
  }
  return {matched, total};
}

BleuReport bleu_corpus_tokens(const std::vector<std::vector<Token>>& hyps,
                              const std::vector<std::vector<Token>>& refs, unsigned workers) {
  if (hyps.size() != refs.size() || hyps.empty()) {
    throw DataError("BLEU needs equal nonempty hypothesis/reference counts (" +
                    std::to_string(hyps.size()) + " vs " + std::to_string(refs.size()) + ")");
  }

  // Per-line counts aggregate additively, so chunks can run in parallel and sum.
  const unsigned shards = workers > 1 ? workers : 1;
  std::vector<BleuReport> partial(shards);
  parallel_for(hyps.size(), shards, [&](std::size_t begin, std::size_t end) {
    // Identify the shard by its range start; ranges are contiguous per worker.
    BleuReport local;
    for (std::size_t i = begin; i < end; ++i) {
      for (int n = 1; n <= 4; ++n) {
        const auto [m, t] = ngram_clip_counts(hyps[i], refs[i], n);
        local.matched[n - 1] += m;
        local.total[n - 1] += t;
      }
      local.hyp_len += hyps[i].size();
      local.ref_len += refs[i].size();
    }
    const std::size_t slot = begin / ((hyps.size() + shards - 1) / shards);
    partial[std::min<std::size_t>(slot, shards - 1)] = local;
  });

  BleuReport report;
  for (const auto& p : partial) {
    for (int n = 0; n < 4; ++n) {
      report.matched[n] += p.matched[n];
      report.total[n] += p.total[n];
    }
    report.hyp_len += p.hyp_len;
    report.ref_len += p.ref_len;
  }
  return report;
}

BleuReport bleu_corpus(const std::vector<Sentence>& hyps, const std::vector<Sentence>& refs,
                       const LanguageProfile& profile, unsigned workers) {
  if (hyps.size() != refs.size() || hyps.empty()) {
    throw DataError("BLEU needs equal nonempty hypothesis/reference counts (" +
                    std::to_string(hyps.size()) + " vs " + std::to_string(refs.size()) + ")");
  }
  std::vector<std::vector<Token>> hyp_tokens(hyps.size()), ref_tokens(refs.size());
  parallel_for(hyps.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      hyp_tokens[i] = tokenize(hyps[i], profile);
      ref_tokens[i] = tokenize(refs[i], profile);
    }
  });
  return bleu_corpus_tokens(hyp_tokens, ref_tokens, workers);
}

std::string format_bleu(const BleuReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "BLEU = %.2f (%.1f/%.1f/%.1f/%.1f, BP=%.3f, hyp_len=%llu, ref_len=%llu)",
                r.score(), 100.0 * r.precision(1), 100.0 * r.precision(2),
                100.0 * r.precision(3), 100.0 * r.precision(4), r.brevity_penalty(),
                static_cast<unsigned long long>(r.hyp_len),
                static_cast<unsigned long long>(r.ref_len));
  return buf;
}

}  // namespace forge
