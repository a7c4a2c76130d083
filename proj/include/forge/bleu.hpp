// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "forge/corpus_io.hpp"
#include "forge/tokenizer.hpp"

namespace forge {

// Corpus BLEU-4: single reference, case-sensitive, no smoothing (a zero
// n-gram precision zeroes the score). Tokenization comes from the language
// profile, so scores are comparable only within this toolkit.
struct BleuReport {
  std::array<std::uint64_t, 4> matched{};  // clipped n-gram matches, n = 1..4
  std::array<std::uint64_t, 4> total{};
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;

  double precision(int n) const;  // matched/total, 0 when total == 0
  double brevity_penalty() const;
  // In [0, 100]. Orders with zero total (corpora shorter than n) drop out of
  // the geometric mean; any positive-total order with zero matches gives 0.
  double score() const;
};

// total = max(0, |hyp| - n + 1); matched = sum over distinct hyp n-grams of
// min(count_hyp, count_ref).
std::pair<std::uint64_t, std::uint64_t> ngram_clip_counts(const std::vector<Token>& hyp,
                                                          const std::vector<Token>& ref, int n);

BleuReport bleu_corpus(const std::vector<Sentence>& hyps, const std::vector<Sentence>& refs,
                       const LanguageProfile& profile, unsigned workers = 1);

// Pre-tokenized variant: greedy search re-scores many subsets, so callers
// tokenize once.
BleuReport bleu_corpus_tokens(const std::vector<std::vector<Token>>& hyps,
                              const std::vector<std::vector<Token>>& refs, unsigned workers = 1);

// "BLEU = 75.98 (83.3/80.0/75.0/66.7, BP=1.000, hyp_len=6, ref_len=5)"
std::string format_bleu(const BleuReport& report);

}  // namespace forge
