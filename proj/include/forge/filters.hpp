// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forge/corpus_io.hpp"
#include "forge/tokenizer.hpp"

namespace forge {

// Rejection rules, in evaluation order. The order is fixed so rejection
// attribution is reproducible run to run.
enum class RuleId : std::uint8_t {
  Empty,
  WordLen,
  SentLen,
  Ratio,
  OtherChars,
  Html,
  DupTranslation,
  DupPair,
};

constexpr std::size_t kRuleCount = 8;
std::string_view rule_name(RuleId id);

struct FilterConfig {
  int max_word_chars = 40;       // "over" is strict: 40 kept, 41 rejected
  int max_sentence_tokens = 150;
  double max_len_ratio = 3.0;    // token-count ratio; exactly 3:1 kept
  int max_other_chars = 10;
  LanguageProfile src_profile;
  LanguageProfile tgt_profile;

  void validate() const;  // thresholds positive, ratio > 1
};

struct FilterDecision {
  bool keep = true;
  std::optional<RuleId> rejected_by;

  static FilterDecision ok() { return {}; }
  static FilterDecision reject(RuleId id) { return FilterDecision{false, id}; }

  bool operator==(const FilterDecision&) const = default;
};

// Individual rules. All are pure; DupPair state lives in the corpus drivers.
FilterDecision rule_length(const SentencePair& pair, const FilterConfig& cfg);
FilterDecision rule_ratio(const SentencePair& pair, const FilterConfig& cfg);
FilterDecision rule_other_chars(const Sentence& s, const LanguageProfile& profile,
                                const FilterConfig& cfg);
FilterDecision rule_html_dup(const SentencePair& pair);

// All per-pair rules in order Empty, WordLen, SentLen, Ratio, OtherChars,
// Html, DupTranslation. Excludes DupPair.
FilterDecision evaluate_pair(const SentencePair& pair, const FilterConfig& cfg);

struct FilterReport {
  std::uint64_t input = 0;
  std::uint64_t kept = 0;
  std::array<std::uint64_t, kRuleCount> rejected{};

  std::uint64_t rejected_by(RuleId id) const {
    return rejected[static_cast<std::size_t>(id)];
  }
  std::uint64_t total_rejected() const;
};

// Streaming filter; DupPair tracks fingerprints of kept pairs, so output
// order equals input order and the kept set is a fixpoint.
FilterReport filter_corpus(PairReader& in, PairWriter& out, const FilterConfig& cfg,
                           unsigned workers = 1);
std::pair<std::vector<SentencePair>, FilterReport> filter_pairs(
    const std::vector<SentencePair>& pairs, const FilterConfig& cfg, unsigned workers = 1);

struct MonoCleanReport {
  std::uint64_t input_lines = 0;
  std::uint64_t pieces = 0;   // sentences after splitting
  std::uint64_t emitted = 0;
  std::array<std::uint64_t, kRuleCount> rejected{};

  std::uint64_t rejected_by(RuleId id) const {
    return rejected[static_cast<std::size_t>(id)];
  }
};

// Splits each line into sentences, then applies the monolingual rules
// (WordLen, SentLen, OtherChars, Html) to every piece, preserving order.
MonoCleanReport clean_mono(LineReader& in, LineWriter& out, const LanguageProfile& profile,
                           const FilterConfig& cfg);
std::pair<std::vector<Sentence>, MonoCleanReport> clean_mono(
    const std::vector<Sentence>& sentences, const LanguageProfile& profile,
    const FilterConfig& cfg);

}  // namespace forge
