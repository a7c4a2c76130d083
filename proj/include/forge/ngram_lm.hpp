// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "forge/corpus_io.hpp"
#include "forge/tokenizer.hpp"

namespace forge {

inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";

// Interpolation weights (w_order .. w_1, w_floor); they sum to 1 and the
// uniform floor keeps every probability strictly positive.
std::vector<double> default_lambdas(int order);

struct TrainOptions {
  int unk_threshold = 1;        // tokens with total count <= threshold become <unk>
  std::vector<double> lambdas;  // empty: default_lambdas(order)
};

// Count-based n-gram model with fixed-weight interpolation across orders
// plus a uniform floor over the vocabulary. Deterministic, exactly
// normalized, and adequate for cross-entropy ranking.
class NGramModel {
 public:
  static NGramModel train(const std::vector<Sentence>& corpus, const LanguageProfile& profile,
                          int order, const TrainOptions& opts = {});
  // Two streaming passes over the file (token frequencies, then counts).
  static NGramModel train_file(const std::string& path, const LanguageProfile& profile,
                               int order, const TrainOptions& opts = {});

  int order() const { return order_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::string& lang() const { return lang_; }
  SegmentationMode mode() const { return mode_; }

  // Predictable vocabulary: surface tokens plus <unk> and </s>; <s> is
  // context-only and excluded.
  std::size_t vocab_size() const { return vocab_size_; }
  std::vector<std::string> vocab() const;

  // Interpolated P(token | context). Context shorter than order-1 is padded
  // left with <s>; unknown tokens map to <unk>. Weight attached to unseen
  // contexts falls through to the uniform floor, so probabilities over the
  // vocabulary sum to 1 for every context.
  double prob(std::span<const std::string> context, const std::string& token) const;
  double prob(std::initializer_list<std::string> context, const std::string& token) const {
    return prob(std::span<const std::string>(context.begin(), context.size()), token);
  }

  // Per-token cross-entropy in nats over the T tokens plus </s>.
  double cross_entropy(const Sentence& s, const LanguageProfile& profile) const;

  // Raw count of an n-gram (surface tokens, length 1..order); 0 if absent.
  std::uint64_t count(std::span<const std::string> ngram) const;

  // Text format: order / lang / lambda header lines, then
  // n<TAB>space-joined-ngram<TAB>count rows sorted for diffability.
  void save(const std::string& path) const;
  static NGramModel load(const std::string& path);

 private:
  using TokenId = std::uint32_t;

  NGramModel() = default;

  TokenId id_or_unk(const std::string& token) const;
  double prob_ids(std::span<const TokenId> context, TokenId token) const;
  void add_ngram_counts(const std::vector<TokenId>& ids);
  void finalize_vocab();

  static std::string pack(std::span<const TokenId> ids);

  int order_ = 0;
  std::vector<double> lambdas_;
  std::string lang_;
  SegmentationMode mode_ = SegmentationMode::SpaceDelimited;

  std::unordered_map<std::string, TokenId> token_ids_;
  std::vector<std::string> id_tokens_;
  TokenId unk_id_ = 0, bos_id_ = 0, eos_id_ = 0;
  std::size_t vocab_size_ = 0;

  std::unordered_map<std::string, std::uint64_t> counts_;      // packed n-grams, 1..order
  std::unordered_map<std::string, std::uint64_t> ctx_totals_;  // packed prefixes, 0..order-1
};

}  // namespace forge
