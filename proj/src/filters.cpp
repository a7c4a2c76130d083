// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "forge/filters.hpp"

#include <unordered_set>

#include "forge/common.hpp"
#include "forge/unicode.hpp"

namespace forge {

namespace {

bool has_html_tag(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '<' || i + 1 >= s.size()) continue;
    const char c = s[i + 1];
    const bool tag_start =
        (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '/' || c == '!';
    if (!tag_start) continue;
    if (s.find('>', i + 2) != std::string_view::npos) return true;
  }
  return false;
}

// Case-folded, whitespace-collapsed form for duplicate-translation checks.
std::u32string normalized(std::string_view text) {
  std::u32string out;
  bool pending_space = false;
  for (char32_t cp : uni::decode_utf8(text)) {
    if (uni::is_whitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(uni::fold_case(cp));
  }
  return out;
}

Fingerprint128 pair_fingerprint(const SentencePair& pair) {
  std::string key;
  key.reserve(pair.src.text.size() + pair.tgt.text.size() + 8);
  const std::uint64_t n = pair.src.text.size();
  for (int b = 0; b < 8; ++b) key.push_back(static_cast<char>((n >> (8 * b)) & 0xFF));
  key += pair.src.text;
  key += pair.tgt.text;
  return fingerprint128(key);
}

bool word_too_long(const std::vector<Token>& tokens, int max_chars) {
  for (const auto& t : tokens) {
    if (t.char_len > static_cast<std::size_t>(max_chars)) return true;
  }
  return false;
}

FilterDecision evaluate_mono_piece(const Sentence& s, const LanguageProfile& profile,
                                   const FilterConfig& cfg) {
  const auto tokens = tokenize(s, profile);
  if (tokens.empty()) return FilterDecision::reject(RuleId::Empty);
  if (word_too_long(tokens, cfg.max_word_chars)) {
    return FilterDecision::reject(RuleId::WordLen);
  }
  if (tokens.size() > static_cast<std::size_t>(cfg.max_sentence_tokens)) {
    return FilterDecision::reject(RuleId::SentLen);
  }
  FilterDecision other = rule_other_chars(s, profile, cfg);
  if (!other.keep) return other;
  if (has_html_tag(s.text)) return FilterDecision::reject(RuleId::Html);
  return FilterDecision::ok();
}

// Batched driver shared by the streaming and in-memory filters: the pure
// rules run data-parallel, DupPair and emission stay sequential.
template <typename NextFn, typename EmitFn>
FilterReport run_filter(NextFn next, EmitFn emit, const FilterConfig& cfg, unsigned workers) {
  cfg.validate();
  constexpr std::size_t kBatch = 4096;

  FilterReport report;
  std::unordered_set<Fingerprint128, Fingerprint128Hash> seen;
  std::vector<SentencePair> batch;
  std::vector<FilterDecision> decisions;
  batch.reserve(kBatch);

  bool done = false;
  while (!done) {
    batch.clear();
    while (batch.size() < kBatch) {
      auto p = next();
      if (!p) {
        done = true;
        break;
      }
      batch.push_back(std::move(*p));
    }
    if (batch.empty()) break;

    decisions.assign(batch.size(), FilterDecision::ok());
    parallel_for(batch.size(), workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        decisions[i] = evaluate_pair(batch[i], cfg);
      }
    });

    for (std::size_t i = 0; i < batch.size(); ++i) {
      ++report.input;
      FilterDecision d = decisions[i];
      if (d.keep && !seen.insert(pair_fingerprint(batch[i])).second) {
        d = FilterDecision::reject(RuleId::DupPair);
      }
      if (d.keep) {
        ++report.kept;
        emit(batch[i]);
      } else {
        ++report.rejected[static_cast<std::size_t>(*d.rejected_by)];
      }
    }
  }
  return report;
}

}  // namespace

std::string_view rule_name(RuleId id) {
  switch (id) {
    case RuleId::Empty: return "Empty";
    case RuleId::WordLen: return "WordLen";
    case RuleId::SentLen: return "SentLen";
    case RuleId::Ratio: return "Ratio";
    case RuleId::OtherChars: return "OtherChars";
    case RuleId::Html: return "Html";
    case RuleId::DupTranslation: return "DupTranslation";
    case RuleId::DupPair: return "DupPair";
  }
  return "?";
}

void FilterConfig::validate() const {
  if (max_word_chars <= 0 || max_sentence_tokens <= 0 || max_other_chars <= 0) {
    throw UsageError("filter thresholds must be positive");
  }
  if (!(max_len_ratio > 1.0)) throw UsageError("max length ratio must exceed 1");
}

std::uint64_t FilterReport::total_rejected() const {
  std::uint64_t sum = 0;
  for (auto n : rejected) sum += n;
  return sum;
}

FilterDecision rule_length(const SentencePair& pair, const FilterConfig& cfg) {
  const auto src_tokens = tokenize(pair.src, cfg.src_profile);
  const auto tgt_tokens = tokenize(pair.tgt, cfg.tgt_profile);
  if (word_too_long(src_tokens, cfg.max_word_chars) ||
      word_too_long(tgt_tokens, cfg.max_word_chars)) {
    return FilterDecision::reject(RuleId::WordLen);
  }
  if (src_tokens.size() > static_cast<std::size_t>(cfg.max_sentence_tokens) ||
      tgt_tokens.size() > static_cast<std::size_t>(cfg.max_sentence_tokens)) {
    return FilterDecision::reject(RuleId::SentLen);
  }
  return FilterDecision::ok();
}

FilterDecision rule_ratio(const SentencePair& pair, const FilterConfig& cfg) {
  const auto s = static_cast<double>(count_tokens(pair.src, cfg.src_profile));
  const auto t = static_cast<double>(count_tokens(pair.tgt, cfg.tgt_profile));
  if (s == 0 || t == 0) return FilterDecision::reject(RuleId::Empty);
  if (s > cfg.max_len_ratio * t || t > cfg.max_len_ratio * s) {
    return FilterDecision::reject(RuleId::Ratio);
  }
  return FilterDecision::ok();
}

FilterDecision rule_other_chars(const Sentence& s, const LanguageProfile& profile,
                                const FilterConfig& cfg) {
  int other = 0;
  for (char32_t cp : uni::decode_utf8(s.text)) {
    if (classify_char(cp, profile) == CharClass::Other) ++other;
  }
  return other > cfg.max_other_chars ? FilterDecision::reject(RuleId::OtherChars)
                                     : FilterDecision::ok();
}

FilterDecision rule_html_dup(const SentencePair& pair) {
  if (has_html_tag(pair.src.text) || has_html_tag(pair.tgt.text)) {
    return FilterDecision::reject(RuleId::Html);
  }
  if (normalized(pair.src.text) == normalized(pair.tgt.text)) {
    return FilterDecision::reject(RuleId::DupTranslation);
  }
  return FilterDecision::ok();
}

FilterDecision evaluate_pair(const SentencePair& pair, const FilterConfig& cfg) {
  const auto src_tokens = tokenize(pair.src, cfg.src_profile);
  const auto tgt_tokens = tokenize(pair.tgt, cfg.tgt_profile);

  if (src_tokens.empty() || tgt_tokens.empty()) {
    return FilterDecision::reject(RuleId::Empty);
  }
  if (word_too_long(src_tokens, cfg.max_word_chars) ||
      word_too_long(tgt_tokens, cfg.max_word_chars)) {
    return FilterDecision::reject(RuleId::WordLen);
  }
  if (src_tokens.size() > static_cast<std::size_t>(cfg.max_sentence_tokens) ||
      tgt_tokens.size() > static_cast<std::size_t>(cfg.max_sentence_tokens)) {
    return FilterDecision::reject(RuleId::SentLen);
  }
  const auto s = static_cast<double>(src_tokens.size());
  const auto t = static_cast<double>(tgt_tokens.size());
  if (s > cfg.max_len_ratio * t || t > cfg.max_len_ratio * s) {
    return FilterDecision::reject(RuleId::Ratio);
  }
  FilterDecision other = rule_other_chars(pair.src, cfg.src_profile, cfg);
  if (other.keep) other = rule_other_chars(pair.tgt, cfg.tgt_profile, cfg);
  if (!other.keep) return other;
  return rule_html_dup(pair);
}

FilterReport filter_corpus(PairReader& in, PairWriter& out, const FilterConfig& cfg,
                           unsigned workers) {
  return run_filter([&] { return in.next(); },
                    [&](const SentencePair& p) { out.write(p); }, cfg, workers);
}

std::pair<std::vector<SentencePair>, FilterReport> filter_pairs(
    const std::vector<SentencePair>& pairs, const FilterConfig& cfg, unsigned workers) {
  std::vector<SentencePair> kept;
  std::size_t pos = 0;
  FilterReport report = run_filter(
      [&]() -> std::optional<SentencePair> {
        if (pos >= pairs.size()) return std::nullopt;
        return pairs[pos++];
      },
      [&](const SentencePair& p) { kept.push_back(p); }, cfg, workers);
  return {std::move(kept), report};
}

namespace {

template <typename NextFn, typename EmitFn>
MonoCleanReport run_clean_mono(NextFn next, EmitFn emit, const LanguageProfile& profile,
                               const FilterConfig& cfg) {
  cfg.validate();
  MonoCleanReport report;
  while (auto line = next()) {
    ++report.input_lines;
    const auto pieces = split_sentences(*line, profile);
    if (pieces.empty()) {
      ++report.rejected[static_cast<std::size_t>(RuleId::Empty)];
      continue;
    }
    for (const auto& piece : pieces) {
      ++report.pieces;
      const FilterDecision d = evaluate_mono_piece(piece, profile, cfg);
      if (d.keep) {
        ++report.emitted;
        emit(piece);
      } else {
        ++report.rejected[static_cast<std::size_t>(*d.rejected_by)];
      }
    }
  }
  return report;
}

}  // namespace

MonoCleanReport clean_mono(LineReader& in, LineWriter& out, const LanguageProfile& profile,
                           const FilterConfig& cfg) {
  return run_clean_mono([&] { return in.next(); },
                        [&](const Sentence& s) { out.write(s.text); }, profile, cfg);
}

std::pair<std::vector<Sentence>, MonoCleanReport> clean_mono(
    const std::vector<Sentence>& sentences, const LanguageProfile& profile,
    const FilterConfig& cfg) {
  std::vector<Sentence> kept;
  std::size_t pos = 0;
  MonoCleanReport report = run_clean_mono(
      [&]() -> std::optional<Sentence> {
        if (pos >= sentences.size()) return std::nullopt;
        return sentences[pos++];
      },
      [&](const Sentence& s) { kept.push_back(s); }, profile, cfg);
  return {std::move(kept), report};
}

}  // namespace forge
