// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "forge/corpus_io.hpp"
#include "forge/unicode.hpp"

namespace forge {

enum class SegmentationMode { SpaceDelimited, CharLevel };

std::string_view mode_name(SegmentationMode m);
SegmentationMode mode_from_name(std::string_view name);  // throws UsageError

// Drives tokenization and the foreign-character rule. CJK languages count
// characters as tokens; everything else splits on whitespace with
// punctuation peeling.
struct LanguageProfile {
  std::string lang_code;
  std::vector<uni::Script> expected_scripts;
  SegmentationMode mode = SegmentationMode::SpaceDelimited;

  bool script_expected(uni::Script s) const;
};

// Validates the profile invariants: nonempty script set; char_level requires
// a CJK script (Han, Hiragana, Katakana, or Hangul).
LanguageProfile make_profile(std::string lang_code, std::vector<uni::Script> scripts,
                             SegmentationMode mode);

struct Token {
  std::string text;
  std::size_t char_len = 0;  // Unicode scalar values, not bytes

  bool operator==(const Token&) const = default;
};

enum class CharClass { Expected, Digit, PunctOrSymbol, Whitespace, Other };

// Total: every scalar gets exactly one class. Digits, punctuation, symbols
// and whitespace are never Other regardless of script.
CharClass classify_char(char32_t cp, const LanguageProfile& profile);

std::vector<Token> tokenize(const Sentence& s, const LanguageProfile& profile);
std::size_t count_tokens(const Sentence& s, const LanguageProfile& profile);

// Cuts after terminal punctuation (. ! ? and fullwidth 。！？) — before
// whitespace in space-delimited mode, immediately in char-level mode.
// Outputs are trimmed and never empty.
std::vector<Sentence> split_sentences(const Sentence& s, const LanguageProfile& profile);

// Built-in profiles for en, zh, ja, ru, is, ha; individual fields can be
// overridden (config lines profile.<lang>.scripts / profile.<lang>.mode).
class ProfileRegistry {
 public:
  ProfileRegistry();

  const LanguageProfile& get(const std::string& lang) const;  // throws UsageError
  bool has(const std::string& lang) const;
  void set_scripts(const std::string& lang, const std::vector<std::string>& script_names);
  void set_mode(const std::string& lang, SegmentationMode mode);

 private:
  LanguageProfile& upsert(const std::string& lang);
  std::map<std::string, LanguageProfile> profiles_;
};

}  // namespace forge
