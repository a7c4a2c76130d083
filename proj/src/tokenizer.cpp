// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "forge/tokenizer.hpp"

#include <algorithm>

#include "forge/common.hpp"

namespace forge {

namespace {

bool is_cjk(uni::Script s) {
  return s == uni::Script::Han || s == uni::Script::Hiragana ||
         s == uni::Script::Katakana || s == uni::Script::Hangul;
}

bool is_terminal_punct(char32_t cp) {
  return cp == U'.' || cp == U'!' || cp == U'?' || cp == U'。' || cp == U'！' ||
         cp == U'？';
}

Token make_token(std::u32string_view chars) {
  return Token{uni::encode_utf8(chars), chars.size()};
}

}  // namespace

std::string_view mode_name(SegmentationMode m) {
  return m == SegmentationMode::SpaceDelimited ? "space_delimited" : "char_level";
}

SegmentationMode mode_from_name(std::string_view name) {
  if (name == "space_delimited") return SegmentationMode::SpaceDelimited;
  if (name == "char_level") return SegmentationMode::CharLevel;
  throw UsageError("unknown segmentation mode \"" + std::string(name) +
                   "\" (expected space_delimited or char_level)");
}

bool LanguageProfile::script_expected(uni::Script s) const {
  return std::find(expected_scripts.begin(), expected_scripts.end(), s) !=
         expected_scripts.end();
}

LanguageProfile make_profile(std::string lang_code, std::vector<uni::Script> scripts,
                             SegmentationMode mode) {
  if (scripts.empty()) {
    throw UsageError("profile " + lang_code + ": expected_scripts must be nonempty");
  }
  if (mode == SegmentationMode::CharLevel &&
      std::none_of(scripts.begin(), scripts.end(), is_cjk)) {
    throw UsageError("profile " + lang_code + ": char_level requires a CJK script");
  }
  return LanguageProfile{std::move(lang_code), std::move(scripts), mode};
}

CharClass classify_char(char32_t cp, const LanguageProfile& profile) {
  if (uni::is_whitespace(cp)) return CharClass::Whitespace;
  if (uni::is_digit(cp)) return CharClass::Digit;
  if (uni::is_punct_or_symbol(cp)) return CharClass::PunctOrSymbol;
  return profile.script_expected(uni::script_of(cp)) ? CharClass::Expected : CharClass::Other;
}

std::vector<Token> tokenize(const Sentence& s, const LanguageProfile& profile) {
  const std::u32string chars = uni::decode_utf8(s.text);
  std::vector<Token> tokens;

  if (profile.mode == SegmentationMode::CharLevel) {
    for (char32_t cp : chars) {
      if (!uni::is_whitespace(cp)) tokens.push_back(make_token({&cp, 1}));
    }
    return tokens;
  }

  std::size_t i = 0;
  while (i < chars.size()) {
    while (i < chars.size() && uni::is_whitespace(chars[i])) ++i;
    std::size_t begin = i;
    while (i < chars.size() && !uni::is_whitespace(chars[i])) ++i;
    if (begin == i) break;
    std::u32string_view span(chars.data() + begin, i - begin);

    // Peel leading/trailing punctuation runs off the word; each run is one token.
    std::size_t lead = 0;
    while (lead < span.size() && uni::is_punct_or_symbol(span[lead])) ++lead;
    if (lead == span.size()) {
      tokens.push_back(make_token(span));
      continue;
    }
    std::size_t trail = span.size();
    while (trail > lead && uni::is_punct_or_symbol(span[trail - 1])) --trail;
    if (lead > 0) tokens.push_back(make_token(span.substr(0, lead)));
    tokens.push_back(make_token(span.substr(lead, trail - lead)));
    if (trail < span.size()) tokens.push_back(make_token(span.substr(trail)));
  }
  return tokens;
}

std::size_t count_tokens(const Sentence& s, const LanguageProfile& profile) {
  return tokenize(s, profile).size();
}

std::vector<Sentence> split_sentences(const Sentence& s, const LanguageProfile& profile) {
  const std::u32string chars = uni::decode_utf8(s.text);
  std::vector<Sentence> out;

  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && uni::is_whitespace(chars[begin])) ++begin;
    while (end > begin && uni::is_whitespace(chars[end - 1])) --end;
    if (begin == end) return;
    out.push_back(Sentence{uni::encode_utf8({chars.data() + begin, end - begin}), s.line_no});
  };

  std::size_t piece_begin = 0;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    if (!is_terminal_punct(chars[i])) continue;
    const bool cut = profile.mode == SegmentationMode::CharLevel ||
                     (i + 1 < chars.size() && uni::is_whitespace(chars[i + 1]));
    if (cut) {
      emit(piece_begin, i + 1);
      piece_begin = i + 1;
    }
  }
  emit(piece_begin, chars.size());
  return out;
}

ProfileRegistry::ProfileRegistry() {
  using uni::Script;
  profiles_["en"] = make_profile("en", {Script::Latin, Script::Common},
                                 SegmentationMode::SpaceDelimited);
  profiles_["is"] = make_profile("is", {Script::Latin, Script::Common},
                                 SegmentationMode::SpaceDelimited);
  profiles_["ha"] = make_profile("ha", {Script::Latin, Script::Common},
                                 SegmentationMode::SpaceDelimited);
  profiles_["ru"] = make_profile("ru", {Script::Cyrillic, Script::Common},
                                 SegmentationMode::SpaceDelimited);
  profiles_["zh"] =
      make_profile("zh", {Script::Han, Script::Common}, SegmentationMode::CharLevel);
  profiles_["ja"] = make_profile(
      "ja", {Script::Han, Script::Hiragana, Script::Katakana, Script::Common},
      SegmentationMode::CharLevel);
}

const LanguageProfile& ProfileRegistry::get(const std::string& lang) const {
  auto it = profiles_.find(lang);
  if (it == profiles_.end()) {
    std::string known;
    for (const auto& [code, _] : profiles_) {
      if (!known.empty()) known += ", ";
      known += code;
    }
    throw UsageError("unknown language \"" + lang + "\" (known: " + known +
                     "; add profile.<lang>.* config lines for others)");
  }
  return it->second;
}

bool ProfileRegistry::has(const std::string& lang) const {
  return profiles_.count(lang) > 0;
}

LanguageProfile& ProfileRegistry::upsert(const std::string& lang) {
  auto it = profiles_.find(lang);
  if (it == profiles_.end()) {
    it = profiles_
             .emplace(lang, LanguageProfile{lang, {uni::Script::Common},
                                            SegmentationMode::SpaceDelimited})
             .first;
  }
  return it->second;
}

void ProfileRegistry::set_scripts(const std::string& lang,
                                  const std::vector<std::string>& script_names) {
  std::vector<uni::Script> scripts;
  for (const auto& name : script_names) {
    auto s = uni::script_from_name(name);
    if (!s) throw UsageError("unknown script name \"" + name + "\"");
    scripts.push_back(*s);
  }
  LanguageProfile& p = upsert(lang);
  p = make_profile(p.lang_code, std::move(scripts), p.mode);
}

void ProfileRegistry::set_mode(const std::string& lang, SegmentationMode mode) {
  LanguageProfile& p = upsert(lang);
  p = make_profile(p.lang_code, p.expected_scripts, mode);
}

}  // namespace forge
