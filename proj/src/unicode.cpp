// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "forge/unicode.hpp"

#include <algorithm>
#include <array>

#include "forge/common.hpp"

namespace forge::uni {

namespace {

struct Range {
  char32_t lo;
  char32_t hi;
  Script script;
};

// Sorted, non-overlapping. Letter ranges only; digits, punctuation, symbols
// and whitespace are classified before any script lookup, so overlap with
// those categories inside a block is harmless.
constexpr Range kScriptRanges[] = {
    {0x0041, 0x005A, Script::Latin},
    {0x0061, 0x007A, Script::Latin},
    {0x00AA, 0x00AA, Script::Latin},
    {0x00B5, 0x00B5, Script::Common},
    {0x00BA, 0x00BA, Script::Latin},
    {0x00C0, 0x00D6, Script::Latin},
    {0x00D8, 0x00F6, Script::Latin},
    {0x00F8, 0x02AF, Script::Latin},
    {0x0300, 0x036F, Script::Common},  // combining marks inherit surrounding script
    {0x0370, 0x03FF, Script::Greek},
    {0x0400, 0x052F, Script::Cyrillic},
    {0x0531, 0x058F, Script::Armenian},
    {0x0590, 0x05FF, Script::Hebrew},
    {0x0600, 0x06FF, Script::Arabic},
    {0x0750, 0x077F, Script::Arabic},
    {0x08A0, 0x08FF, Script::Arabic},
    {0x0900, 0x097F, Script::Devanagari},
    {0x0980, 0x09FF, Script::Bengali},
    {0x0B80, 0x0BFF, Script::Tamil},
    {0x0E00, 0x0E7F, Script::Thai},
    {0x10A0, 0x10FF, Script::Georgian},
    {0x1100, 0x11FF, Script::Hangul},
    {0x1D00, 0x1D7F, Script::Latin},
    {0x1E00, 0x1EFF, Script::Latin},
    {0x1F00, 0x1FFF, Script::Greek},
    {0x2C60, 0x2C7F, Script::Latin},
    {0x2DE0, 0x2DFF, Script::Cyrillic},
    {0x2E80, 0x2EFF, Script::Han},
    {0x3041, 0x309F, Script::Hiragana},
    {0x30A0, 0x30FF, Script::Katakana},
    {0x3130, 0x318F, Script::Hangul},
    {0x31F0, 0x31FF, Script::Katakana},
    {0x3400, 0x4DBF, Script::Han},
    {0x4E00, 0x9FFF, Script::Han},
    {0xA640, 0xA69F, Script::Cyrillic},
    {0xA720, 0xA7FF, Script::Latin},
    {0xA960, 0xA97F, Script::Hangul},
    {0xAB30, 0xAB6F, Script::Latin},
    {0xAC00, 0xD7FF, Script::Hangul},
    {0xF900, 0xFAFF, Script::Han},
    {0xFB00, 0xFB06, Script::Latin},
    {0xFB50, 0xFDFF, Script::Arabic},
    {0xFE70, 0xFEFF, Script::Arabic},
    {0xFF21, 0xFF3A, Script::Latin},
    {0xFF41, 0xFF5A, Script::Latin},
    {0xFF66, 0xFF9F, Script::Katakana},
    {0x20000, 0x2A6DF, Script::Han},
    {0x2A700, 0x2B81F, Script::Han},
    {0x2F800, 0x2FA1F, Script::Han},
};

struct Span {
  char32_t lo;
  char32_t hi;
};

constexpr Span kDigits[] = {
    {0x0030, 0x0039}, {0x0660, 0x0669}, {0x06F0, 0x06F9}, {0x0966, 0x096F},
    {0x09E6, 0x09EF}, {0x0A66, 0x0A6F}, {0x0AE6, 0x0AEF}, {0x0B66, 0x0B6F},
    {0x0BE6, 0x0BEF}, {0x0C66, 0x0C6F}, {0x0CE6, 0x0CEF}, {0x0D66, 0x0D6F},
    {0x0E50, 0x0E59}, {0x0ED0, 0x0ED9}, {0x0F20, 0x0F29}, {0x1040, 0x1049},
    {0x17E0, 0x17E9}, {0x1810, 0x1819}, {0xFF10, 0xFF19},
};

constexpr Span kPunctSymbol[] = {
    {0x0021, 0x002F}, {0x003A, 0x0040}, {0x005B, 0x0060}, {0x007B, 0x007E},
    {0x00A1, 0x00A9}, {0x00AB, 0x00B4}, {0x00B6, 0x00B9}, {0x00BB, 0x00BF},
    {0x00D7, 0x00D7}, {0x00F7, 0x00F7}, {0x2010, 0x2027}, {0x2030, 0x205E},
    {0x2060, 0x2064}, {0x2070, 0x209F}, {0x20A0, 0x20CF}, {0x2100, 0x2BFF},
    {0x2E00, 0x2E7F}, {0x3001, 0x303F}, {0xFE10, 0xFE6F}, {0xFF01, 0xFF0F},
    {0xFF1A, 0xFF20}, {0xFF3B, 0xFF40}, {0xFF5B, 0xFF65}, {0xFFE0, 0xFFE6},
    {0x1F000, 0x1FAFF},
};

constexpr char32_t kWhitespace[] = {
    0x0009, 0x000A, 0x000B, 0x000C, 0x000D, 0x0020, 0x0085, 0x00A0,
    0x1680, 0x2028, 0x2029, 0x202F, 0x205F, 0x3000,
};

struct NamedScript {
  std::string_view name;
  Script script;
};

constexpr NamedScript kNames[] = {
    {"Latin", Script::Latin},       {"Greek", Script::Greek},
    {"Cyrillic", Script::Cyrillic}, {"Armenian", Script::Armenian},
    {"Hebrew", Script::Hebrew},     {"Arabic", Script::Arabic},
    {"Devanagari", Script::Devanagari}, {"Bengali", Script::Bengali},
    {"Tamil", Script::Tamil},       {"Thai", Script::Thai},
    {"Georgian", Script::Georgian}, {"Hangul", Script::Hangul},
    {"Hiragana", Script::Hiragana}, {"Katakana", Script::Katakana},
    {"Han", Script::Han},           {"Common", Script::Common},
};

bool in_spans(const Span* spans, std::size_t n, char32_t cp) {
  auto end = spans + n;
  auto it = std::upper_bound(spans, end, cp,
                             [](char32_t c, const Span& s) { return c < s.lo; });
  return it != spans && cp <= (it - 1)->hi;
}

// Core decoder: returns false and sets bad_offset on the first invalid byte.
// out may be null when only validating.
bool decode_impl(std::string_view s, std::u32string* out, std::size_t* bad_offset) {
  std::size_t i = 0;
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  while (i < s.size()) {
    const std::size_t start = i;
    unsigned char b0 = p[i++];
    if (b0 < 0x80) {
      if (out) out->push_back(b0);
      continue;
    }
    int extra;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
      extra = 1;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3;
      cp = b0 & 0x07;
    } else {
      if (bad_offset) *bad_offset = start;
      return false;
    }
    if (i + extra > s.size()) {
      if (bad_offset) *bad_offset = start;
      return false;
    }
    bool ok = true;
    for (int k = 0; k < extra; ++k) {
      unsigned char b = p[i++];
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[4] = {0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      if (bad_offset) *bad_offset = start;
      return false;
    }
    if (out) out->push_back(cp);
  }
  return true;
}

}  // namespace

Script script_of(char32_t cp) {
  auto end = std::end(kScriptRanges);
  auto it = std::upper_bound(std::begin(kScriptRanges), end, cp,
                             [](char32_t c, const Range& r) { return c < r.lo; });
  if (it != std::begin(kScriptRanges) && cp <= (it - 1)->hi) return (it - 1)->script;
  return Script::Unknown;
}

std::string_view script_name(Script s) {
  for (const auto& n : kNames) {
    if (n.script == s) return n.name;
  }
  return "Unknown";
}

std::optional<Script> script_from_name(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.script;
  }
  return std::nullopt;
}

bool is_whitespace(char32_t cp) {
  if (cp >= 0x2000 && cp <= 0x200A) return true;
  return std::find(std::begin(kWhitespace), std::end(kWhitespace), cp) !=
         std::end(kWhitespace);
}

bool is_digit(char32_t cp) { return in_spans(kDigits, std::size(kDigits), cp); }

bool is_punct_or_symbol(char32_t cp) {
  return in_spans(kPunctSymbol, std::size(kPunctSymbol), cp);
}

char32_t fold_case(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
  if (cp >= 0x0100 && cp <= 0x0137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x014A && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp == 0x0178) return 0x00FF;
  if (cp >= 0x0179 && cp <= 0x017E) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 0x20;
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 0x20;
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 0x50;
  if (cp >= 0xFF21 && cp <= 0xFF3A) return cp + 0x20;
  return cp;
}

std::u32string decode_utf8(std::string_view s, std::size_t offset_base) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t bad = 0;
  if (!decode_impl(s, &out, &bad)) {
    throw DataError("invalid UTF-8 at byte " + std::to_string(offset_base + bad));
  }
  return out;
}

bool is_valid_utf8(std::string_view s, std::size_t* bad_offset) {
  return decode_impl(s, nullptr, bad_offset);
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append_utf8(out, cp);
  return out;
}

}  // namespace forge::uni
