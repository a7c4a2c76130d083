// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace forge::uni {

// Scripts the toolkit can name in language profiles. "Common" covers
// script-neutral codepoints (inherited marks and the few letters Unicode
// assigns to no script); "Unknown" is everything outside the table.
enum class Script : std::uint8_t {
  Latin,
  Greek,
  Cyrillic,
  Armenian,
  Hebrew,
  Arabic,
  Devanagari,
  Bengali,
  Tamil,
  Thai,
  Georgian,
  Hangul,
  Hiragana,
  Katakana,
  Han,
  Common,
  Unknown,
};

Script script_of(char32_t cp);
std::string_view script_name(Script s);
std::optional<Script> script_from_name(std::string_view name);

bool is_whitespace(char32_t cp);
bool is_digit(char32_t cp);
bool is_punct_or_symbol(char32_t cp);

// Simple one-to-one lowercase mapping (ASCII, Latin-1/Ext-A, Greek, Cyrillic,
// fullwidth). Enough for duplicate-translation comparison; not full case folding.
char32_t fold_case(char32_t cp);

// UTF-8. Decoding rejects overlong forms, surrogates, and out-of-range values.
// Throws DataError naming the byte offset (offset_base + position of the bad byte).
std::u32string decode_utf8(std::string_view s, std::size_t offset_base = 0);
bool is_valid_utf8(std::string_view s, std::size_t* bad_offset = nullptr);
void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view s);

}  // namespace forge::uni
