// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include <doctest.h>

#include "forge/common.hpp"
#include "forge/tokenizer.hpp"
#include "forge/unicode.hpp"
#include "testutil.hpp"

using namespace forge;
using testutil::sent;

namespace {

ProfileRegistry& registry() {
  static ProfileRegistry reg;
  return reg;
}

const LanguageProfile& en() { return registry().get("en"); }
const LanguageProfile& zh() { return registry().get("zh"); }

std::vector<std::string> texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

}  // namespace

TEST_SUITE("tokenizer") {

TEST_CASE("space-delimited tokenization peels punctuation") {
  CHECK(texts(tokenize(sent("Hello, world!"), en())) ==
        std::vector<std::string>{"Hello", ",", "world", "!"});
  CHECK(texts(tokenize(sent("(hello)"), en())) == std::vector<std::string>{"(", "hello", ")"});
  CHECK(texts(tokenize(sent("well-known word"), en())) ==
        std::vector<std::string>{"well-known", "word"});
  CHECK(texts(tokenize(sent("--"), en())) == std::vector<std::string>{"--"});
  CHECK(texts(tokenize(sent("wait..."), en())) == std::vector<std::string>{"wait", "..."});
}

TEST_CASE("char-level tokenization emits one token per scalar") {
  CHECK(texts(tokenize(sent("今天新闻"), zh())) ==
        std::vector<std::string>{"今", "天", "新", "闻"});
  CHECK(texts(tokenize(sent("今 天"), zh())) ==
        std::vector<std::string>{"今", "天"});
}

TEST_CASE("empty input tokenizes to nothing") {
  CHECK(tokenize(sent(""), en()).empty());
  CHECK(tokenize(sent("   "), en()).empty());
  CHECK(count_tokens(sent(""), en()) == 0);
}

TEST_CASE("count_tokens matches tokenize") {
  CHECK(count_tokens(sent("a b c"), en()) == 3);
  CHECK(count_tokens(sent("今天"), zh()) == 2);
  CHECK(count_tokens(sent("Hello, world!"), en()) == 4);
}

TEST_CASE("classify_char follows the profile") {
  CHECK(classify_char(U'д', en()) == CharClass::Other);  // Cyrillic under en
  CHECK(classify_char(U'7', en()) == CharClass::Digit);
  CHECK(classify_char(U'7', zh()) == CharClass::Digit);
  CHECK(classify_char(U'a', en()) == CharClass::Expected);
  CHECK(classify_char(U'!', en()) == CharClass::PunctOrSymbol);
  CHECK(classify_char(U' ', en()) == CharClass::Whitespace);
  CHECK(classify_char(U'a', zh()) == CharClass::Other);      // Latin under zh
  CHECK(classify_char(U'今', zh()) == CharClass::Expected);
  CHECK(classify_char(U'あ', registry().get("ja")) == CharClass::Expected);
}

TEST_CASE("token char_len counts scalars, not bytes") {
  const auto tokens = tokenize(sent("café"), en());
  REQUIRE(tokens.size() == 1);
  CHECK(tokens[0].char_len == 4);
  CHECK(tokens[0].text.size() == 5);
}

TEST_CASE("split_sentences cuts after terminal punctuation") {
  auto pieces = split_sentences(sent("It rains. We stay."), en());
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0].text == "It rains.");
  CHECK(pieces[1].text == "We stay.");

  CHECK(split_sentences(sent("No terminal punct"), en()).size() == 1);

  pieces = split_sentences(sent("今天下雨。我们在家。"),
                           zh());
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0].text == "今天下雨。");

  // '?' not followed by whitespace does not cut in space-delimited mode
  pieces = split_sentences(sent("Really?! Yes."), en());
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0].text == "Really?!");

  CHECK(split_sentences(sent(""), en()).empty());
  CHECK(split_sentences(sent("   "), en()).empty());
}

TEST_CASE("split_sentences is idempotent") {
  const char* samples[] = {
      "One. Two. Three.", "Mr period stays.Same token", "A! B? C.",
      "今天。明天！", "no punct at all", "trailing space. ",
  };
  for (const char* raw : samples) {
    for (const auto* profile : {&en(), &zh()}) {
      for (const auto& piece : split_sentences(sent(raw), *profile)) {
        const auto again = split_sentences(piece, *profile);
        REQUIRE(again.size() == 1);
        CHECK(again[0].text == piece.text);
      }
    }
  }
}

TEST_CASE("tokenize preserves every non-whitespace scalar") {
  const char* samples[] = {"Hello, world!", "a  b\tc", "今天 新闻!",
                          "(x) [y] {z}", "да 7 ok", "..."};
  for (const char* raw : samples) {
    for (const auto* profile : {&en(), &zh()}) {
      std::size_t non_ws = 0;
      for (char32_t cp : uni::decode_utf8(raw)) {
        if (!uni::is_whitespace(cp)) ++non_ws;
      }
      std::size_t total = 0;
      for (const auto& t : tokenize(sent(raw), *profile)) {
        CHECK(t.char_len > 0);
        CHECK_FALSE(t.text.empty());
        total += t.char_len;
      }
      CHECK(total == non_ws);
    }
  }
}

TEST_CASE("classify_char is total over the scalar space") {
  // full BMP plus samples beyond it; every scalar gets exactly one class
  for (char32_t cp = 0; cp <= 0xFFFF; ++cp) {
    if (cp >= 0xD800 && cp <= 0xDFFF) continue;  // not scalars
    const CharClass c = classify_char(cp, en());
    CHECK((c == CharClass::Expected || c == CharClass::Digit ||
           c == CharClass::PunctOrSymbol || c == CharClass::Whitespace ||
           c == CharClass::Other));
  }
  for (char32_t cp : {U'\U00020000', U'\U0001F600', U'\U0010FFFF'}) {
    (void)classify_char(cp, en());
  }
}

TEST_CASE("profile validation") {
  CHECK_THROWS_AS(make_profile("xx", {}, SegmentationMode::SpaceDelimited), UsageError);
  CHECK_THROWS_AS(make_profile("xx", {uni::Script::Latin}, SegmentationMode::CharLevel),
                  UsageError);
  CHECK_NOTHROW(make_profile("xx", {uni::Script::Han}, SegmentationMode::CharLevel));
}

TEST_CASE("registry builtins and overrides") {
  ProfileRegistry reg;
  for (const char* lang : {"en", "zh", "ja", "ru", "is", "ha"}) CHECK(reg.has(lang));
  CHECK(reg.get("zh").mode == SegmentationMode::CharLevel);
  CHECK(reg.get("ja").mode == SegmentationMode::CharLevel);
  CHECK(reg.get("ru").script_expected(uni::Script::Cyrillic));
  CHECK_THROWS_AS(reg.get("xx"), UsageError);

  reg.set_scripts("de", {"Latin", "Common"});
  CHECK(reg.get("de").script_expected(uni::Script::Latin));
  CHECK_THROWS_AS(reg.set_scripts("de", {"NotAScript"}), UsageError);
  CHECK_THROWS_AS(reg.set_mode("de", SegmentationMode::CharLevel), UsageError);  // no CJK script

  reg.set_scripts("ko", {"Hangul", "Common"});
  reg.set_mode("ko", SegmentationMode::CharLevel);
  CHECK(reg.get("ko").mode == SegmentationMode::CharLevel);
}

TEST_CASE("mode names round trip") {
  CHECK(mode_from_name("space_delimited") == SegmentationMode::SpaceDelimited);
  CHECK(mode_from_name("char_level") == SegmentationMode::CharLevel);
  CHECK(mode_name(SegmentationMode::CharLevel) == "char_level");
  CHECK_THROWS_AS(mode_from_name("words"), UsageError);
}

}  // TEST_SUITE
