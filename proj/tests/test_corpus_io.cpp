// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include <doctest.h>

#include "forge/common.hpp"
#include "forge/corpus_io.hpp"
#include "testutil.hpp"

using namespace forge;
using testutil::TempDir;

TEST_SUITE("corpus_io") {

TEST_CASE("read_mono yields one sentence per line") {
  TempDir tmp;
  testutil::write_file(tmp.file("a.txt"), "a\nb\n");
  const auto got = read_mono(tmp.file("a.txt"));
  REQUIRE(got.size() == 2);
  CHECK(got[0] == Sentence{"a", 1});
  CHECK(got[1] == Sentence{"b", 2});
}

TEST_CASE("empty file reads as empty corpus") {
  TempDir tmp;
  testutil::write_file(tmp.file("e.txt"), "");
  CHECK(read_mono(tmp.file("e.txt")).empty());
}

TEST_CASE("blank lines are kept as empty sentences") {
  TempDir tmp;
  testutil::write_file(tmp.file("a.txt"), "a\n\nb\n");
  const auto got = read_mono(tmp.file("a.txt"));
  REQUIRE(got.size() == 3);
  CHECK(got[1].text.empty());
  CHECK(got[1].line_no == 2);
}

TEST_CASE("CR is stripped from input") {
  TempDir tmp;
  testutil::write_file(tmp.file("a.txt"), "a\r\nb\r\n");
  const auto got = read_mono(tmp.file("a.txt"));
  REQUIRE(got.size() == 2);
  CHECK(got[0].text == "a");
  CHECK(got[1].text == "b");
}

TEST_CASE("missing file and invalid UTF-8 raise data errors") {
  TempDir tmp;
  CHECK_THROWS_AS(read_mono(tmp.file("missing.txt")), DataError);

  testutil::write_file(tmp.file("bad.txt"), "ok\nb\xFF" "d\n");
  // offending byte is at file offset 4 (after "ok\nb")
  CHECK_THROWS_WITH_AS(read_mono(tmp.file("bad.txt")), doctest::Contains("byte 4"), DataError);
}

TEST_CASE("read_pairs zips positionally") {
  TempDir tmp;
  testutil::write_lines(tmp.file("s"), {"s1", "s2", "s3"});
  testutil::write_lines(tmp.file("t"), {"t1", "t2", "t3"});
  const auto pairs = read_pairs(tmp.file("s"), tmp.file("t"));
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[1].src.text == "s2");
  CHECK(pairs[1].tgt.text == "t2");
  CHECK(pairs[2].src.line_no == 3);
}

TEST_CASE("read_pairs reports both counts on mismatch") {
  TempDir tmp;
  testutil::write_lines(tmp.file("s"), {"a", "b", "c"});
  testutil::write_lines(tmp.file("t"), {"x", "y"});
  try {
    read_pairs(tmp.file("s"), tmp.file("t"));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find("=3") != std::string::npos);
    CHECK(what.find("=2") != std::string::npos);
  }
}

TEST_CASE("both-empty parallel corpus is fine") {
  TempDir tmp;
  testutil::write_file(tmp.file("s"), "");
  testutil::write_file(tmp.file("t"), "");
  CHECK(read_pairs(tmp.file("s"), tmp.file("t")).empty());
}

TEST_CASE("two-file write/read round trip") {
  TempDir tmp;
  std::vector<SentencePair> pairs;
  for (int i = 0; i < 20; ++i) {
    pairs.push_back(testutil::pair("src line " + std::to_string(i),
                                   "tgt 今天 " + std::to_string(i),
                                   static_cast<std::uint64_t>(i + 1)));
  }
  CHECK(write_pairs(pairs, tmp.file("o.src"), tmp.file("o.tgt")) == 20);
  const auto back = read_pairs(tmp.file("o.src"), tmp.file("o.tgt"));
  CHECK(back == pairs);

  // final newline always emitted
  const std::string raw = testutil::read_file(tmp.file("o.src"));
  REQUIRE_FALSE(raw.empty());
  CHECK(raw.back() == '\n');
}

TEST_CASE("round trip holds for random content in both formats") {
  TempDir tmp;
  std::mt19937_64 gen(271828);
  const std::string alphabet = "ab \\xy\t";  // includes backslash and tab
  auto rand_text = [&]() {
    std::string s;
    const std::size_t len = gen() % 24;
    for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[gen() % alphabet.size()]);
    return s;
  };

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SentencePair> pairs;
    const std::size_t n = gen() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      pairs.push_back(SentencePair{Sentence{rand_text(), i + 1}, Sentence{rand_text(), i + 1}});
    }
    // TSV survives tabs and backslashes
    {
      PairWriter out(tmp.file("rt.tsv"));
      for (const auto& p : pairs) out.write(p);
      out.close();
      PairReader in(tmp.file("rt.tsv"));
      std::vector<SentencePair> back;
      while (auto p = in.next()) back.push_back(*p);
      CHECK(back == pairs);
    }
    // two-file format round-trips anything without line breaks
    {
      write_pairs(pairs, tmp.file("rt.src"), tmp.file("rt.tgt"));
      CHECK(read_pairs(tmp.file("rt.src"), tmp.file("rt.tgt")) == pairs);
    }
  }
}

TEST_CASE("writers reject embedded line breaks") {
  TempDir tmp;
  LineWriter out(tmp.file("x.txt"));
  CHECK_THROWS_AS(out.write("line\nbreak"), DataError);
}

TEST_CASE("empty corpus writes two empty files") {
  TempDir tmp;
  CHECK(write_pairs({}, tmp.file("o.src"), tmp.file("o.tgt")) == 0);
  CHECK(testutil::read_file(tmp.file("o.src")).empty());
  CHECK(testutil::read_file(tmp.file("o.tgt")).empty());
}

TEST_CASE("TSV mode escapes tabs and backslashes") {
  TempDir tmp;
  SentencePair p = testutil::pair("has\ttab", "has\\slash");
  {
    PairWriter out(tmp.file("c.tsv"));
    out.write(p);
    out.close();
  }
  const std::string raw = testutil::read_file(tmp.file("c.tsv"));
  CHECK(raw == "has\\ttab\thas\\\\slash\n");

  PairReader in(tmp.file("c.tsv"));
  auto got = in.next();
  REQUIRE(got.has_value());
  CHECK(got->src.text == "has\ttab");
  CHECK(got->tgt.text == "has\\slash");
  CHECK_FALSE(in.next().has_value());
}

TEST_CASE("malformed TSV rows are rejected") {
  TempDir tmp;
  testutil::write_file(tmp.file("bad.tsv"), "no tab here\n");
  PairReader no_tab(tmp.file("bad.tsv"));
  CHECK_THROWS_AS(no_tab.next(), DataError);

  testutil::write_file(tmp.file("bad2.tsv"), "a\tb\tc\n");
  PairReader three(tmp.file("bad2.tsv"));
  CHECK_THROWS_AS(three.next(), DataError);

  testutil::write_file(tmp.file("bad3.tsv"), "a\\x\tb\n");
  PairReader esc(tmp.file("bad3.tsv"));
  CHECK_THROWS_AS(esc.next(), DataError);
}

TEST_CASE("shard sizes: earlier shards take the remainder") {
  CHECK(ShardPlan::sizes(10, 2) == std::vector<std::uint64_t>{5, 5});
  CHECK(ShardPlan::sizes(10, 3) == std::vector<std::uint64_t>{4, 3, 3});
  CHECK(ShardPlan::sizes(1, 4) == std::vector<std::uint64_t>{1, 0, 0, 0});
  CHECK(ShardPlan::sizes(0, 3) == std::vector<std::uint64_t>{0, 0, 0});
  CHECK_THROWS_AS(ShardPlan::sizes(5, 0), UsageError);
}

TEST_CASE("shard concatenation reproduces the input") {
  TempDir tmp;
  std::vector<std::string> lines;
  for (int i = 0; i < 10; ++i) lines.push_back("line " + std::to_string(i));
  testutil::write_lines(tmp.file("in.txt"), lines);

  const auto shards = shard_file(tmp.file("in.txt"), ShardPlan{3});
  REQUIRE(shards.size() == 3);
  CHECK(count_lines(shards[0]) == 4);
  CHECK(count_lines(shards[1]) == 3);
  CHECK(count_lines(shards[2]) == 3);

  std::string joined;
  for (const auto& s : shards) joined += testutil::read_file(s);
  CHECK(joined == testutil::read_file(tmp.file("in.txt")));
}

TEST_CASE("count_lines handles a missing final newline") {
  TempDir tmp;
  testutil::write_file(tmp.file("a.txt"), "x\ny");
  CHECK(count_lines(tmp.file("a.txt")) == 2);
  testutil::write_file(tmp.file("b.txt"), "");
  CHECK(count_lines(tmp.file("b.txt")) == 0);
}

TEST_CASE("streaming keeps memory at the record level, not the corpus") {
  TempDir tmp;
  // ~6 MB of lines, each <= 64 bytes
  {
    LineWriter out(tmp.file("big.txt"));
    for (int i = 0; i < 100000; ++i) {
      out.write("line " + std::to_string(i) + std::string(40, 'x'));
    }
    out.close();
  }
  io_stats().reset();
  LineReader in(tmp.file("big.txt"));
  std::uint64_t n = 0;
  while (auto s = in.next()) ++n;
  CHECK(n == 100000);
  CHECK(io_stats().peak_record_bytes.load() <= 64);
}

}  // TEST_SUITE
