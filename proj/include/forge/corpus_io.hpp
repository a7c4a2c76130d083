// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

struct Sentence {
  std::string text;           // UTF-8, no line breaks
  std::uint64_t line_no = 0;  // 1-based ordinal in the source file

  bool operator==(const Sentence&) const = default;
};

struct SentencePair {
  Sentence src;
  Sentence tgt;

  bool operator==(const SentencePair&) const = default;
};

// Gauge for the streaming-memory tests: readers/writers report the largest
// single record they ever buffered. O(1) streaming means this tracks the
// longest line, not the corpus size.
struct IoStats {
  std::atomic<std::uint64_t> peak_record_bytes{0};

  void note(std::uint64_t n) {
    std::uint64_t cur = peak_record_bytes.load(std::memory_order_relaxed);
    while (n > cur &&
           !peak_record_bytes.compare_exchange_weak(cur, n, std::memory_order_relaxed)) {
    }
  }
  void reset() { peak_record_bytes.store(0); }
};

IoStats& io_stats();

// TSV field escaping: tab -> "\t", backslash -> "\\". Round-trips any text
// that is free of raw line breaks.
std::string tsv_escape(std::string_view s);
std::string tsv_unescape(std::string_view s);

// Streaming line reader. Strips CR (mixed CRLF input is common in WMT data),
// validates UTF-8, and reports the file byte offset of any invalid byte.
class LineReader {
 public:
  explicit LineReader(std::string path);

  std::optional<Sentence> next();
  const std::string& path() const { return path_; }
  std::uint64_t lines_read() const { return line_no_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::string buf_;
  std::uint64_t line_no_ = 0;
  std::uint64_t byte_offset_ = 0;
};

class LineWriter {
 public:
  explicit LineWriter(std::string path);
  ~LineWriter();

  void write(std::string_view text);  // newline appended
  std::uint64_t count() const { return count_; }
  void close();

 private:
  std::string path_;
  std::ofstream out_;
  std::uint64_t count_ = 0;
  bool closed_ = false;
};

enum class PairFormat { TwoFile, Tsv };

class PairReader {
 public:
  // Two-file parallel format: one segment per line, positionally aligned.
  PairReader(std::string src_path, std::string tgt_path);
  // Single-file TSV: src<TAB>tgt, fields escaped.
  explicit PairReader(std::string tsv_path);

  // Throws DataError on line-count mismatch (reporting both counts) or
  // malformed TSV records.
  std::optional<SentencePair> next();

 private:
  PairFormat format_;
  std::optional<LineReader> src_;
  std::optional<LineReader> tgt_;
  std::optional<LineReader> tsv_;
};

class PairWriter {
 public:
  PairWriter(std::string src_path, std::string tgt_path);
  explicit PairWriter(std::string tsv_path);

  void write(const SentencePair& pair);
  std::uint64_t count() const { return count_; }
  void close();

 private:
  PairFormat format_;
  std::optional<LineWriter> src_;
  std::optional<LineWriter> tgt_;
  std::optional<LineWriter> tsv_;
  std::uint64_t count_ = 0;
};

struct ShardPlan {
  std::size_t shard_count = 1;

  // Contiguous line ranges; earlier shards take the remainder: 10 lines over
  // 3 shards -> 4,3,3.
  static std::vector<std::uint64_t> sizes(std::uint64_t lines, std::size_t shard_count);
};

// Splits `path` into plan.shard_count files named <prefix>.shardNNN (prefix
// defaults to the input path). Concatenating the shards in index order
// reproduces the input line sequence.
std::vector<std::string> shard_file(const std::string& path, const ShardPlan& plan,
                                    const std::string& out_prefix = "");

std::uint64_t count_lines(const std::string& path);

// Whole-file convenience loaders for small inputs and tests.
std::vector<Sentence> read_mono(const std::string& path);
std::vector<SentencePair> read_pairs(const std::string& src_path, const std::string& tgt_path);
std::uint64_t write_mono(const std::vector<Sentence>& lines, const std::string& path);
std::uint64_t write_pairs(const std::vector<SentencePair>& pairs, const std::string& src_path,
                          const std::string& tgt_path);

}  // namespace forge
