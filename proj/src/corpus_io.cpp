// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "forge/corpus_io.hpp"

#include <algorithm>

#include "forge/common.hpp"
#include "forge/unicode.hpp"

namespace forge {

IoStats& io_stats() {
  static IoStats stats;
  return stats;
}

std::string tsv_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\t') {
      out += "\\t";
    } else if (c == '\\') {
      out += "\\\\";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string tsv_unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
      continue;
    }
    if (i + 1 >= s.size()) throw DataError("dangling backslash in TSV field");
    char c = s[++i];
    if (c == 't') {
      out.push_back('\t');
    } else if (c == '\\') {
      out.push_back('\\');
    } else {
      throw DataError(std::string("bad TSV escape \"\\") + c + "\"");
    }
  }
  return out;
}

LineReader::LineReader(std::string path) : path_(std::move(path)), in_(path_, std::ios::binary) {
  if (!in_) throw DataError("cannot open " + path_);
}

std::optional<Sentence> LineReader::next() {
  if (!std::getline(in_, buf_)) {
    if (in_.bad()) throw DataError("read failure on " + path_);
    return std::nullopt;
  }
  ++line_no_;
  const std::uint64_t raw_bytes = buf_.size() + 1;  // include the newline
  if (buf_.find('\r') != std::string::npos) {
    buf_.erase(std::remove(buf_.begin(), buf_.end(), '\r'), buf_.end());
  }
  std::size_t bad = 0;
  if (!uni::is_valid_utf8(buf_, &bad)) {
    throw DataError("invalid UTF-8 at byte " + std::to_string(byte_offset_ + bad) + " (" +
                    path_ + ":" + std::to_string(line_no_) + ")");
  }
  byte_offset_ += raw_bytes;
  io_stats().note(buf_.size());
  return Sentence{buf_, line_no_};
}

LineWriter::LineWriter(std::string path) : path_(std::move(path)), out_(path_, std::ios::binary) {
  if (!out_) throw DataError("cannot open " + path_ + " for writing");
}

LineWriter::~LineWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
      // destructor must not throw; CLI paths call close() explicitly
    }
  }
}

void LineWriter::write(std::string_view text) {
  if (text.find('\n') != std::string_view::npos) {
    throw DataError("record contains a line break (writing " + path_ + ")");
  }
  out_.write(text.data(), static_cast<std::streamsize>(text.size()));
  out_.put('\n');
  if (!out_) throw DataError("write failure on " + path_);
  io_stats().note(text.size());
  ++count_;
}

void LineWriter::close() {
  closed_ = true;
  out_.flush();
  if (!out_) throw DataError("write failure on " + path_);
  out_.close();
}

PairReader::PairReader(std::string src_path, std::string tgt_path) : format_(PairFormat::TwoFile) {
  src_.emplace(std::move(src_path));
  tgt_.emplace(std::move(tgt_path));
}

PairReader::PairReader(std::string tsv_path) : format_(PairFormat::Tsv) {
  tsv_.emplace(std::move(tsv_path));
}

std::optional<SentencePair> PairReader::next() {
  if (format_ == PairFormat::TwoFile) {
    auto s = src_->next();
    auto t = tgt_->next();
    if (s && t) return SentencePair{*s, *t};
    if (!s && !t) return std::nullopt;
    // Drain the longer side so the error can report both totals.
    auto& longer = s ? *src_ : *tgt_;
    while (longer.next()) {
    }
    throw DataError("line count mismatch: " + src_->path() + "=" +
                    std::to_string(src_->lines_read()) + " " + tgt_->path() + "=" +
                    std::to_string(tgt_->lines_read()));
  }
  auto line = tsv_->next();
  if (!line) return std::nullopt;
  const std::string& raw = line->text;
  std::size_t tab = raw.find('\t');
  if (tab == std::string::npos) {
    throw DataError("TSV record without tab at " + tsv_->path() + ":" +
                    std::to_string(line->line_no));
  }
  if (raw.find('\t', tab + 1) != std::string::npos) {
    throw DataError("TSV record with more than two fields at " + tsv_->path() + ":" +
                    std::to_string(line->line_no));
  }
  SentencePair pair;
  pair.src = Sentence{tsv_unescape(std::string_view(raw).substr(0, tab)), line->line_no};
  pair.tgt = Sentence{tsv_unescape(std::string_view(raw).substr(tab + 1)), line->line_no};
  return pair;
}

PairWriter::PairWriter(std::string src_path, std::string tgt_path) : format_(PairFormat::TwoFile) {
  src_.emplace(std::move(src_path));
  tgt_.emplace(std::move(tgt_path));
}

PairWriter::PairWriter(std::string tsv_path) : format_(PairFormat::Tsv) {
  tsv_.emplace(std::move(tsv_path));
}

void PairWriter::write(const SentencePair& pair) {
  if (format_ == PairFormat::TwoFile) {
    src_->write(pair.src.text);
    tgt_->write(pair.tgt.text);
  } else {
    tsv_->write(tsv_escape(pair.src.text) + "\t" + tsv_escape(pair.tgt.text));
  }
  ++count_;
}

void PairWriter::close() {
  if (format_ == PairFormat::TwoFile) {
    src_->close();
    tgt_->close();
  } else {
    tsv_->close();
  }
}

std::vector<std::uint64_t> ShardPlan::sizes(std::uint64_t lines, std::size_t shard_count) {
  if (shard_count == 0) throw UsageError("shard count must be positive");
  std::vector<std::uint64_t> out(shard_count, lines / shard_count);
  const std::uint64_t rem = lines % shard_count;
  for (std::uint64_t i = 0; i < rem; ++i) ++out[i];
  return out;
}

std::vector<std::string> shard_file(const std::string& path, const ShardPlan& plan,
                                    const std::string& out_prefix) {
  const std::uint64_t lines = count_lines(path);
  const auto sizes = ShardPlan::sizes(lines, plan.shard_count);
  const std::string& prefix = out_prefix.empty() ? path : out_prefix;

  std::vector<std::string> names;
  names.reserve(plan.shard_count);
  LineReader in(path);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, ".shard%03zu", i);
    names.push_back(prefix + suffix);
    LineWriter out(names.back());
    for (std::uint64_t k = 0; k < sizes[i]; ++k) {
      auto s = in.next();
      if (!s) throw DataError("file shrank while sharding: " + path);
      out.write(s->text);
    }
    out.close();
  }
  return names;
}

std::uint64_t count_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::uint64_t lines = 0;
  char buf[1 << 16];
  bool last_was_newline = true;
  bool any = false;
  while (in.read(buf, sizeof buf), in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    any = true;
    for (std::streamsize i = 0; i < n; ++i) {
      if (buf[i] == '\n') ++lines;
    }
    last_was_newline = buf[n - 1] == '\n';
  }
  if (any && !last_was_newline) ++lines;  // final line without trailing newline
  return lines;
}

std::vector<Sentence> read_mono(const std::string& path) {
  std::vector<Sentence> out;
  LineReader in(path);
  while (auto s = in.next()) out.push_back(std::move(*s));
  return out;
}

std::vector<SentencePair> read_pairs(const std::string& src_path, const std::string& tgt_path) {
  std::vector<SentencePair> out;
  PairReader in(src_path, tgt_path);
  while (auto p = in.next()) out.push_back(std::move(*p));
  return out;
}

std::uint64_t write_mono(const std::vector<Sentence>& lines, const std::string& path) {
  LineWriter out(path);
  for (const auto& s : lines) out.write(s.text);
  out.close();
  return lines.size();
}

std::uint64_t write_pairs(const std::vector<SentencePair>& pairs, const std::string& src_path,
                          const std::string& tgt_path) {
  PairWriter out(src_path, tgt_path);
  for (const auto& p : pairs) out.write(p);
  out.close();
  return pairs.size();
}

}  // namespace forge
