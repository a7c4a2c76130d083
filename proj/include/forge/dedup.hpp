// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forge/corpus_io.hpp"

namespace forge {

enum class DedupSide { Src, Tgt, Mono };

struct DedupConfig {
  double threshold = 0.9;  // in (0, 1]
  DedupSide side = DedupSide::Src;
  std::uint64_t seed = 0;
};

struct ExternalSortStats {
  std::uint64_t max_buffered_records = 0;
  std::uint64_t runs = 0;
};

struct DedupStats {
  std::uint64_t input = 0;
  std::uint64_t kept = 0;
  std::uint64_t removed = 0;
  std::uint64_t groups = 0;  // near-duplicate clusters (size >= 2)
  ExternalSortStats sort;
};

// Sorts the sentences lexicographically (scalar-value order; identical to
// byte order for valid UTF-8), walks adjacent neighbors, and chains runs with
// lev_ratio >= threshold into groups. Every index appears in exactly one
// group; groups are returned in sorted-key order with ascending members.
std::vector<std::vector<std::size_t>> near_dup_groups(const std::vector<std::string>& sentences,
                                                      const DedupConfig& cfg);

// Keeps one uniformly chosen representative per group (seeded), emitting the
// survivors in original corpus order.
std::pair<std::vector<SentencePair>, DedupStats> dedup_pairs(
    const std::vector<SentencePair>& pairs, const DedupConfig& cfg);

std::pair<std::vector<Sentence>, DedupStats> dedup_mono(const std::vector<Sentence>& sentences,
                                                        const DedupConfig& cfg);

// File-to-file dedup backed by an external merge sort so corpora never load
// whole. tgt paths are empty for monolingual inputs (side must be Mono).
struct DedupFileJob {
  std::string src_path;
  std::string tgt_path;  // empty => mono corpus
  std::string out_src;
  std::string out_tgt;
  std::size_t sort_buffer_lines = 1u << 20;
  unsigned workers = 1;
  std::string temp_dir;  // empty: alongside out_src
};

DedupStats dedup_files(const DedupFileJob& job, const DedupConfig& cfg);

// External merge sort of (key, ordinal) records ordered by (key bytes,
// ordinal). Spills sorted runs of at most buffer_records and k-way merges
// them on drain. With workers > 1 the spill sort+write overlaps reading.
class ExternalSorter {
 public:
  struct Record {
    std::string key;
    std::uint64_t ordinal = 0;
  };

  ExternalSorter(std::string temp_prefix, std::size_t buffer_records, unsigned workers);
  ~ExternalSorter();

  void add(std::string key, std::uint64_t ordinal);
  void finish();                  // no adds after this
  std::optional<Record> next();   // sorted drain
  const ExternalSortStats& stats() const { return stats_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ExternalSortStats stats_;
};

}  // namespace forge
