// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "forge/dedup.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <memory>
#include <numeric>
#include <queue>

#include "forge/common.hpp"
#include "forge/textdist.hpp"
#include "forge/unicode.hpp"

namespace forge {

namespace {

void check_config(const DedupConfig& cfg) {
  if (!(cfg.threshold > 0.0 && cfg.threshold <= 1.0)) {
    throw UsageError("dedup threshold must be in (0, 1]");
  }
}

// Walks records already in sorted key order and invokes on_group once per
// chained group with the member ordinals. Chaining is transitive over
// adjacency: each member is near its sorted neighbor.
class GroupWalker {
 public:
  GroupWalker(double threshold, std::function<void(const std::vector<std::uint64_t>&)> on_group)
      : threshold_(threshold), on_group_(std::move(on_group)) {}

  void feed(const std::string& key, std::uint64_t ordinal) {
    std::u32string decoded = uni::decode_utf8(key);
    if (!group_.empty() && !lev_ratio_at_least(prev_, decoded, threshold_)) {
      flush();
    }
    group_.push_back(ordinal);
    prev_ = std::move(decoded);
  }

  void finish() {
    if (!group_.empty()) flush();
  }

 private:
  void flush() {
    on_group_(group_);
    group_.clear();
  }

  double threshold_;
  std::function<void(const std::vector<std::uint64_t>&)> on_group_;
  std::vector<std::uint64_t> group_;
  std::u32string prev_;
};

// Picks the kept ordinal per group and marks it in the bitmap.
struct RepresentativePicker {
  Rng rng;
  std::vector<bool>& kept;
  DedupStats& stats;

  void operator()(const std::vector<std::uint64_t>& group) {
    const std::uint64_t pick = rng.bounded(group.size());
    kept[group[pick]] = true;
    if (group.size() > 1) {
      ++stats.groups;
      stats.removed += group.size() - 1;
    }
  }
};

std::vector<bool> kept_mask_for_keys(const std::vector<std::string>& keys,
                                     const DedupConfig& cfg, DedupStats& stats) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return a < b;
  });

  std::vector<bool> kept(keys.size(), false);
  RepresentativePicker pick{Rng(cfg.seed), kept, stats};
  GroupWalker walker(cfg.threshold, [&](const std::vector<std::uint64_t>& g) { pick(g); });
  for (std::size_t idx : order) walker.feed(keys[idx], idx);
  walker.finish();
  return kept;
}

std::string run_file_name(const std::string& prefix, std::uint64_t run) {
  return prefix + ".run" + std::to_string(run);
}

}  // namespace

// ---------------------------------------------------------------------------
// ExternalSorter

struct ExternalSorter::Impl {
  std::string temp_prefix;
  std::size_t buffer_records;
  unsigned workers;

  std::vector<Record> buffer;
  std::vector<std::string> run_paths;
  std::future<void> pending_spill;

  // drain state
  bool finished = false;
  std::vector<std::unique_ptr<LineReader>> run_readers;
  struct HeapItem {
    std::string key;
    std::uint64_t ordinal;
    std::size_t run;
  };
  struct HeapCmp {
    bool operator()(const HeapItem& a, const HeapItem& b) const {
      if (a.key != b.key) return a.key > b.key;  // min-heap
      return a.ordinal > b.ordinal;
    }
  };
  std::priority_queue<HeapItem, std::vector<HeapItem>, HeapCmp> heap;
  std::size_t mem_pos = 0;

  static bool record_less(const Record& a, const Record& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.ordinal < b.ordinal;
  }

  void write_run(std::vector<Record> records, const std::string& path) {
    std::sort(records.begin(), records.end(), record_less);
    LineWriter out(path);
    std::string line;
    for (const auto& r : records) {
      line = std::to_string(r.ordinal);
      line.push_back('\t');
      line += r.key;
      out.write(line);
    }
    out.close();
  }

  void spill() {
    if (pending_spill.valid()) pending_spill.get();
    const std::string path = run_file_name(temp_prefix, run_paths.size());
    run_paths.push_back(path);
    std::vector<Record> batch;
    batch.swap(buffer);
    buffer.reserve(buffer_records);
    if (workers > 1) {
      pending_spill = std::async(std::launch::async,
                                 [this, b = std::move(batch), path]() mutable {
                                   write_run(std::move(b), path);
                                 });
    } else {
      write_run(std::move(batch), path);
    }
  }

  static Record parse(const Sentence& line, const std::string& path) {
    const std::size_t tab = line.text.find('\t');
    if (tab == std::string::npos) throw DataError("corrupt sort run " + path);
    Record r;
    r.ordinal = std::stoull(line.text.substr(0, tab));
    r.key = line.text.substr(tab + 1);
    return r;
  }

  void push_from_run(std::size_t run) {
    if (auto line = run_readers[run]->next()) {
      Record r = parse(*line, run_paths[run]);
      heap.push(HeapItem{std::move(r.key), r.ordinal, run});
    }
  }
};

ExternalSorter::ExternalSorter(std::string temp_prefix, std::size_t buffer_records,
                               unsigned workers)
    : impl_(std::make_unique<Impl>()) {
  if (buffer_records == 0) throw UsageError("sort buffer must be positive");
  impl_->temp_prefix = std::move(temp_prefix);
  impl_->buffer_records = buffer_records;
  impl_->workers = workers;
  impl_->buffer.reserve(std::min<std::size_t>(buffer_records, 1u << 16));
}

ExternalSorter::~ExternalSorter() {
  if (impl_ && impl_->pending_spill.valid()) {
    try {
      impl_->pending_spill.get();
    } catch (...) {
    }
  }
  if (impl_) {
    for (const auto& p : impl_->run_paths) std::remove(p.c_str());
  }
}

void ExternalSorter::add(std::string key, std::uint64_t ordinal) {
  impl_->buffer.push_back(Record{std::move(key), ordinal});
  stats_.max_buffered_records =
      std::max<std::uint64_t>(stats_.max_buffered_records, impl_->buffer.size());
  if (impl_->buffer.size() >= impl_->buffer_records) impl_->spill();
}

void ExternalSorter::finish() {
  if (impl_->finished) return;
  impl_->finished = true;
  if (impl_->run_paths.empty()) {
    // Everything fit in one buffer: drain from memory.
    std::sort(impl_->buffer.begin(), impl_->buffer.end(), Impl::record_less);
    stats_.runs = 0;
    return;
  }
  if (!impl_->buffer.empty()) impl_->spill();
  if (impl_->pending_spill.valid()) impl_->pending_spill.get();
  stats_.runs = impl_->run_paths.size();
  for (std::size_t r = 0; r < impl_->run_paths.size(); ++r) {
    impl_->run_readers.push_back(std::make_unique<LineReader>(impl_->run_paths[r]));
  }
  for (std::size_t r = 0; r < impl_->run_readers.size(); ++r) impl_->push_from_run(r);
}

std::optional<ExternalSorter::Record> ExternalSorter::next() {
  if (!impl_->finished) throw ForgeError("ExternalSorter::next before finish");
  if (impl_->run_paths.empty()) {
    if (impl_->mem_pos >= impl_->buffer.size()) return std::nullopt;
    return impl_->buffer[impl_->mem_pos++];
  }
  if (impl_->heap.empty()) return std::nullopt;
  Impl::HeapItem top = impl_->heap.top();
  impl_->heap.pop();
  impl_->push_from_run(top.run);
  return Record{std::move(top.key), top.ordinal};
}

// ---------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> near_dup_groups(const std::vector<std::string>& sentences,
                                                      const DedupConfig& cfg) {
  check_config(cfg);
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sentences[a] != sentences[b]) return sentences[a] < sentences[b];
    return a < b;
  });

  std::vector<std::vector<std::size_t>> groups;
  GroupWalker walker(cfg.threshold, [&](const std::vector<std::uint64_t>& g) {
    std::vector<std::size_t> members(g.begin(), g.end());
    std::sort(members.begin(), members.end());
    groups.push_back(std::move(members));
  });
  for (std::size_t idx : order) walker.feed(sentences[idx], idx);
  walker.finish();
  return groups;
}

std::pair<std::vector<SentencePair>, DedupStats> dedup_pairs(
    const std::vector<SentencePair>& pairs, const DedupConfig& cfg) {
  check_config(cfg);
  if (cfg.side == DedupSide::Mono) {
    throw UsageError("side=mono needs a monolingual corpus; use dedup_mono");
  }
  DedupStats stats;
  stats.input = pairs.size();

  std::vector<std::string> keys;
  keys.reserve(pairs.size());
  for (const auto& p : pairs) {
    keys.push_back(cfg.side == DedupSide::Src ? p.src.text : p.tgt.text);
  }
  const std::vector<bool> kept = kept_mask_for_keys(keys, cfg, stats);

  std::vector<SentencePair> out;
  out.reserve(pairs.size() - stats.removed);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (kept[i]) out.push_back(pairs[i]);
  }
  stats.kept = out.size();
  return {std::move(out), stats};
}

std::pair<std::vector<Sentence>, DedupStats> dedup_mono(const std::vector<Sentence>& sentences,
                                                        const DedupConfig& cfg) {
  check_config(cfg);
  DedupStats stats;
  stats.input = sentences.size();

  std::vector<std::string> keys;
  keys.reserve(sentences.size());
  for (const auto& s : sentences) keys.push_back(s.text);
  const std::vector<bool> kept = kept_mask_for_keys(keys, cfg, stats);

  std::vector<Sentence> out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (kept[i]) out.push_back(sentences[i]);
  }
  stats.kept = out.size();
  return {std::move(out), stats};
}

DedupStats dedup_files(const DedupFileJob& job, const DedupConfig& cfg) {
  check_config(cfg);
  const bool mono = job.tgt_path.empty();
  if (mono != (cfg.side == DedupSide::Mono)) {
    throw UsageError(mono ? "monolingual input requires side=mono"
                          : "parallel input requires side=src or side=tgt");
  }

  DedupStats stats;
  const std::string temp_prefix =
      (job.temp_dir.empty() ? job.out_src : job.temp_dir + "/sort") + ".tmp";
  ExternalSorter sorter(temp_prefix, job.sort_buffer_lines, job.workers);

  // Pass 1: feed (key, ordinal) into the sorter.
  std::uint64_t total = 0;
  if (mono) {
    LineReader in(job.src_path);
    while (auto s = in.next()) sorter.add(std::move(s->text), total++);
  } else {
    PairReader in(job.src_path, job.tgt_path);
    while (auto p = in.next()) {
      sorter.add(cfg.side == DedupSide::Src ? std::move(p->src.text) : std::move(p->tgt.text),
                 total++);
    }
  }
  stats.input = total;

  // Pass 2: walk sorted adjacency, pick representatives.
  sorter.finish();
  std::vector<bool> kept(total, false);
  RepresentativePicker pick{Rng(cfg.seed), kept, stats};
  GroupWalker walker(cfg.threshold, [&](const std::vector<std::uint64_t>& g) { pick(g); });
  while (auto rec = sorter.next()) walker.feed(rec->key, rec->ordinal);
  walker.finish();
  stats.sort = sorter.stats();

  // Pass 3: re-read the corpus, emit survivors in original order.
  std::uint64_t ordinal = 0;
  if (mono) {
    LineReader in(job.src_path);
    LineWriter out(job.out_src);
    while (auto s = in.next()) {
      if (kept[ordinal++]) out.write(s->text);
    }
    out.close();
  } else {
    PairReader in(job.src_path, job.tgt_path);
    PairWriter out(job.out_src, job.out_tgt);
    while (auto p = in.next()) {
      if (kept[ordinal++]) out.write(*p);
    }
    out.close();
  }
  stats.kept = stats.input - stats.removed;
  return stats;
}

}  // namespace forge
