// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forge/config.hpp"
#include "forge/corpus_io.hpp"
#include "forge/tokenizer.hpp"

namespace forge {

// External translator contract: the command is run through /bin/sh with {in}
// and {out} substituted, must exit 0 and write exactly one output line per
// input line. FORGE_ROUND carries the round index in the environment.
struct TranslatorSpec {
  enum class Decode { Beam, Sampling };

  std::string command_template;  // {in} {out} and optional {direction} {strategy} {p}
  Decode decode = Decode::Beam;
  double sampling_p = 0.9;  // used only when decode == Sampling
  int timeout_secs = 600;

  void validate() const;  // template must contain {in} and {out}
  std::string render(const std::string& in_path, const std::string& out_path,
                     const std::string& direction) const;
};

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
};

CommandResult run_command(const std::string& command, int timeout_secs,
                          std::uint64_t round_idx);

// In-domain selection settings for a round family (empty model paths disable
// selection and the full monolingual pool is used).
struct SelectSettings {
  std::string in_model_path;
  std::string out_model_path;
  std::uint64_t quota = 0;
  std::string match_lengths_path;  // optional reference for length matching

  bool enabled() const { return !in_model_path.empty() && !out_model_path.empty(); }
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out_dir = "forge-pipeline";

  std::string bitext_src, bitext_tgt;
  std::string mono_tgt;  // back-translation pool (target language)
  std::string mono_src;  // knowledge-distillation pool (source language)

  int rounds_bt = 0;
  int rounds_kd = 0;
  double mix_ratio = 1.0;  // pseudo:real for BT rounds
  std::string bt_tag = "<BT>";
  bool tag_enabled = false;

  TranslatorSpec translator_rev;          // BT: target -> source
  std::vector<TranslatorSpec> teachers;   // KD: source -> target (consensus if > 1)

  SelectSettings bt_select, kd_select;

  std::vector<std::string> finetune_sets;  // TSV files src<TAB>tgt<TAB>origin
  std::string finetune_out;                // output prefix for the FT corpus

  std::string manifest_path;  // default <out_dir>/manifest.tsv

  static PipelineConfig from_config(const ConfigFile& file);
  void validate() const;
};

struct ManifestRecord {
  std::uint64_t round_idx = 0;
  std::string kind;  // BT, KD, FT
  std::vector<std::pair<std::string, std::string>> input_digests;
  std::vector<std::string> output_paths;
  std::vector<std::pair<std::string, std::string>> counts;  // includes status=ok|failed
  double seconds = 0.0;

  bool ok() const;
  std::string count_of(const std::string& name) const;  // "" if absent
};

class PipelineManifest {
 public:
  static PipelineManifest load(const std::string& path);  // empty if file missing

  const std::vector<ManifestRecord>& records() const { return records_; }
  void append(ManifestRecord record);
  void truncate(std::size_t count);
  void save(const std::string& path) const;  // write-temp-then-rename

 private:
  std::vector<ManifestRecord> records_;
};

// "<tag> <text>"; the tag itself for empty sentences. Not idempotent.
Sentence tag_source(const Sentence& s, const std::string& tag);

// All real pairs plus round(ratio*|real|) pseudo pairs drawn uniformly
// without replacement (the whole pool when smaller), shuffled by seed.
std::vector<SentencePair> mix_corpora(const std::vector<SentencePair>& real,
                                      const std::vector<SentencePair>& pseudo, double ratio,
                                      std::uint64_t seed);

// Synthetic + real concatenated and shuffled; KD merges everything.
std::vector<SentencePair> merge_corpora(const std::vector<SentencePair>& real,
                                        const std::vector<SentencePair>& pseudo,
                                        std::uint64_t seed);

struct FinetuneResult {
  std::uint64_t kept = 0;
  std::uint64_t warnings = 0;  // pairs with missing/unrecognized origin
  std::uint64_t duplicates = 0;
};

// Keeps pairs flagged src_original across the given sets, in order, with
// exact-pair dedup. Inputs are TSV rows src<TAB>tgt<TAB>origin where origin
// is src_original, tgt_original, or unknown.
FinetuneResult prepare_finetune(const std::vector<std::string>& set_paths,
                                const std::string& out_src, const std::string& out_tgt);

// Executes rounds_bt BT rounds, then rounds_kd KD rounds (each consuming the
// previous round's corpus), then fine-tune preparation when configured. The
// manifest is persisted after every round; rounds whose input and output
// digests already match are skipped, which makes reruns resumable.
PipelineManifest run_pipeline(const PipelineConfig& cfg, const ProfileRegistry& profiles);

std::string digest_file(const std::string& path);  // 16-hex content digest

}  // namespace forge
