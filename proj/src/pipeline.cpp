// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "forge/pipeline.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <thread>
#include <unordered_set>

#include "forge/common.hpp"
#include "forge/consensus.hpp"
#include "forge/select.hpp"
#include "forge/unicode.hpp"

namespace fs = std::filesystem;

namespace forge {

namespace {

constexpr std::string_view kStatusOk = "ok";
constexpr std::string_view kStatusFailed = "failed";

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string join_kv(const std::vector<std::pair<std::string, std::string>>& kv) {
  if (kv.empty()) return "-";
  std::string out;
  for (const auto& [k, v] : kv) {
    if (!out.empty()) out.push_back(';');
    out += k;
    out.push_back('=');
    out += v;
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_kv(std::string_view field) {
  std::vector<std::pair<std::string, std::string>> out;
  if (field == "-") return out;
  std::size_t pos = 0;
  while (pos <= field.size()) {
    const std::size_t semi = field.find(';', pos);
    std::string_view item = field.substr(
        pos, semi == std::string_view::npos ? std::string_view::npos : semi - pos);
    pos = semi == std::string_view::npos ? field.size() + 1 : semi + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw DataError("bad manifest field: " + std::string(item));
    out.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
  }
  return out;
}

std::string join_paths(const std::vector<std::string>& paths) {
  if (paths.empty()) return "-";
  std::string out;
  for (const auto& p : paths) {
    if (!out.empty()) out.push_back(';');
    out += p;
  }
  return out;
}

std::vector<std::string> parse_paths(std::string_view field) {
  std::vector<std::string> out;
  if (field == "-") return out;
  std::size_t pos = 0;
  while (pos <= field.size()) {
    const std::size_t semi = field.find(';', pos);
    std::string_view item = field.substr(
        pos, semi == std::string_view::npos ? std::string_view::npos : semi - pos);
    pos = semi == std::string_view::npos ? field.size() + 1 : semi + 1;
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

TranslatorSpec::Decode decode_from_name(const std::string& name) {
  if (name == "beam") return TranslatorSpec::Decode::Beam;
  if (name == "sampling") return TranslatorSpec::Decode::Sampling;
  throw UsageError("unknown decode strategy \"" + name + "\" (beam or sampling)");
}

TranslatorSpec translator_from_config(const ConfigFile& file, const std::string& prefix) {
  TranslatorSpec spec;
  spec.command_template = file.get_or(prefix + ".cmd", "");
  spec.decode = decode_from_name(file.get_or(prefix + ".strategy", "beam"));
  spec.sampling_p = file.get_double(prefix + ".p", 0.9);
  spec.timeout_secs = static_cast<int>(file.get_int(prefix + ".timeout", 600));
  return spec;
}

std::uint64_t round_seed(std::uint64_t seed, std::uint64_t round_idx) {
  return mix64(seed ^ mix64(round_idx + 1));
}

}  // namespace

void TranslatorSpec::validate() const {
  if (command_template.empty()) throw UsageError("translator command is empty");
  if (command_template.find("{in}") == std::string::npos ||
      command_template.find("{out}") == std::string::npos) {
    throw UsageError("translator command must contain {in} and {out}: " + command_template);
  }
  if (decode == Decode::Sampling && !(sampling_p > 0.0 && sampling_p <= 1.0)) {
    throw UsageError("sampling p must be in (0,1]");
  }
}

std::string TranslatorSpec::render(const std::string& in_path, const std::string& out_path,
                                   const std::string& direction) const {
  std::string cmd = command_template;
  cmd = replace_all(std::move(cmd), "{in}", in_path);
  cmd = replace_all(std::move(cmd), "{out}", out_path);
  cmd = replace_all(std::move(cmd), "{direction}", direction);
  cmd = replace_all(std::move(cmd), "{strategy}",
                    decode == Decode::Beam ? "beam" : "sampling");
  char p[32];
  std::snprintf(p, sizeof p, "%g", sampling_p);
  cmd = replace_all(std::move(cmd), "{p}", p);
  return cmd;
}

CommandResult run_command(const std::string& command, int timeout_secs,
                          std::uint64_t round_idx) {
  const pid_t pid = fork();
  if (pid < 0) throw TranslatorError("fork failed");
  if (pid == 0) {
    const std::string round = std::to_string(round_idx);
    setenv("FORGE_ROUND", round.c_str(), 1);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::seconds(timeout_secs);
  int status = 0;
  for (;;) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0) throw TranslatorError("waitpid failed for: " + command);
    if (timeout_secs > 0 && std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      return CommandResult{-1, true};
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

PipelineConfig PipelineConfig::from_config(const ConfigFile& file) {
  PipelineConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(file.get_int("seed", 0));
  cfg.workers = static_cast<unsigned>(file.get_int("workers", 1));
  cfg.out_dir = file.get_or("out.dir", "forge-pipeline");

  cfg.bitext_src = file.get_or("data.bitext.src", "");
  cfg.bitext_tgt = file.get_or("data.bitext.tgt", "");
  cfg.mono_tgt = file.get_or("data.mono.tgt", "");
  cfg.mono_src = file.get_or("data.mono.src", "");

  cfg.rounds_bt = static_cast<int>(file.get_int("bt.rounds", 0));
  cfg.rounds_kd = static_cast<int>(file.get_int("kd.rounds", 0));
  cfg.mix_ratio = file.get_double("bt.mix_ratio", 1.0);
  cfg.bt_tag = file.get_or("bt.tag", "<BT>");
  cfg.tag_enabled = file.get_bool("bt.tag_enabled", false);

  cfg.translator_rev = translator_from_config(file, "translator.rev");

  // kd.teacher.<n>.cmd entries, numerically ordered; translator.fwd is the
  // single-teacher fallback.
  std::vector<int> teacher_ids;
  for (const auto& key : file.keys_with_prefix("kd.teacher.")) {
    const std::size_t start = std::string("kd.teacher.").size();
    const std::size_t dot = key.find('.', start);
    if (dot == std::string::npos) continue;
    try {
      teacher_ids.push_back(std::stoi(key.substr(start, dot - start)));
    } catch (const std::exception&) {
      throw UsageError("bad teacher key: " + key);
    }
  }
  std::sort(teacher_ids.begin(), teacher_ids.end());
  teacher_ids.erase(std::unique(teacher_ids.begin(), teacher_ids.end()), teacher_ids.end());
  for (int id : teacher_ids) {
    cfg.teachers.push_back(
        translator_from_config(file, "kd.teacher." + std::to_string(id)));
  }
  if (cfg.teachers.empty() && file.has("translator.fwd.cmd")) {
    cfg.teachers.push_back(translator_from_config(file, "translator.fwd"));
  }

  auto select_from = [&file](const std::string& prefix) {
    SelectSettings sel;
    sel.in_model_path = file.get_or(prefix + ".in_model", "");
    sel.out_model_path = file.get_or(prefix + ".out_model", "");
    sel.quota = static_cast<std::uint64_t>(file.get_int(prefix + ".quota", 0));
    sel.match_lengths_path = file.get_or(prefix + ".match_lengths", "");
    return sel;
  };
  cfg.bt_select = select_from("bt.select");
  cfg.kd_select = select_from("kd.select");

  cfg.finetune_sets = split_list(file.get_or("finetune.sets", ""));
  cfg.finetune_out = file.get_or("finetune.out", "");
  cfg.manifest_path = file.get_or("manifest", "");
  return cfg;
}

void PipelineConfig::validate() const {
  if (rounds_bt < 0 || rounds_kd < 0) throw UsageError("round counts must be >= 0");
  if (!(mix_ratio > 0.0)) throw UsageError("bt.mix_ratio must be positive");
  if (workers < 1) throw UsageError("workers must be >= 1");

  const bool have_bitext = !bitext_src.empty() && !bitext_tgt.empty();
  if ((rounds_bt > 0 || rounds_kd > 0) && !have_bitext) {
    throw UsageError("data.bitext.src and data.bitext.tgt are required for BT/KD rounds");
  }
  if (rounds_bt > 0) {
    if (mono_tgt.empty()) throw UsageError("data.mono.tgt is required for BT rounds");
    translator_rev.validate();
    if (tag_enabled) {
      if (bt_tag.empty()) throw UsageError("bt.tag must be nonempty when tagging");
      for (char32_t cp : uni::decode_utf8(bt_tag)) {
        if (uni::is_whitespace(cp)) throw UsageError("bt.tag must not contain whitespace");
      }
    }
  }
  if (rounds_kd > 0) {
    if (mono_src.empty()) throw UsageError("data.mono.src is required for KD rounds");
    if (teachers.empty()) {
      throw UsageError("KD rounds need kd.teacher.<n>.cmd or translator.fwd.cmd");
    }
    for (const auto& t : teachers) t.validate();
  }
  for (const auto* sel : {&bt_select, &kd_select}) {
    if (sel->enabled() && sel->quota == 0) {
      throw UsageError("selection quota must be positive when selection models are set");
    }
    if (!sel->in_model_path.empty() != !sel->out_model_path.empty()) {
      throw UsageError("selection needs both in_model and out_model");
    }
  }
  if (!finetune_sets.empty() && finetune_out.empty()) {
    throw UsageError("finetune.out is required with finetune.sets");
  }
}

bool ManifestRecord::ok() const { return count_of("status") == kStatusOk; }

std::string ManifestRecord::count_of(const std::string& name) const {
  for (const auto& [k, v] : counts) {
    if (k == name) return v;
  }
  return "";
}

PipelineManifest PipelineManifest::load(const std::string& path) {
  PipelineManifest manifest;
  if (!fs::exists(path)) return manifest;

  LineReader in(path);
  while (auto line = in.next()) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    const std::string& text = line->text;
    while (pos <= text.size()) {
      const std::size_t tab = text.find('\t', pos);
      fields.push_back(
          text.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields.size() != 6) {
      throw DataError("bad manifest row at " + path + ":" + std::to_string(line->line_no));
    }
    ManifestRecord rec;
    rec.round_idx = std::stoull(fields[0]);
    rec.kind = fields[1];
    rec.input_digests = parse_kv(fields[2]);
    rec.output_paths = parse_paths(fields[3]);
    rec.counts = parse_kv(fields[4]);
    rec.seconds = std::stod(fields[5]);
    manifest.records_.push_back(std::move(rec));
  }
  return manifest;
}

void PipelineManifest::append(ManifestRecord record) {
  records_.push_back(std::move(record));
}

void PipelineManifest::truncate(std::size_t count) {
  if (records_.size() > count) records_.resize(count);
}

void PipelineManifest::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    LineWriter out(tmp);
    char secs[32];
    for (const auto& rec : records_) {
      std::snprintf(secs, sizeof secs, "%.3f", rec.seconds);
      out.write(std::to_string(rec.round_idx) + "\t" + rec.kind + "\t" +
                join_kv(rec.input_digests) + "\t" + join_paths(rec.output_paths) + "\t" +
                join_kv(rec.counts) + "\t" + secs);
    }
    out.close();
  }
  fs::rename(tmp, path);
}

Sentence tag_source(const Sentence& s, const std::string& tag) {
  if (tag.empty()) throw UsageError("tag must be nonempty");
  for (char32_t cp : uni::decode_utf8(tag)) {
    if (uni::is_whitespace(cp)) throw UsageError("tag must not contain whitespace");
  }
  if (s.text.empty()) return Sentence{tag, s.line_no};
  return Sentence{tag + " " + s.text, s.line_no};
}

std::vector<SentencePair> mix_corpora(const std::vector<SentencePair>& real,
                                      const std::vector<SentencePair>& pseudo, double ratio,
                                      std::uint64_t seed) {
  if (!(ratio > 0.0)) throw UsageError("mix ratio must be positive");
  const auto quota = static_cast<std::uint64_t>(
      std::llround(ratio * static_cast<double>(real.size())));

  Rng rng(seed);
  std::vector<SentencePair> out(real);
  if (quota >= pseudo.size()) {
    out.insert(out.end(), pseudo.begin(), pseudo.end());
  } else {
    // Reservoir sample without replacement, then restore pool order.
    std::vector<std::size_t> chosen(quota);
    for (std::size_t i = 0; i < quota; ++i) chosen[i] = i;
    for (std::size_t i = quota; i < pseudo.size(); ++i) {
      const std::uint64_t j = rng.bounded(i + 1);
      if (j < quota) chosen[j] = i;
    }
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t idx : chosen) out.push_back(pseudo[idx]);
  }
  rng.shuffle(out);
  return out;
}

std::vector<SentencePair> merge_corpora(const std::vector<SentencePair>& real,
                                        const std::vector<SentencePair>& pseudo,
                                        std::uint64_t seed) {
  std::vector<SentencePair> out(real);
  out.insert(out.end(), pseudo.begin(), pseudo.end());
  Rng rng(seed);
  rng.shuffle(out);
  return out;
}

FinetuneResult prepare_finetune(const std::vector<std::string>& set_paths,
                                const std::string& out_src, const std::string& out_tgt) {
  FinetuneResult result;
  std::unordered_set<Fingerprint128, Fingerprint128Hash> seen;
  PairWriter out(out_src, out_tgt);

  for (const auto& path : set_paths) {
    LineReader in(path);
    while (auto line = in.next()) {
      const std::string& text = line->text;
      const std::size_t t1 = text.find('\t');
      if (t1 == std::string::npos) {
        throw DataError("fine-tune set row without tab at " + path + ":" +
                        std::to_string(line->line_no));
      }
      const std::size_t t2 = text.find('\t', t1 + 1);
      std::string origin = t2 == std::string::npos ? "" : text.substr(t2 + 1);
      if (origin != "src_original" && origin != "tgt_original" && origin != "unknown") {
        origin = "";
      }
      if (origin.empty()) {
        ++result.warnings;
        continue;
      }
      if (origin != "src_original") continue;

      SentencePair pair;
      pair.src.text = tsv_unescape(text.substr(0, t1));
      pair.tgt.text = tsv_unescape(text.substr(t1 + 1, t2 - t1 - 1));
      pair.src.line_no = pair.tgt.line_no = line->line_no;

      std::string key;
      const std::uint64_t n = pair.src.text.size();
      for (int b = 0; b < 8; ++b) key.push_back(static_cast<char>((n >> (8 * b)) & 0xFF));
      key += pair.src.text;
      key += pair.tgt.text;
      if (!seen.insert(fingerprint128(key)).second) {
        ++result.duplicates;
        continue;
      }
      out.write(pair);
      ++result.kept;
    }
  }
  out.close();
  return result;
}

std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path + " for digest");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf), in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

// ---------------------------------------------------------------------------
// Round execution

namespace {

struct RoundPlan {
  std::string kind;  // BT, KD, FT
};

struct CorpusPaths {
  std::string src;
  std::string tgt;
};

std::string config_digest(const PipelineConfig& cfg) {
  std::string snap;
  snap += "seed=" + std::to_string(cfg.seed) + "\n";
  snap += "mix_ratio=" + std::to_string(cfg.mix_ratio) + "\n";
  snap += "tag=" + cfg.bt_tag + "\n";
  snap += "tag_enabled=" + std::to_string(cfg.tag_enabled) + "\n";
  snap += "rev=" + cfg.translator_rev.command_template + "\n";
  for (const auto& t : cfg.teachers) snap += "teacher=" + t.command_template + "\n";
  for (const auto* sel : {&cfg.bt_select, &cfg.kd_select}) {
    snap += "sel=" + sel->in_model_path + "," + sel->out_model_path + "," +
            std::to_string(sel->quota) + "," + sel->match_lengths_path + "\n";
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(snap)));
  return hex;
}

// In-domain selection over a monolingual pool; writes the chosen sentences to
// out_path and returns it. Falls through to the raw pool when disabled.
std::string maybe_select(const SelectSettings& sel, const std::string& pool_path,
                         const std::string& out_path, const ProfileRegistry& profiles,
                         unsigned workers, std::uint64_t seed) {
  if (!sel.enabled()) return pool_path;

  const NGramModel in_model = NGramModel::load(sel.in_model_path);
  const NGramModel out_model = NGramModel::load(sel.out_model_path);
  const LanguageProfile& profile = profiles.get(in_model.lang());
  const std::vector<Sentence> pool = read_mono(pool_path);

  std::vector<ScoredSentence> chosen;
  if (!sel.match_lengths_path.empty()) {
    const LengthHistogram hist =
        length_histogram(read_mono(sel.match_lengths_path), profile);
    std::vector<ScoredSentence> scored(pool.size());
    parallel_for(pool.size(), workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        scored[i] =
            ScoredSentence{pool[i], moore_lewis_score(in_model, out_model, pool[i], profile)};
      }
    });
    chosen = sample_matched(scored, hist, sel.quota, seed, profile);
  } else {
    chosen = select_topk(pool, in_model, out_model, sel.quota, profile, workers);
  }

  LineWriter out(out_path);
  for (const auto& s : chosen) out.write(s.sentence.text);
  out.close();
  return out_path;
}

// Shards `input`, runs the translator over every shard (workers at a time),
// verifies per-shard line counts, and joins outputs in shard order.
std::vector<std::string> translate_corpus(const TranslatorSpec& translator,
                                          const std::string& input,
                                          const std::string& work_prefix,
                                          const std::string& direction, unsigned workers,
                                          std::uint64_t round_idx) {
  const std::uint64_t lines = count_lines(input);
  const std::size_t shard_count =
      std::max<std::size_t>(1, std::min<std::size_t>(workers, lines == 0 ? 1 : lines));
  const auto shards = shard_file(input, ShardPlan{shard_count}, work_prefix);

  struct ShardJob {
    std::string in_path;
    std::string out_path;
    CommandResult result;
  };
  std::vector<ShardJob> jobs;
  for (const auto& shard : shards) jobs.push_back(ShardJob{shard, shard + ".out", {}});

  for (std::size_t base = 0; base < jobs.size(); base += workers) {
    const std::size_t end = std::min(jobs.size(), base + workers);
    std::vector<std::future<CommandResult>> wave;
    for (std::size_t i = base; i < end; ++i) {
      wave.push_back(std::async(std::launch::async, [&, i] {
        return run_command(translator.render(jobs[i].in_path, jobs[i].out_path, direction),
                           translator.timeout_secs, round_idx);
      }));
    }
    for (std::size_t i = base; i < end; ++i) jobs[i].result = wave[i - base].get();
  }

  for (const auto& job : jobs) {
    if (job.result.timed_out) {
      throw TranslatorError("translator timed out on shard " + job.in_path);
    }
    if (job.result.exit_code != 0) {
      throw TranslatorError("translator exited with " + std::to_string(job.result.exit_code) +
                            " on shard " + job.in_path);
    }
  }

  std::vector<std::string> output;
  output.reserve(lines);
  for (const auto& job : jobs) {
    const std::uint64_t in_lines = count_lines(job.in_path);
    const std::uint64_t out_lines = count_lines(job.out_path);
    if (in_lines != out_lines) {
      throw TranslatorError("translator wrote " + std::to_string(out_lines) + " lines for " +
                            std::to_string(in_lines) + " inputs on shard " + job.in_path);
    }
    LineReader in(job.out_path);
    while (auto s = in.next()) output.push_back(std::move(s->text));
  }
  return output;
}

ManifestRecord execute_bt_round(const PipelineConfig& cfg, const ProfileRegistry& profiles,
                                std::uint64_t round_idx, const CorpusPaths& cur,
                                const std::string& round_dir,
                                std::vector<std::pair<std::string, std::string>> inputs,
                                CorpusPaths& next) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(round_dir);
  const std::uint64_t seed = round_seed(cfg.seed, round_idx);

  const std::string mono = maybe_select(cfg.bt_select, cfg.mono_tgt,
                                        round_dir + "/mono.selected", profiles, cfg.workers,
                                        seed);
  const std::vector<std::string> pseudo_src = translate_corpus(
      cfg.translator_rev, mono, round_dir + "/mono", "rev", cfg.workers, round_idx);

  const std::vector<Sentence> mono_lines = read_mono(mono);
  if (mono_lines.size() != pseudo_src.size()) {
    throw TranslatorError("joined translation has " + std::to_string(pseudo_src.size()) +
                          " lines for " + std::to_string(mono_lines.size()) + " inputs");
  }

  std::vector<SentencePair> pseudo(mono_lines.size());
  for (std::size_t i = 0; i < mono_lines.size(); ++i) {
    Sentence src{pseudo_src[i], i + 1};
    if (cfg.tag_enabled) src = tag_source(src, cfg.bt_tag);
    pseudo[i] = SentencePair{std::move(src), mono_lines[i]};
  }

  const std::vector<SentencePair> real = read_pairs(cur.src, cur.tgt);
  const std::vector<SentencePair> mixed = mix_corpora(real, pseudo, cfg.mix_ratio, seed);

  next.src = round_dir + "/corpus.src";
  next.tgt = round_dir + "/corpus.tgt";
  write_pairs(mixed, next.src, next.tgt);

  ManifestRecord rec;
  rec.round_idx = round_idx;
  rec.kind = "BT";
  rec.input_digests = std::move(inputs);
  rec.output_paths = {next.src, next.tgt};
  rec.counts = {{"real", std::to_string(real.size())},
                {"pseudo_pool", std::to_string(pseudo.size())},
                {"pseudo_used", std::to_string(mixed.size() - real.size())},
                {"total", std::to_string(mixed.size())},
                {"seed", std::to_string(cfg.seed)},
                {"cfg", config_digest(cfg)},
                {"out0_digest", digest_file(next.src)},
                {"out1_digest", digest_file(next.tgt)},
                {"status", std::string(kStatusOk)}};
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

ManifestRecord execute_kd_round(const PipelineConfig& cfg, const ProfileRegistry& profiles,
                                std::uint64_t round_idx, const CorpusPaths& cur,
                                const std::string& round_dir,
                                std::vector<std::pair<std::string, std::string>> inputs,
                                CorpusPaths& next) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(round_dir);
  const std::uint64_t seed = round_seed(cfg.seed, round_idx);

  const std::string mono = maybe_select(cfg.kd_select, cfg.mono_src,
                                        round_dir + "/mono.selected", profiles, cfg.workers,
                                        seed);

  std::vector<std::vector<std::string>> teacher_outputs;
  for (std::size_t t = 0; t < cfg.teachers.size(); ++t) {
    teacher_outputs.push_back(translate_corpus(cfg.teachers[t], mono,
                                               round_dir + "/teacher" + std::to_string(t),
                                               "fwd", cfg.workers, round_idx));
  }

  const std::vector<Sentence> mono_lines = read_mono(mono);
  for (std::size_t t = 0; t < teacher_outputs.size(); ++t) {
    if (teacher_outputs[t].size() != mono_lines.size()) {
      throw TranslatorError("teacher " + std::to_string(t) + " output misaligned");
    }
  }

  std::vector<std::string> target_lines;
  if (teacher_outputs.size() == 1) {
    target_lines = std::move(teacher_outputs[0]);
  } else {
    SystemOutputs outputs;
    outputs.systems = std::move(teacher_outputs);
    const auto choices = select_consensus(outputs, cfg.workers);
    target_lines.reserve(choices.size());
    for (const auto& c : choices) target_lines.push_back(c.chosen_text);
  }

  std::vector<SentencePair> pseudo(mono_lines.size());
  for (std::size_t i = 0; i < mono_lines.size(); ++i) {
    pseudo[i] = SentencePair{mono_lines[i], Sentence{target_lines[i], i + 1}};
  }

  const std::vector<SentencePair> real = read_pairs(cur.src, cur.tgt);
  const std::vector<SentencePair> merged = merge_corpora(real, pseudo, seed);

  next.src = round_dir + "/corpus.src";
  next.tgt = round_dir + "/corpus.tgt";
  write_pairs(merged, next.src, next.tgt);

  ManifestRecord rec;
  rec.round_idx = round_idx;
  rec.kind = "KD";
  rec.input_digests = std::move(inputs);
  rec.output_paths = {next.src, next.tgt};
  rec.counts = {{"real", std::to_string(real.size())},
                {"pseudo", std::to_string(pseudo.size())},
                {"teachers", std::to_string(cfg.teachers.size())},
                {"total", std::to_string(merged.size())},
                {"seed", std::to_string(cfg.seed)},
                {"cfg", config_digest(cfg)},
                {"out0_digest", digest_file(next.src)},
                {"out1_digest", digest_file(next.tgt)},
                {"status", std::string(kStatusOk)}};
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

ManifestRecord execute_ft_round(const PipelineConfig& cfg, std::uint64_t round_idx,
                                const std::string& round_dir,
                                std::vector<std::pair<std::string, std::string>> inputs) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(round_dir);

  const std::string out_src = cfg.finetune_out + ".src";
  const std::string out_tgt = cfg.finetune_out + ".tgt";
  const FinetuneResult result = prepare_finetune(cfg.finetune_sets, out_src, out_tgt);

  ManifestRecord rec;
  rec.round_idx = round_idx;
  rec.kind = "FT";
  rec.input_digests = std::move(inputs);
  rec.output_paths = {out_src, out_tgt};
  rec.counts = {{"kept", std::to_string(result.kept)},
                {"warnings", std::to_string(result.warnings)},
                {"duplicates", std::to_string(result.duplicates)},
                {"seed", std::to_string(cfg.seed)},
                {"cfg", config_digest(cfg)},
                {"out0_digest", digest_file(out_src)},
                {"out1_digest", digest_file(out_tgt)},
                {"status", std::string(kStatusOk)}};
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

void append_select_inputs(const SelectSettings& sel,
                          std::vector<std::pair<std::string, std::string>>& inputs) {
  if (!sel.enabled()) return;
  inputs.emplace_back(sel.in_model_path, digest_file(sel.in_model_path));
  inputs.emplace_back(sel.out_model_path, digest_file(sel.out_model_path));
  if (!sel.match_lengths_path.empty()) {
    inputs.emplace_back(sel.match_lengths_path, digest_file(sel.match_lengths_path));
  }
}

// Shared by planning (resume checks) and execution (the recorded row), so a
// completed round is skipped only while every input it read is unchanged.
std::vector<std::pair<std::string, std::string>> planned_inputs(const PipelineConfig& cfg,
                                                                const RoundPlan& plan,
                                                                const CorpusPaths& cur) {
  std::vector<std::pair<std::string, std::string>> inputs;
  if (plan.kind == "BT") {
    inputs = {{cur.src, digest_file(cur.src)},
              {cur.tgt, digest_file(cur.tgt)},
              {cfg.mono_tgt, digest_file(cfg.mono_tgt)}};
    append_select_inputs(cfg.bt_select, inputs);
  } else if (plan.kind == "KD") {
    inputs = {{cur.src, digest_file(cur.src)},
              {cur.tgt, digest_file(cur.tgt)},
              {cfg.mono_src, digest_file(cfg.mono_src)}};
    append_select_inputs(cfg.kd_select, inputs);
  } else {
    for (const auto& set : cfg.finetune_sets) {
      inputs.emplace_back(set, digest_file(set));
    }
  }
  return inputs;
}

bool outputs_intact(const ManifestRecord& rec) {
  for (std::size_t i = 0; i < rec.output_paths.size(); ++i) {
    const std::string& path = rec.output_paths[i];
    if (!fs::exists(path)) return false;
    const std::string want = rec.count_of("out" + std::to_string(i) + "_digest");
    if (want.empty() || digest_file(path) != want) return false;
  }
  return true;
}

void quarantine(const std::string& round_dir) {
  if (!fs::exists(round_dir)) return;
  const std::string target = round_dir + ".quarantine";
  std::error_code ec;
  fs::remove_all(target, ec);
  fs::rename(round_dir, target, ec);
}

}  // namespace

PipelineManifest run_pipeline(const PipelineConfig& cfg, const ProfileRegistry& profiles) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const std::string manifest_path =
      cfg.manifest_path.empty() ? cfg.out_dir + "/manifest.tsv" : cfg.manifest_path;

  std::vector<RoundPlan> plans;
  for (int r = 0; r < cfg.rounds_bt; ++r) plans.push_back(RoundPlan{"BT"});
  for (int r = 0; r < cfg.rounds_kd; ++r) plans.push_back(RoundPlan{"KD"});
  if (!cfg.finetune_sets.empty()) plans.push_back(RoundPlan{"FT"});

  PipelineManifest manifest = PipelineManifest::load(manifest_path);
  const std::string cfg_digest = config_digest(cfg);

  CorpusPaths cur{cfg.bitext_src, cfg.bitext_tgt};
  for (std::size_t idx = 0; idx < plans.size(); ++idx) {
    const RoundPlan& plan = plans[idx];
    const std::string round_dir = cfg.out_dir + "/round" + std::to_string(idx) + "_" +
                                  (plan.kind == "BT" ? "bt" : plan.kind == "KD" ? "kd" : "ft");

    const auto inputs = planned_inputs(cfg, plan, cur);
    if (idx < manifest.records().size()) {
      const ManifestRecord& rec = manifest.records()[idx];
      if (rec.kind == plan.kind && rec.ok() && rec.input_digests == inputs &&
          rec.count_of("cfg") == cfg_digest && outputs_intact(rec)) {
        if (plan.kind != "FT") {
          cur = CorpusPaths{rec.output_paths[0], rec.output_paths[1]};
        }
        continue;  // digests match: replaying this round is a no-op
      }
      manifest.truncate(idx);
    }

    std::error_code ec;
    fs::remove_all(round_dir, ec);

    ManifestRecord rec;
    try {
      CorpusPaths next = cur;
      if (plan.kind == "BT") {
        rec = execute_bt_round(cfg, profiles, idx, cur, round_dir, inputs, next);
      } else if (plan.kind == "KD") {
        rec = execute_kd_round(cfg, profiles, idx, cur, round_dir, inputs, next);
      } else {
        rec = execute_ft_round(cfg, idx, round_dir, inputs);
      }
      cur = next;
    } catch (const TranslatorError& e) {
      quarantine(round_dir);
      // Keep the message TSV- and kv-safe.
      std::string why = e.what();
      for (char& c : why) {
        if (c == '\t' || c == '\n' || c == ';') c = ' ';
        if (c == '=') c = ':';
      }
      ManifestRecord failed;
      failed.round_idx = idx;
      failed.kind = plan.kind;
      failed.input_digests = inputs;
      failed.counts = {{"error", why},
                       {"seed", std::to_string(cfg.seed)},
                       {"cfg", cfg_digest},
                       {"status", std::string(kStatusFailed)}};
      manifest.append(std::move(failed));
      manifest.save(manifest_path);
      throw;
    }
    manifest.append(std::move(rec));
    manifest.save(manifest_path);
  }

  manifest.truncate(plans.size());
  manifest.save(manifest_path);
  return manifest;
}

}  // namespace forge
