// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
//
// forge — corpus engineering toolkit for machine translation data pipelines.
// Subcommands: filter, dedup, split, dist, lm-train, select, bleu, consensus,
// greedy, pipeline. Diagnostics go to stderr; data goes to files or stdout.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 translator failure.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "forge/bleu.hpp"
#include "forge/common.hpp"
#include "forge/config.hpp"
#include "forge/consensus.hpp"
#include "forge/corpus_io.hpp"
#include "forge/dedup.hpp"
#include "forge/filters.hpp"
#include "forge/ngram_lm.hpp"
#include "forge/pipeline.hpp"
#include "forge/select.hpp"
#include "forge/textdist.hpp"
#include "forge/tokenizer.hpp"
#include "forge/unicode.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct Globals {
  std::string config_path;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string log_level = "info";

  forge::ConfigFile config;
  forge::ProfileRegistry profiles;

  bool info() const { return log_level != "quiet"; }

  void load_config() {
    if (!config_path.empty()) config = forge::ConfigFile::parse_file(config_path);
    apply_profile_overrides(config);
  }

  void apply_profile_overrides(const forge::ConfigFile& file) {
    for (const auto& key : file.keys_with_prefix("profile.")) {
      // profile.<lang>.scripts / profile.<lang>.mode
      const std::size_t lang_begin = std::string("profile.").size();
      const std::size_t lang_end = key.find('.', lang_begin);
      if (lang_end == std::string::npos) throw forge::UsageError("bad config key: " + key);
      const std::string lang = key.substr(lang_begin, lang_end - lang_begin);
      const std::string field = key.substr(lang_end + 1);
      const std::string value = *file.get(key);
      if (field == "scripts") {
        profiles.set_scripts(lang, forge::split_list(value));
      } else if (field == "mode") {
        profiles.set_mode(lang, forge::mode_from_name(value));
      } else {
        throw forge::UsageError("unknown profile field in config key: " + key);
      }
    }
  }
};

void log_line(const Globals& g, const std::string& message) {
  if (g.info()) std::cerr << message << "\n";
}

// Flags override config values; config overrides built-in defaults.
template <typename T>
T effective(const CLI::Option* opt, T flag_value, T config_value) {
  return opt != nullptr && opt->count() > 0 ? flag_value : config_value;
}

forge::FilterConfig make_filter_config(const Globals& g, const std::string& src_lang,
                                       const std::string& tgt_lang, const CLI::Option* word_opt,
                                       int word, const CLI::Option* tok_opt, int tokens,
                                       const CLI::Option* ratio_opt, double ratio,
                                       const CLI::Option* other_opt, int other) {
  forge::FilterConfig cfg;
  cfg.max_word_chars = effective(word_opt, word,
                                 static_cast<int>(g.config.get_int("filter.max_word_chars", 40)));
  cfg.max_sentence_tokens =
      effective(tok_opt, tokens, static_cast<int>(g.config.get_int("filter.max_tokens", 150)));
  cfg.max_len_ratio = effective(ratio_opt, ratio, g.config.get_double("filter.max_ratio", 3.0));
  cfg.max_other_chars = effective(
      other_opt, other, static_cast<int>(g.config.get_int("filter.max_other_chars", 10)));
  cfg.src_profile = g.profiles.get(src_lang);
  cfg.tgt_profile = g.profiles.get(tgt_lang);
  cfg.validate();
  return cfg;
}

void write_filter_report(const forge::FilterReport& report, const std::string& path) {
  forge::LineWriter out(path);
  out.write("input\t" + std::to_string(report.input));
  out.write("kept\t" + std::to_string(report.kept));
  for (std::size_t i = 0; i < forge::kRuleCount; ++i) {
    out.write(std::string(forge::rule_name(static_cast<forge::RuleId>(i))) + "\t" +
              std::to_string(report.rejected[i]));
  }
  out.close();
}

std::uint64_t pass_seed(std::uint64_t seed, unsigned pass) {
  return pass == 0 ? seed : forge::mix64(seed ^ forge::mix64(pass));
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;

  CLI::App app{"forge — corpus engineering toolkit for MT data pipelines"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for all subcommands");

  std::string default_values =
      std::string("forge ") + kVersion +
      "\ndefault config values:\n"
      "  filter.max_word_chars = 40\n"
      "  filter.max_tokens = 150\n"
      "  filter.max_ratio = 3\n"
      "  filter.max_other_chars = 10\n"
      "  dedup.threshold = 0.9\n"
      "  dedup.sort_buffer = 1048576\n"
      "  lm.order = 3\n"
      "  lm.lambdas(order 3) = 0.5 0.3 0.15 0.05 (floor last)\n"
      "  greedy.max_size = 4\n"
      "  translator.p = 0.9\n"
      "  bt.tag = <BT>\n"
      "  bt.mix_ratio = 1.0\n";
  app.set_version_flag("--version", default_values);

  auto* seed_opt = app.add_option("--seed", g.seed, "Seed for all randomized stages");
  auto* workers_opt = app.add_option("--workers", g.workers, "Worker threads per stage")
                          ->check(CLI::PositiveNumber);
  app.add_option("--config", g.config_path, "Toolkit config file (key = value lines)");
  app.add_option("--log-level", g.log_level, "quiet, info, or debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));

  // --- filter ---------------------------------------------------------------
  auto* filter = app.add_subcommand("filter", "Apply the cleaning rules to a parallel corpus");
  struct {
    std::string src, tgt, src_lang, tgt_lang, out_prefix, report;
    int max_word_chars = 40, max_tokens = 150, max_other_chars = 10;
    double max_ratio = 3.0;
  } fil;
  filter->add_option("--src", fil.src, "Source-side file")->required();
  filter->add_option("--tgt", fil.tgt, "Target-side file")->required();
  filter->add_option("--src-lang", fil.src_lang, "Source language code")->required();
  filter->add_option("--tgt-lang", fil.tgt_lang, "Target language code")->required();
  filter->add_option("--out-prefix", fil.out_prefix, "Output prefix (.src/.tgt)")->required();
  filter->add_option("--report", fil.report, "Rejection report TSV (rule<TAB>count)");
  auto* f_word = filter->add_option("--max-word-chars", fil.max_word_chars);
  auto* f_tok = filter->add_option("--max-tokens", fil.max_tokens);
  auto* f_ratio = filter->add_option("--max-ratio", fil.max_ratio);
  auto* f_other = filter->add_option("--max-other-chars", fil.max_other_chars);

  // --- dedup ----------------------------------------------------------------
  auto* dedup = app.add_subcommand("dedup", "Near-duplicate removal (sorted adjacent ratio)");
  struct {
    std::string src, tgt, side = "src", out_prefix;
    double threshold = 0.9;
    std::size_t sort_buffer = 1u << 20;
  } dd;
  dedup->add_option("--src", dd.src, "Source-side file (or the mono file)")->required();
  dedup->add_option("--tgt", dd.tgt, "Target-side file (omit for monolingual)");
  dedup->add_option("--side", dd.side, "src, tgt, both, or mono")
      ->check(CLI::IsMember({"src", "tgt", "both", "mono"}));
  dedup->add_option("--out-prefix", dd.out_prefix, "Output prefix")->required();
  auto* d_thr = dedup->add_option("--threshold", dd.threshold, "Levenshtein ratio threshold");
  dedup->add_option("--sort-buffer", dd.sort_buffer, "External sort buffer (lines)");

  // --- split ----------------------------------------------------------------
  auto* split = app.add_subcommand("split", "Sentence-split and clean monolingual data");
  struct {
    std::string in, lang, out, report;
    int max_word_chars = 40, max_tokens = 150, max_other_chars = 10;
    double max_ratio = 3.0;
  } sp;
  split->add_option("--in", sp.in, "Monolingual input file")->required();
  split->add_option("--lang", sp.lang, "Language code")->required();
  split->add_option("--out", sp.out, "Cleaned output file")->required();
  split->add_option("--report", sp.report, "Rejection report TSV");
  auto* s_word = split->add_option("--max-word-chars", sp.max_word_chars);
  auto* s_tok = split->add_option("--max-tokens", sp.max_tokens);
  auto* s_other = split->add_option("--max-other-chars", sp.max_other_chars);

  // --- dist -----------------------------------------------------------------
  auto* dist = app.add_subcommand("dist", "Levenshtein distance/ratio for aligned lines");
  struct {
    std::string a, b, out;
  } di;
  dist->add_option("--a", di.a, "First file")->required();
  dist->add_option("--b", di.b, "Second file")->required();
  dist->add_option("--out", di.out, "Output TSV: line_no<TAB>distance<TAB>ratio")->required();

  // --- lm-train ---------------------------------------------------------------
  auto* lm_train = app.add_subcommand("lm-train", "Train a count-based n-gram language model");
  struct {
    std::string in, lang, out;
    int order = 3;
    int unk_threshold = 1;
  } lm;
  lm_train->add_option("--in", lm.in, "Training corpus")->required();
  lm_train->add_option("--lang", lm.lang, "Language code")->required();
  lm_train->add_option("--out", lm.out, "Model output path")->required();
  auto* l_order = lm_train->add_option("--order", lm.order, "Model order (1-5)");
  lm_train->add_option("--unk-threshold", lm.unk_threshold,
                       "Tokens with count <= threshold become <unk>");

  // --- select -----------------------------------------------------------------
  auto* select = app.add_subcommand(
      "select", "Cross-entropy-difference in-domain selection over a monolingual pool");
  struct {
    std::string in_model, out_model, candidates, out, scores, match_lengths;
    std::uint64_t topk = 0;
  } sel;
  select->add_option("--in-model", sel.in_model, "In-domain model path")->required();
  select->add_option("--out-model", sel.out_model, "Out-domain model path")->required();
  select->add_option("--candidates", sel.candidates, "Candidate sentences")->required();
  select->add_option("--topk", sel.topk, "How many sentences to select")->required();
  select->add_option("--match-lengths", sel.match_lengths,
                     "Reference corpus; match its token-length distribution");
  select->add_option("--out", sel.out, "Selected sentences output")->required();
  select->add_option("--scores", sel.scores,
                     "Score TSV: line_no<TAB>h_in<TAB>h_out<TAB>diff");

  // --- bleu -------------------------------------------------------------------
  auto* bleu = app.add_subcommand("bleu", "Corpus BLEU-4 against a single reference");
  struct {
    std::string hyp, ref, lang;
  } bl;
  bleu->add_option("--hyp", bl.hyp, "Hypothesis file")->required();
  bleu->add_option("--ref", bl.ref, "Reference file")->required();
  bleu->add_option("--lang", bl.lang, "Language code (drives tokenization)")->required();

  // --- consensus ----------------------------------------------------------------
  auto* consensus = app.add_subcommand(
      "consensus", "Pick the minimum-average-Levenshtein hypothesis per line");
  struct {
    std::vector<std::string> systems;
    std::string out, ald_report;
  } co;
  consensus->add_option("--sys", co.systems, "System output file (repeat per system)")
      ->required();
  consensus->add_option("--out", co.out, "Chosen hypotheses output")->required();
  consensus->add_option("--ald-report", co.ald_report,
                        "TSV: line_no<TAB>ald_1..ald_M<TAB>chosen_index");

  // --- greedy -------------------------------------------------------------------
  auto* greedy = app.add_subcommand(
      "greedy", "Greedy search for the best system combination on a dev set");
  struct {
    std::vector<std::string> systems;
    std::string ref, lang, out;
    std::size_t max_size = 4;
  } gr;
  greedy->add_option("--sys", gr.systems, "Candidate system file (repeat per system)")
      ->required();
  greedy->add_option("--ref", gr.ref, "Dev reference file")->required();
  greedy->add_option("--lang", gr.lang, "Language code")->required();
  greedy->add_option("--out", gr.out, "Selection output: step<TAB>system<TAB>bleu")->required();
  auto* g_max = greedy->add_option("--max-size", gr.max_size, "Combination size cap");

  // --- pipeline -------------------------------------------------------------------
  auto* pipeline = app.add_subcommand("pipeline", "Iterative BT/KD/fine-tune orchestration");
  pipeline->require_subcommand(1);
  auto* pipe_run = pipeline->add_subcommand("run", "Execute the configured rounds");
  struct {
    std::string config;
    bool resume = false;
  } pr;
  pipe_run->add_option("--config", pr.config, "Pipeline config file")->required();
  pipe_run->add_flag("--resume", pr.resume,
                     "Resume after the last completed round (resume is digest-based and "
                     "automatic; the flag just states intent)");
  auto* pipe_status = pipeline->add_subcommand("status", "Summarize a pipeline manifest");
  struct {
    std::string manifest;
  } ps;
  pipe_status->add_option("--manifest", ps.manifest, "Manifest TSV path")->required();

  try {
    app.parse(argc, argv);
    g.load_config();
    g.seed = effective(seed_opt, g.seed,
                       static_cast<std::uint64_t>(g.config.get_int("seed", 0)));
    g.workers = effective(workers_opt, g.workers,
                          static_cast<unsigned>(g.config.get_int("workers", 1)));
    if (g.workers < 1) throw forge::UsageError("--workers must be >= 1");

    if (*filter) {
      const auto cfg =
          make_filter_config(g, fil.src_lang, fil.tgt_lang, f_word, fil.max_word_chars, f_tok,
                             fil.max_tokens, f_ratio, fil.max_ratio, f_other,
                             fil.max_other_chars);
      forge::PairReader in(fil.src, fil.tgt);
      forge::PairWriter out(fil.out_prefix + ".src", fil.out_prefix + ".tgt");
      const auto report = forge::filter_corpus(in, out, cfg, g.workers);
      out.close();
      if (!fil.report.empty()) write_filter_report(report, fil.report);
      log_line(g, "filter: kept " + std::to_string(report.kept) + "/" +
                      std::to_string(report.input) + " pairs");
    } else if (*dedup) {
      forge::DedupConfig cfg;
      cfg.threshold =
          effective(d_thr, dd.threshold, g.config.get_double("dedup.threshold", 0.9));
      cfg.seed = g.seed;

      const bool mono = dd.tgt.empty();
      if (mono && dd.side != "mono") {
        throw forge::UsageError("--side mono is required when --tgt is omitted");
      }
      if (!mono && dd.side == "mono") {
        throw forge::UsageError("--side mono needs a monolingual input (omit --tgt)");
      }

      forge::DedupStats total;
      if (dd.side == "both") {
        // Source pass into temporaries, then target pass into the outputs.
        forge::DedupFileJob pass1;
        pass1.src_path = dd.src;
        pass1.tgt_path = dd.tgt;
        pass1.out_src = dd.out_prefix + ".pass1.src";
        pass1.out_tgt = dd.out_prefix + ".pass1.tgt";
        pass1.sort_buffer_lines = dd.sort_buffer;
        pass1.workers = g.workers;
        forge::DedupConfig cfg1 = cfg;
        cfg1.side = forge::DedupSide::Src;
        const auto stats1 = forge::dedup_files(pass1, cfg1);

        forge::DedupFileJob pass2;
        pass2.src_path = pass1.out_src;
        pass2.tgt_path = pass1.out_tgt;
        pass2.out_src = dd.out_prefix + ".src";
        pass2.out_tgt = dd.out_prefix + ".tgt";
        pass2.sort_buffer_lines = dd.sort_buffer;
        pass2.workers = g.workers;
        forge::DedupConfig cfg2 = cfg;
        cfg2.side = forge::DedupSide::Tgt;
        cfg2.seed = pass_seed(g.seed, 1);
        const auto stats2 = forge::dedup_files(pass2, cfg2);

        std::remove(pass1.out_src.c_str());
        std::remove(pass1.out_tgt.c_str());
        total.input = stats1.input;
        total.groups = stats1.groups + stats2.groups;
        total.removed = stats1.removed + stats2.removed;
        total.kept = stats2.kept;
      } else {
        forge::DedupFileJob job;
        job.src_path = dd.src;
        job.tgt_path = dd.tgt;
        job.out_src = mono ? dd.out_prefix + ".txt" : dd.out_prefix + ".src";
        job.out_tgt = mono ? "" : dd.out_prefix + ".tgt";
        job.sort_buffer_lines = dd.sort_buffer;
        job.workers = g.workers;
        cfg.side = mono ? forge::DedupSide::Mono
                        : (dd.side == "src" ? forge::DedupSide::Src : forge::DedupSide::Tgt);
        total = forge::dedup_files(job, cfg);
      }
      const double pct =
          total.input == 0
              ? 0.0
              : 100.0 * static_cast<double>(total.removed) / static_cast<double>(total.input);
      char line[128];
      std::snprintf(line, sizeof line, "groups=%llu removed=%llu removed_pct=%.2f",
                    static_cast<unsigned long long>(total.groups),
                    static_cast<unsigned long long>(total.removed), pct);
      std::cout << line << "\n";
    } else if (*split) {
      forge::FilterConfig cfg =
          make_filter_config(g, sp.lang, sp.lang, s_word, sp.max_word_chars, s_tok,
                             sp.max_tokens, nullptr, sp.max_ratio, s_other,
                             sp.max_other_chars);
      forge::LineReader in(sp.in);
      forge::LineWriter out(sp.out);
      const auto report = forge::clean_mono(in, out, g.profiles.get(sp.lang), cfg);
      out.close();
      if (!sp.report.empty()) {
        forge::LineWriter rep(sp.report);
        rep.write("input\t" + std::to_string(report.input_lines));
        rep.write("pieces\t" + std::to_string(report.pieces));
        rep.write("kept\t" + std::to_string(report.emitted));
        for (std::size_t i = 0; i < forge::kRuleCount; ++i) {
          rep.write(std::string(forge::rule_name(static_cast<forge::RuleId>(i))) + "\t" +
                    std::to_string(report.rejected[i]));
        }
        rep.close();
      }
      log_line(g, "split: " + std::to_string(report.input_lines) + " lines -> " +
                      std::to_string(report.emitted) + " sentences");
    } else if (*dist) {
      forge::LineReader a(di.a);
      forge::LineReader b(di.b);
      forge::LineWriter out(di.out);
      std::uint64_t line_no = 0;
      for (;;) {
        auto sa = a.next();
        auto sb = b.next();
        if (!sa && !sb) break;
        if (!sa || !sb) {
          throw forge::DataError("line count mismatch between " + di.a + " and " + di.b);
        }
        ++line_no;
        const auto ua = forge::uni::decode_utf8(sa->text);
        const auto ub = forge::uni::decode_utf8(sb->text);
        const std::size_t d = forge::levenshtein(ua, ub);
        char row[96];
        std::snprintf(row, sizeof row, "%llu\t%zu\t%.4f",
                      static_cast<unsigned long long>(line_no), d, forge::lev_ratio(ua, ub));
        out.write(row);
      }
      out.close();
    } else if (*lm_train) {
      const int order = effective(l_order, lm.order,
                                  static_cast<int>(g.config.get_int("lm.order", 3)));
      forge::TrainOptions opts;
      opts.unk_threshold = lm.unk_threshold;
      const auto model =
          forge::NGramModel::train_file(lm.in, g.profiles.get(lm.lang), order, opts);
      model.save(lm.out);
      log_line(g, "lm-train: order " + std::to_string(order) + ", vocab " +
                      std::to_string(model.vocab_size()));
    } else if (*select) {
      const auto in_model = forge::NGramModel::load(sel.in_model);
      const auto out_model = forge::NGramModel::load(sel.out_model);
      const auto& profile = g.profiles.get(in_model.lang());
      const auto candidates = forge::read_mono(sel.candidates);

      std::vector<forge::ScoredSentence> scored(candidates.size());
      forge::parallel_for(candidates.size(), g.workers,
                          [&](std::size_t begin, std::size_t end) {
                            for (std::size_t i = begin; i < end; ++i) {
                              scored[i] = forge::ScoredSentence{
                                  candidates[i], forge::moore_lewis_score(
                                                     in_model, out_model, candidates[i], profile)};
                            }
                          });
      if (!sel.scores.empty()) {
        forge::LineWriter scores_out(sel.scores);
        for (const auto& s : scored) {
          char row[128];
          std::snprintf(row, sizeof row, "%llu\t%.6f\t%.6f\t%.6f",
                        static_cast<unsigned long long>(s.sentence.line_no), s.score.h_in,
                        s.score.h_out, s.score.diff);
          scores_out.write(row);
        }
        scores_out.close();
      }

      std::vector<forge::ScoredSentence> chosen;
      if (!sel.match_lengths.empty()) {
        const auto hist =
            forge::length_histogram(forge::read_mono(sel.match_lengths), profile);
        chosen = forge::sample_matched(scored, hist, sel.topk, g.seed, profile);
      } else {
        std::sort(scored.begin(), scored.end(),
                  [](const forge::ScoredSentence& a, const forge::ScoredSentence& b) {
                    if (a.score.diff != b.score.diff) return a.score.diff < b.score.diff;
                    return a.sentence.line_no < b.sentence.line_no;
                  });
        if (scored.size() > sel.topk) scored.resize(sel.topk);
        chosen = std::move(scored);
      }
      forge::LineWriter out(sel.out);
      for (const auto& s : chosen) out.write(s.sentence.text);
      out.close();
      log_line(g, "select: " + std::to_string(chosen.size()) + " sentences");
    } else if (*bleu) {
      const auto hyps = forge::read_mono(bl.hyp);
      const auto refs = forge::read_mono(bl.ref);
      const auto report = forge::bleu_corpus(hyps, refs, g.profiles.get(bl.lang), g.workers);
      std::cout << forge::format_bleu(report) << "\n";
    } else if (*consensus) {
      forge::SystemOutputs outputs;
      for (const auto& path : co.systems) {
        std::vector<std::string> lines;
        for (auto& s : forge::read_mono(path)) lines.push_back(std::move(s.text));
        outputs.systems.push_back(std::move(lines));
        outputs.system_ids.push_back(path);
      }
      const auto choices = forge::select_consensus(outputs, g.workers);
      forge::LineWriter out(co.out);
      for (const auto& c : choices) out.write(c.chosen_text);
      out.close();
      if (!co.ald_report.empty()) {
        forge::LineWriter rep(co.ald_report);
        std::string row;
        for (std::size_t i = 0; i < choices.size(); ++i) {
          row = std::to_string(i + 1);
          char cell[32];
          for (double a : choices[i].alds) {
            std::snprintf(cell, sizeof cell, "\t%.4f", a);
            row += cell;
          }
          row += "\t" + std::to_string(choices[i].chosen_index);
          rep.write(row);
        }
        rep.close();
      }
    } else if (*greedy) {
      forge::SystemOutputs outputs;
      for (const auto& path : gr.systems) {
        std::vector<std::string> lines;
        for (auto& s : forge::read_mono(path)) lines.push_back(std::move(s.text));
        outputs.systems.push_back(std::move(lines));
        outputs.system_ids.push_back(path);
      }
      const auto refs = forge::read_mono(gr.ref);
      const std::size_t max_size =
          effective(g_max, gr.max_size,
                    static_cast<std::size_t>(g.config.get_int("greedy.max_size", 4)));
      const auto result =
          forge::greedy_search(outputs, refs, max_size, g.profiles.get(gr.lang), g.workers);
      forge::LineWriter out(gr.out);
      for (std::size_t step = 0; step < result.trace.size(); ++step) {
        char row[512];
        std::snprintf(row, sizeof row, "%zu\t%s\t%.2f", step + 1,
                      result.selected_ids[step].c_str(), result.trace[step].bleu.score());
        out.write(row);
        log_line(g, std::string("greedy step ") + std::to_string(step + 1) + ": " +
                        result.selected_ids[step] + " -> " + row);
      }
      out.close();
    } else if (*pipeline) {
      if (*pipe_run) {
        const auto file = forge::ConfigFile::parse_file(pr.config);
        g.apply_profile_overrides(file);
        forge::PipelineConfig cfg = forge::PipelineConfig::from_config(file);
        if (seed_opt->count() > 0) cfg.seed = g.seed;
        if (workers_opt->count() > 0) cfg.workers = g.workers;
        const auto manifest = forge::run_pipeline(cfg, g.profiles);
        log_line(g, "pipeline: " + std::to_string(manifest.records().size()) +
                        " rounds complete");
      } else if (*pipe_status) {
        const auto manifest = forge::PipelineManifest::load(ps.manifest);
        for (const auto& rec : manifest.records()) {
          std::string detail;
          if (rec.ok()) {
            if (!rec.count_of("total").empty()) detail += "total=" + rec.count_of("total");
            if (!rec.count_of("kept").empty()) detail += " kept=" + rec.count_of("kept");
          } else {
            detail = rec.count_of("error");
          }
          char row[512];
          std::snprintf(row, sizeof row, "round %llu  %-2s  %-6s  %8.3fs  %s",
                        static_cast<unsigned long long>(rec.round_idx), rec.kind.c_str(),
                        rec.ok() ? "ok" : "failed", rec.seconds, detail.c_str());
          std::cout << row << "\n";
        }
      }
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  } catch (const forge::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n"
              << "run 'forge --help' or 'forge <subcommand> --help' for usage\n";
    return 1;
  } catch (const forge::TranslatorError& e) {
    std::cerr << "translator error: " << e.what() << "\n";
    return 3;
  } catch (const forge::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
