// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "forge/common.hpp"
#include "forge/consensus.hpp"
#include "forge/ngram_lm.hpp"
#include "forge/pipeline.hpp"
#include "testutil.hpp"

using namespace forge;
using testutil::pair;
using testutil::sent;
namespace fs = std::filesystem;

namespace {

ProfileRegistry& registry() {
  static ProfileRegistry reg;
  return reg;
}

// Mock translator: reverses the words of every line. POSIX sh only.
const char* kReverseWordsScript = R"(
while IFS= read -r line; do
  out=""
  for w in $line; do out="$w $out"; done
  printf '%s\n' "${out% }"
done < "$1" > "$2"
)";

// Mock translator: prefixes every line.
std::string prefix_script(const std::string& prefix) {
  return "while IFS= read -r line; do printf '" + prefix +
         "%s\\n' \"$line\"; done < \"$1\" > \"$2\"\n";
}

std::string sh(const std::string& script_path) { return "sh " + script_path; }

std::vector<SentencePair> small_bitext(int n) {
  std::vector<SentencePair> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(pair("real source " + std::to_string(i), "real target " + std::to_string(i),
                       static_cast<std::uint64_t>(i + 1)));
  }
  return out;
}

std::vector<std::string> mono_lines(int n, const std::string& stem) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(stem + " line " + std::to_string(i));
  return out;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("tag_source prepends the tag as a separate token") {
  CHECK(tag_source(sent("hello"), "<BT>").text == "<BT> hello");
  CHECK(tag_source(sent(""), "<BT>").text == "<BT>");
  // not idempotent: tagging twice stacks tags
  CHECK(tag_source(tag_source(sent("x"), "<BT>"), "<BT>").text == "<BT> <BT> x");
  CHECK_THROWS_AS(tag_source(sent("x"), ""), UsageError);
  CHECK_THROWS_AS(tag_source(sent("x"), "<B T>"), UsageError);
}

TEST_CASE("mix_corpora hits the quota and keeps every real pair") {
  const auto real = small_bitext(100);
  std::vector<SentencePair> pseudo;
  for (int i = 0; i < 500; ++i) {
    pseudo.push_back(pair("pseudo src " + std::to_string(i), "pseudo tgt " + std::to_string(i),
                          static_cast<std::uint64_t>(i + 1)));
  }

  const auto mixed = mix_corpora(real, pseudo, 1.0, 42);
  CHECK(mixed.size() == 200);
  std::size_t pseudo_count = 0;
  std::set<std::string> pseudo_seen;
  for (const auto& p : mixed) {
    if (p.src.text.rfind("pseudo", 0) == 0) {
      ++pseudo_count;
      CHECK(pseudo_seen.insert(p.src.text).second);  // without replacement
    }
  }
  CHECK(pseudo_count == 100);

  // all real pairs survive
  std::multiset<std::string> mixed_src;
  for (const auto& p : mixed) mixed_src.insert(p.src.text);
  for (const auto& p : real) CHECK(mixed_src.count(p.src.text) == 1);
}

TEST_CASE("mix_corpora takes the whole pool when it is short") {
  const auto real = small_bitext(100);
  std::vector<SentencePair> pseudo;
  for (int i = 0; i < 30; ++i) pseudo.push_back(pair("p" + std::to_string(i), "q"));
  CHECK(mix_corpora(real, pseudo, 1.0, 0).size() == 130);
}

TEST_CASE("mix_corpora respects fractional ratios") {
  const auto real = small_bitext(100);
  std::vector<SentencePair> pseudo;
  for (int i = 0; i < 500; ++i) pseudo.push_back(pair("p" + std::to_string(i), "q"));
  CHECK(mix_corpora(real, pseudo, 0.5, 0).size() == 150);
  CHECK_THROWS_AS(mix_corpora(real, pseudo, 0.0, 0), UsageError);
}

TEST_CASE("mix and merge are seed-deterministic") {
  const auto real = small_bitext(50);
  std::vector<SentencePair> pseudo;
  for (int i = 0; i < 200; ++i) pseudo.push_back(pair("p" + std::to_string(i), "q"));

  CHECK(mix_corpora(real, pseudo, 1.0, 7) == mix_corpora(real, pseudo, 1.0, 7));
  CHECK(mix_corpora(real, pseudo, 1.0, 7) != mix_corpora(real, pseudo, 1.0, 8));
  CHECK(merge_corpora(real, pseudo, 3) == merge_corpora(real, pseudo, 3));
  CHECK(merge_corpora(real, pseudo, 3).size() == 250);
}

TEST_CASE("prepare_finetune keeps only src_original pairs, deduplicated") {
  testutil::TempDir tmp;
  testutil::write_lines(tmp.file("set1.tsv"), {
                                                  "s1\tt1\tsrc_original",
                                                  "s2\tt2\ttgt_original",
                                                  "s3\tt3\tsrc_original",
                                                  "s4\tt4\tunknown",
                                                  "s5\tt5\tsrc_original",
                                                  "s6\tt6\ttgt_original",
                                              });
  testutil::write_lines(tmp.file("set2.tsv"), {
                                                  "s3\tt3\tsrc_original",  // dup of set1
                                                  "s7\tt7\tsrc_original",
                                              });
  const auto result = prepare_finetune({tmp.file("set1.tsv"), tmp.file("set2.tsv")},
                                       tmp.file("ft.src"), tmp.file("ft.tgt"));
  CHECK(result.kept == 4);  // s1, s3, s5, s7
  CHECK(result.duplicates == 1);
  CHECK(result.warnings == 0);
  const auto pairs = read_pairs(tmp.file("ft.src"), tmp.file("ft.tgt"));
  REQUIRE(pairs.size() == 4);
  CHECK(pairs[0].src.text == "s1");
  CHECK(pairs[3].src.text == "s7");
}

TEST_CASE("prepare_finetune treats missing metadata as unknown with warnings") {
  testutil::TempDir tmp;
  testutil::write_lines(tmp.file("set.tsv"), {"s1\tt1", "s2\tt2", "s3\tt3"});
  const auto result =
      prepare_finetune({tmp.file("set.tsv")}, tmp.file("ft.src"), tmp.file("ft.tgt"));
  CHECK(result.kept == 0);
  CHECK(result.warnings == 3);
}

TEST_CASE("translator spec validation and rendering") {
  TranslatorSpec spec;
  spec.command_template = "translate --input {in} --output {out} --dir {direction} "
                          "--decode {strategy} --p {p}";
  spec.decode = TranslatorSpec::Decode::Sampling;
  spec.sampling_p = 0.9;
  spec.validate();
  CHECK(spec.render("/a/in", "/a/out", "rev") ==
        "translate --input /a/in --output /a/out --dir rev --decode sampling --p 0.9");

  spec.decode = TranslatorSpec::Decode::Beam;
  CHECK(spec.render("x", "y", "fwd").find("--decode beam") != std::string::npos);

  TranslatorSpec bad;
  bad.command_template = "translate {in}";  // no {out}
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad.command_template = "";
  CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("run_command reports exit codes, timeouts, and the round env var") {
  CHECK(run_command("true", 10, 0).exit_code == 0);
  CHECK(run_command("exit 7", 10, 0).exit_code == 7);

  const auto timed = run_command("sleep 30", 1, 0);
  CHECK(timed.timed_out);

  testutil::TempDir tmp;
  const auto r = run_command("echo round=$FORGE_ROUND > " + tmp.file("env.txt"), 10, 5);
  CHECK(r.exit_code == 0);
  CHECK(testutil::read_file(tmp.file("env.txt")) == "round=5\n");
}

TEST_CASE("manifest round trips through its TSV form") {
  testutil::TempDir tmp;
  PipelineManifest manifest;
  ManifestRecord rec;
  rec.round_idx = 0;
  rec.kind = "BT";
  rec.input_digests = {{"a.src", "00ff"}, {"a.tgt", "11ee"}};
  rec.output_paths = {"out/corpus.src", "out/corpus.tgt"};
  rec.counts = {{"real", "100"}, {"status", "ok"}};
  rec.seconds = 1.25;
  manifest.append(rec);
  manifest.save(tmp.file("m.tsv"));

  const auto loaded = PipelineManifest::load(tmp.file("m.tsv"));
  REQUIRE(loaded.records().size() == 1);
  const auto& got = loaded.records()[0];
  CHECK(got.kind == "BT");
  CHECK(got.input_digests == rec.input_digests);
  CHECK(got.output_paths == rec.output_paths);
  CHECK(got.count_of("real") == "100");
  CHECK(got.ok());
  CHECK(got.seconds == doctest::Approx(1.25));
  CHECK_FALSE(fs::exists(tmp.file("m.tsv") + ".tmp"));

  CHECK(PipelineManifest::load(tmp.file("missing.tsv")).records().empty());
}

TEST_CASE("BT round: mock translator, tagging, 1:1 mixing, resumable rerun") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("rev.sh"), kReverseWordsScript);
  write_pairs(small_bitext(40), tmp.file("bi.src"), tmp.file("bi.tgt"));
  testutil::write_lines(tmp.file("mono.tgt"), mono_lines(60, "mono tgt"));

  PipelineConfig cfg;
  cfg.seed = 17;
  cfg.workers = 2;
  cfg.out_dir = tmp.file("run");
  cfg.bitext_src = tmp.file("bi.src");
  cfg.bitext_tgt = tmp.file("bi.tgt");
  cfg.mono_tgt = tmp.file("mono.tgt");
  cfg.rounds_bt = 1;
  cfg.mix_ratio = 1.0;
  cfg.tag_enabled = true;
  cfg.translator_rev.command_template = sh(tmp.file("rev.sh")) + " {in} {out}";

  const auto manifest = run_pipeline(cfg, registry());
  REQUIRE(manifest.records().size() == 1);
  const auto& rec = manifest.records()[0];
  CHECK(rec.kind == "BT");
  CHECK(rec.ok());
  CHECK(rec.count_of("real") == "40");
  CHECK(rec.count_of("pseudo_used") == "40");  // quota = round(1.0 * 40)
  CHECK(rec.count_of("total") == "80");

  // pseudo pairs: src is the tagged reversed mono line, tgt the original
  const auto corpus = read_pairs(rec.output_paths[0], rec.output_paths[1]);
  REQUIRE(corpus.size() == 80);
  std::size_t tagged = 0;
  for (const auto& p : corpus) {
    if (p.src.text.rfind("<BT> ", 0) == 0) {
      ++tagged;
      // reverse-words mock: "mono tgt line N" -> "N line tgt mono"
      CHECK(p.src.text.find("line") != std::string::npos);
      CHECK(p.tgt.text.rfind("mono tgt line", 0) == 0);
      // tgt is the untouched mono line whose reversal matches the src
      std::string expect = "<BT> ";
      std::vector<std::string> words;
      std::istringstream in(p.tgt.text);
      std::string w;
      while (in >> w) words.push_back(w);
      for (auto it = words.rbegin(); it != words.rend(); ++it) {
        expect += *it;
        if (it + 1 != words.rend()) expect += " ";
      }
      CHECK(p.src.text == expect);
    }
  }
  CHECK(tagged == 40);

  // rerun resumes: the manifest file and outputs are byte-identical
  const auto d0 = digest_file(rec.output_paths[0]);
  const auto d1 = digest_file(rec.output_paths[1]);
  const std::string manifest_bytes = testutil::read_file(tmp.file("run/manifest.tsv"));
  const auto manifest2 = run_pipeline(cfg, registry());
  REQUIRE(manifest2.records().size() == 1);
  CHECK(testutil::read_file(tmp.file("run/manifest.tsv")) == manifest_bytes);
  CHECK(digest_file(rec.output_paths[0]) == d0);
  CHECK(digest_file(rec.output_paths[1]) == d1);

  // corrupting an output forces that round to be redone, restoring the bytes
  testutil::write_file(rec.output_paths[0], "corrupted\n");
  const auto manifest3 = run_pipeline(cfg, registry());
  CHECK(digest_file(rec.output_paths[0]) == d0);
  CHECK(manifest3.records()[0].ok());
}

TEST_CASE("KD round with three teachers applies consensus") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("t1.sh"), prefix_script("A:"));
  testutil::write_file(tmp.file("t2.sh"), prefix_script("A:"));
  testutil::write_file(tmp.file("t3.sh"), prefix_script("B:"));
  write_pairs(small_bitext(10), tmp.file("bi.src"), tmp.file("bi.tgt"));
  testutil::write_lines(tmp.file("mono.src"), mono_lines(15, "mono src"));

  PipelineConfig cfg;
  cfg.seed = 3;
  cfg.out_dir = tmp.file("run");
  cfg.bitext_src = tmp.file("bi.src");
  cfg.bitext_tgt = tmp.file("bi.tgt");
  cfg.mono_src = tmp.file("mono.src");
  cfg.rounds_kd = 1;
  for (const char* s : {"t1.sh", "t2.sh", "t3.sh"}) {
    TranslatorSpec t;
    t.command_template = sh(tmp.file(s)) + " {in} {out}";
    cfg.teachers.push_back(t);
  }

  const auto manifest = run_pipeline(cfg, registry());
  REQUIRE(manifest.records().size() == 1);
  const auto& rec = manifest.records()[0];
  CHECK(rec.kind == "KD");
  CHECK(rec.count_of("teachers") == "3");
  CHECK(rec.count_of("pseudo") == "15");
  CHECK(rec.count_of("total") == "25");

  // expected target: the ALD consensus of the three teacher outputs
  const auto corpus = read_pairs(rec.output_paths[0], rec.output_paths[1]);
  std::size_t pseudo_seen = 0;
  for (const auto& p : corpus) {
    if (p.src.text.rfind("mono src", 0) == 0) {
      ++pseudo_seen;
      SystemOutputs line;
      line.systems = {{"A:" + p.src.text}, {"A:" + p.src.text}, {"B:" + p.src.text}};
      const auto choice = select_consensus(line);
      CHECK(p.tgt.text == choice[0].chosen_text);
      CHECK(p.tgt.text == "A:" + p.src.text);
    }
  }
  CHECK(pseudo_seen == 15);
  // KD never tags
  for (const auto& p : corpus) CHECK(p.src.text.rfind("<BT>", 0) == std::string::npos);
}

TEST_CASE("full pipeline runs BT,BT,KD,KD and is deterministic across directories") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("rev.sh"), kReverseWordsScript);
  testutil::write_file(tmp.file("fwd.sh"), prefix_script("T:"));
  write_pairs(small_bitext(25), tmp.file("bi.src"), tmp.file("bi.tgt"));
  testutil::write_lines(tmp.file("mono.tgt"), mono_lines(50, "mt"));
  testutil::write_lines(tmp.file("mono.src"), mono_lines(30, "ms"));

  auto make_cfg = [&](const std::string& out_dir) {
    PipelineConfig cfg;
    cfg.seed = 11;
    cfg.out_dir = out_dir;
    cfg.bitext_src = tmp.file("bi.src");
    cfg.bitext_tgt = tmp.file("bi.tgt");
    cfg.mono_tgt = tmp.file("mono.tgt");
    cfg.mono_src = tmp.file("mono.src");
    cfg.rounds_bt = 2;
    cfg.rounds_kd = 2;
    cfg.translator_rev.command_template = sh(tmp.file("rev.sh")) + " {in} {out}";
    TranslatorSpec fwd;
    fwd.command_template = sh(tmp.file("fwd.sh")) + " {in} {out}";
    cfg.teachers.push_back(fwd);
    return cfg;
  };

  const auto m1 = run_pipeline(make_cfg(tmp.file("runA")), registry());
  REQUIRE(m1.records().size() == 4);
  CHECK(m1.records()[0].kind == "BT");
  CHECK(m1.records()[1].kind == "BT");
  CHECK(m1.records()[2].kind == "KD");
  CHECK(m1.records()[3].kind == "KD");
  // each round consumes the previous corpus
  CHECK(m1.records()[1].input_digests[0].first == m1.records()[0].output_paths[0]);
  CHECK(m1.records()[2].input_digests[0].first == m1.records()[1].output_paths[0]);

  const auto m2 = run_pipeline(make_cfg(tmp.file("runB")), registry());
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(testutil::read_file(m1.records()[r].output_paths[0]) ==
          testutil::read_file(m2.records()[r].output_paths[0]));
    CHECK(testutil::read_file(m1.records()[r].output_paths[1]) ==
          testutil::read_file(m2.records()[r].output_paths[1]));
  }
}

TEST_CASE("zero rounds completes with an empty manifest") {
  testutil::TempDir tmp;
  PipelineConfig cfg;
  cfg.out_dir = tmp.file("run");
  const auto manifest = run_pipeline(cfg, registry());
  CHECK(manifest.records().empty());
  CHECK(fs::exists(tmp.file("run/manifest.tsv")));
}

TEST_CASE("translator failure quarantines the round and halts") {
  testutil::TempDir tmp;
  write_pairs(small_bitext(5), tmp.file("bi.src"), tmp.file("bi.tgt"));
  testutil::write_lines(tmp.file("mono.tgt"), mono_lines(5, "m"));

  PipelineConfig cfg;
  cfg.out_dir = tmp.file("run");
  cfg.bitext_src = tmp.file("bi.src");
  cfg.bitext_tgt = tmp.file("bi.tgt");
  cfg.mono_tgt = tmp.file("mono.tgt");
  cfg.rounds_bt = 1;
  cfg.translator_rev.command_template = "false # {in} {out}";

  CHECK_THROWS_AS(run_pipeline(cfg, registry()), TranslatorError);
  const auto manifest = PipelineManifest::load(tmp.file("run/manifest.tsv"));
  REQUIRE(manifest.records().size() == 1);
  CHECK_FALSE(manifest.records()[0].ok());
  CHECK(manifest.records()[0].count_of("error").find("exited") != std::string::npos);
  CHECK(fs::exists(tmp.file("run/round0_bt.quarantine")));
  CHECK_FALSE(fs::exists(tmp.file("run/round0_bt")));

  // fixing the translator lets the rerun replace the failed record
  testutil::write_file(tmp.file("rev.sh"), kReverseWordsScript);
  cfg.translator_rev.command_template = sh(tmp.file("rev.sh")) + " {in} {out}";
  const auto m2 = run_pipeline(cfg, registry());
  REQUIRE(m2.records().size() == 1);
  CHECK(m2.records()[0].ok());
}

TEST_CASE("line-count violations name the offending shard") {
  testutil::TempDir tmp;
  // writes one extra line
  testutil::write_file(tmp.file("bad.sh"),
                       "cat \"$1\" > \"$2\"; echo extra >> \"$2\"\n");
  write_pairs(small_bitext(5), tmp.file("bi.src"), tmp.file("bi.tgt"));
  testutil::write_lines(tmp.file("mono.tgt"), mono_lines(5, "m"));

  PipelineConfig cfg;
  cfg.out_dir = tmp.file("run");
  cfg.bitext_src = tmp.file("bi.src");
  cfg.bitext_tgt = tmp.file("bi.tgt");
  cfg.mono_tgt = tmp.file("mono.tgt");
  cfg.rounds_bt = 1;
  cfg.translator_rev.command_template = sh(tmp.file("bad.sh")) + " {in} {out}";

  CHECK_THROWS_WITH_AS(run_pipeline(cfg, registry()), doctest::Contains("shard"),
                       TranslatorError);
}

TEST_CASE("pipeline config parses from key = value text") {
  const auto file = ConfigFile::parse_string(
      "seed = 9\n"
      "workers = 3\n"
      "out.dir = /tmp/x\n"
      "data.bitext.src = a.src\n"
      "data.bitext.tgt = a.tgt\n"
      "data.mono.tgt = m.txt\n"
      "bt.rounds = 2\n"
      "bt.mix_ratio = 0.5\n"
      "bt.tag_enabled = true\n"
      "translator.rev.cmd = run.sh {in} {out}\n"
      "translator.rev.strategy = sampling\n"
      "translator.rev.p = 0.85\n"
      "translator.rev.timeout = 120\n"
      "kd.rounds = 1\n"
      "data.mono.src = s.txt\n"
      "kd.teacher.1.cmd = t1.sh {in} {out}\n"
      "kd.teacher.2.cmd = t2.sh {in} {out}\n"
      "finetune.sets = dev1.tsv, dev2.tsv\n"
      "finetune.out = ft\n");
  const auto cfg = PipelineConfig::from_config(file);
  CHECK(cfg.seed == 9);
  CHECK(cfg.workers == 3);
  CHECK(cfg.rounds_bt == 2);
  CHECK(cfg.mix_ratio == doctest::Approx(0.5));
  CHECK(cfg.tag_enabled);
  CHECK(cfg.translator_rev.decode == TranslatorSpec::Decode::Sampling);
  CHECK(cfg.translator_rev.sampling_p == doctest::Approx(0.85));
  CHECK(cfg.translator_rev.timeout_secs == 120);
  REQUIRE(cfg.teachers.size() == 2);
  CHECK(cfg.teachers[0].command_template == "t1.sh {in} {out}");
  CHECK(cfg.finetune_sets == std::vector<std::string>{"dev1.tsv", "dev2.tsv"});
  cfg.validate();

  PipelineConfig bad = cfg;
  bad.mix_ratio = 0.0;
  CHECK_THROWS_AS(bad.validate(), UsageError);
  bad = cfg;
  bad.rounds_kd = 1;
  bad.teachers.clear();
  CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("KD round with in-domain selection only translates selected lines") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("fwd.sh"), prefix_script("T:"));
  write_pairs(small_bitext(5), tmp.file("bi.src"), tmp.file("bi.tgt"));

  // in-domain = news-ish, out-domain = chat-ish, pool mixes both
  testutil::write_lines(tmp.file("news.txt"),
                        {"markets rallied today", "shares rose sharply",
                         "the bank held rates"});
  testutil::write_lines(tmp.file("chat.txt"),
                        {"lol see you later", "brb gotta run", "haha too funny"});
  testutil::write_lines(tmp.file("mono.src"),
                        {"lol gotta go", "markets rose again", "the bank held",
                         "haha see you", "shares rallied today", "brb run now"});
  forge::TrainOptions opts;
  opts.unk_threshold = 0;
  forge::NGramModel::train_file(tmp.file("news.txt"), registry().get("en"), 3, opts)
      .save(tmp.file("in.lm"));
  forge::NGramModel::train_file(tmp.file("chat.txt"), registry().get("en"), 3, opts)
      .save(tmp.file("out.lm"));

  PipelineConfig cfg;
  cfg.seed = 1;
  cfg.out_dir = tmp.file("run");
  cfg.bitext_src = tmp.file("bi.src");
  cfg.bitext_tgt = tmp.file("bi.tgt");
  cfg.mono_src = tmp.file("mono.src");
  cfg.rounds_kd = 1;
  TranslatorSpec fwd;
  fwd.command_template = sh(tmp.file("fwd.sh")) + " {in} {out}";
  cfg.teachers.push_back(fwd);
  cfg.kd_select.in_model_path = tmp.file("in.lm");
  cfg.kd_select.out_model_path = tmp.file("out.lm");
  cfg.kd_select.quota = 3;

  const auto manifest = run_pipeline(cfg, registry());
  REQUIRE(manifest.records().size() == 1);
  const auto& rec = manifest.records()[0];
  CHECK(rec.count_of("pseudo") == "3");
  // selection inputs participate in the resume digests
  bool saw_model = false;
  for (const auto& [path, digest] : rec.input_digests) {
    if (path == tmp.file("in.lm")) saw_model = true;
  }
  CHECK(saw_model);

  // the three news-like pool lines were selected and translated
  const auto corpus = read_pairs(rec.output_paths[0], rec.output_paths[1]);
  std::set<std::string> pseudo_src;
  for (const auto& p : corpus) {
    if (p.tgt.text.rfind("T:", 0) == 0) pseudo_src.insert(p.src.text);
  }
  CHECK(pseudo_src == std::set<std::string>{"markets rose again", "the bank held",
                                            "shares rallied today"});

  // retraining a model invalidates the completed round on rerun
  testutil::write_lines(tmp.file("chat2.txt"),
                        {"omg gonna be late", "nah dude chill", "yo wanna hang"});
  forge::NGramModel::train_file(tmp.file("chat2.txt"), registry().get("en"), 3, opts)
      .save(tmp.file("out.lm"));
  const auto manifest2 = run_pipeline(cfg, registry());
  REQUIRE(manifest2.records().size() == 1);
  bool digest_changed = false;
  for (std::size_t i = 0; i < rec.input_digests.size(); ++i) {
    if (manifest2.records()[0].input_digests[i] != rec.input_digests[i]) digest_changed = true;
  }
  CHECK(digest_changed);
}

TEST_CASE("finetune rounds append an FT record") {
  testutil::TempDir tmp;
  testutil::write_lines(tmp.file("dev.tsv"),
                        {"s1\tt1\tsrc_original", "s2\tt2\ttgt_original"});
  PipelineConfig cfg;
  cfg.out_dir = tmp.file("run");
  cfg.finetune_sets = {tmp.file("dev.tsv")};
  cfg.finetune_out = tmp.file("run/ft");
  const auto manifest = run_pipeline(cfg, registry());
  REQUIRE(manifest.records().size() == 1);
  CHECK(manifest.records()[0].kind == "FT");
  CHECK(manifest.records()[0].count_of("kept") == "1");
  CHECK(count_lines(tmp.file("run/ft.src")) == 1);
}

}  // TEST_SUITE
