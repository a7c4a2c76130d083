// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#include "forge/consensus.hpp"

#include <algorithm>

#include "forge/common.hpp"
#include "forge/textdist.hpp"
#include "forge/unicode.hpp"

namespace forge {

void SystemOutputs::validate() const {
  if (systems.empty()) throw DataError("no systems given");
  if (!system_ids.empty() && system_ids.size() != systems.size()) {
    throw DataError("system id count does not match system count");
  }
  const std::size_t n = systems[0].size();
  if (n == 0) throw DataError("systems have no lines");
  for (std::size_t m = 1; m < systems.size(); ++m) {
    if (systems[m].size() != n) {
      throw DataError("system " + std::to_string(m) + " has " +
                      std::to_string(systems[m].size()) + " lines, expected " +
                      std::to_string(n));
    }
  }
}

double ald(const std::vector<std::string>& line, std::size_t i) {
  if (line.size() < 2) throw DataError("ALD needs at least two systems");
  std::uint64_t sum = 0;
  const std::u32string self = uni::decode_utf8(line[i]);
  for (std::size_t j = 0; j < line.size(); ++j) {
    if (j == i) continue;
    sum += levenshtein(self, uni::decode_utf8(line[j]));
  }
  return static_cast<double>(sum) / static_cast<double>(line.size() - 1);
}

namespace {

ConsensusChoice choose_line(const std::vector<std::string>& line) {
  ConsensusChoice choice;
  const std::size_t m = line.size();
  if (m == 1) {
    choice.alds = {0.0};
    choice.chosen_index = 0;
    choice.chosen_text = line[0];
    return choice;
  }

  // Pairwise distance matrix; each pair computed once.
  std::vector<std::u32string> decoded(m);
  for (std::size_t i = 0; i < m; ++i) decoded[i] = uni::decode_utf8(line[i]);
  std::vector<std::uint64_t> sums(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const std::size_t d = levenshtein(decoded[i], decoded[j]);
      sums[i] += d;
      sums[j] += d;
    }
  }
  choice.alds.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    choice.alds[i] = static_cast<double>(sums[i]) / static_cast<double>(m - 1);
  }
  choice.chosen_index = static_cast<std::size_t>(
      std::min_element(choice.alds.begin(), choice.alds.end()) - choice.alds.begin());
  choice.chosen_text = line[choice.chosen_index];
  return choice;
}

}  // namespace

std::vector<ConsensusChoice> select_consensus(const SystemOutputs& outputs, unsigned workers) {
  outputs.validate();
  const std::size_t n = outputs.line_count();
  const std::size_t m = outputs.system_count();

  std::vector<ConsensusChoice> choices(n);
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::string> line(m);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t s = 0; s < m; ++s) line[s] = outputs.systems[s][i];
      choices[i] = choose_line(line);
    }
  });
  return choices;
}

namespace {

// Consensus restricted to a subset of systems (indices ascending), returning
// tokenized chosen lines ready for BLEU.
std::vector<std::vector<Token>> subset_consensus_tokens(
    const std::vector<std::vector<std::vector<Token>>>& token_cache,
    const SystemOutputs& candidates, const std::vector<std::size_t>& subset,
    unsigned workers) {
  const std::size_t n = candidates.line_count();
  std::vector<std::vector<Token>> chosen(n);
  if (subset.size() == 1) {
    return token_cache[subset[0]];
  }
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::string> line(subset.size());
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t s = 0; s < subset.size(); ++s) {
        line[s] = candidates.systems[subset[s]][i];
      }
      const ConsensusChoice c = choose_line(line);
      chosen[i] = token_cache[subset[c.chosen_index]][i];
    }
  });
  return chosen;
}

}  // namespace

GreedyResult greedy_search(const SystemOutputs& candidates, const std::vector<Sentence>& refs,
                           std::size_t max_size, const LanguageProfile& profile,
                           unsigned workers) {
  candidates.validate();
  if (refs.size() != candidates.line_count()) {
    throw DataError("reference has " + std::to_string(refs.size()) + " lines, systems have " +
                    std::to_string(candidates.line_count()));
  }
  if (max_size == 0) throw UsageError("max combination size must be positive");

  const std::size_t m = candidates.system_count();
  const std::size_t n = candidates.line_count();

  std::vector<std::vector<Token>> ref_tokens(n);
  for (std::size_t i = 0; i < n; ++i) ref_tokens[i] = tokenize(refs[i], profile);

  // Tokenize every system line once; greedy re-scores many subsets.
  std::vector<std::vector<std::vector<Token>>> token_cache(m);
  for (std::size_t s = 0; s < m; ++s) {
    token_cache[s].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      token_cache[s][i] = tokenize(Sentence{candidates.systems[s][i], i + 1}, profile);
    }
  }

  auto subset_bleu = [&](const std::vector<std::size_t>& subset) {
    return bleu_corpus_tokens(subset_consensus_tokens(token_cache, candidates, subset, workers),
                              ref_tokens, workers);
  };

  GreedyResult result;
  std::vector<bool> used(m, false);

  // Seed: best single system, ties to the lowest index.
  std::size_t best = 0;
  BleuReport best_report;
  double best_score = -1.0;
  for (std::size_t s = 0; s < m; ++s) {
    const BleuReport r = subset_bleu({s});
    if (r.score() > best_score) {
      best_score = r.score();
      best_report = r;
      best = s;
    }
  }
  used[best] = true;
  result.selected.push_back(best);
  result.trace.push_back(GreedyStep{best, best_report});

  std::vector<std::size_t> current = {best};
  while (current.size() < max_size) {
    std::size_t pick = m;
    BleuReport pick_report;
    double pick_score = best_score;
    for (std::size_t s = 0; s < m; ++s) {
      if (used[s]) continue;
      std::vector<std::size_t> trial = current;
      trial.push_back(s);
      std::sort(trial.begin(), trial.end());
      const BleuReport r = subset_bleu(trial);
      if (r.score() > pick_score) {
        pick_score = r.score();
        pick_report = r;
        pick = s;
      }
    }
    if (pick == m) break;  // no candidate improves the dev score
    used[pick] = true;
    current.push_back(pick);
    std::sort(current.begin(), current.end());
    best_score = pick_score;
    result.selected.push_back(pick);
    result.trace.push_back(GreedyStep{pick, pick_report});
  }

  for (std::size_t s : result.selected) {
    result.selected_ids.push_back(candidates.system_ids.empty()
                                      ? "sys" + std::to_string(s + 1)
                                      : candidates.system_ids[s]);
  }
  return result;
}

}  // namespace forge
