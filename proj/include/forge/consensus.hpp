// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forge/bleu.hpp"
#include "forge/corpus_io.hpp"
#include "forge/tokenizer.hpp"

namespace forge {

// M line-aligned hypothesis lists from M translation systems.
struct SystemOutputs {
  std::vector<std::vector<std::string>> systems;
  std::vector<std::string> system_ids;

  std::size_t system_count() const { return systems.size(); }
  std::size_t line_count() const { return systems.empty() ? 0 : systems[0].size(); }
  void validate() const;  // equal nonzero lengths, ids match
};

struct ConsensusChoice {
  std::vector<double> alds;      // one per system
  std::size_t chosen_index = 0;  // argmin, ties to the lowest index
  std::string chosen_text;
};

// Mean character-level edit distance from hypothesis i to the other M-1
// hypotheses of the same line. Raw text, no tokenization.
double ald(const std::vector<std::string>& line, std::size_t i);

// Per line, picks the hypothesis with the smallest ALD (the medoid).
// A single system passes through with ALD 0.
std::vector<ConsensusChoice> select_consensus(const SystemOutputs& outputs,
                                              unsigned workers = 1);

struct GreedyStep {
  std::size_t added_system = 0;  // index into the candidate set
  BleuReport bleu;               // dev BLEU of the consensus after this step
};

struct GreedyResult {
  std::vector<std::size_t> selected;     // candidate indices, in pick order
  std::vector<std::string> selected_ids;
  std::vector<GreedyStep> trace;
};

// Starts from the best single system by dev BLEU, then greedily adds the
// candidate whose consensus most improves BLEU; stops when nothing improves
// or max_size systems are selected. Ties break to the lowest candidate index.
GreedyResult greedy_search(const SystemOutputs& candidates, const std::vector<Sentence>& refs,
                           std::size_t max_size, const LanguageProfile& profile,
                           unsigned workers = 1);

}  // namespace forge
