#pragma once

#include <cstdint>

#include "qkrd/instance.hpp"

namespace qkrd::baselines {

struct BaselineResult {
  int primary = -1;
  int followup = -1;  // within the selected block; -1 when F = 0
  std::uint64_t bits = 0;
  double energy = 0.0;
  int coverage = 0;  // coverage gain of the selected primary move
};

// Highest-score primary (candidates are stored score-sorted), follow-up
// chosen greedily inside the selected block.
BaselineResult greedy_select(const qubo::QkrdInstance& inst);

// Uniform over primaries, then uniform within the block; deterministic per
// seed/stream.
BaselineResult random_select(const qubo::QkrdInstance& inst, std::uint64_t seed,
                             std::uint64_t stream = 0);

struct BruteForceResult {
  std::uint64_t best_bits = 0;
  double best_energy = 0.0;
  std::uint64_t feasible_bits = 0;
  double feasible_energy = 0.0;
};

// Exhaustive minimum over all bitstrings (Gray-code incremental scan) plus
// the minimum restricted to the layout's feasible set. Capped at 26 vars.
BruteForceResult brute_force_min(const qubo::QuboModel& model,
                                 const qubo::VariableLayout& layout);

}  // namespace qkrd::baselines
