#include "qkrd/baselines.hpp"

#include <bit>
#include <stdexcept>
#include <vector>

#include "qkrd/rng.hpp"

namespace qkrd::baselines {

namespace {

// Coverage reported for a selection: the primary move's coverage gain.
int selection_coverage(const qubo::QkrdInstance& inst, int primary, int followup) {
  (void)followup;
  return inst.candidates[primary].gain;
}

BaselineResult assemble(const qubo::QkrdInstance& inst, int primary, int followup) {
  BaselineResult r;
  r.primary = primary;
  r.followup = followup;
  r.bits = inst.layout.encode(primary, followup);
  r.energy = inst.qubo.energy(r.bits);
  r.coverage = selection_coverage(inst, primary, followup);
  return r;
}

}  // namespace

BaselineResult greedy_select(const qubo::QkrdInstance& inst) {
  return assemble(inst, 0, inst.config.f > 0 ? 0 : -1);
}

BaselineResult random_select(const qubo::QkrdInstance& inst, std::uint64_t seed,
                             std::uint64_t stream) {
  rng::Philox gen(seed, rng::mix(stream, 0x7a2d));
  const int primary = static_cast<int>(gen.below(inst.config.k));
  const int followup =
      inst.config.f > 0 ? static_cast<int>(gen.below(inst.config.f)) : -1;
  return assemble(inst, primary, followup);
}

BruteForceResult brute_force_min(const qubo::QuboModel& model,
                                 const qubo::VariableLayout& layout) {
  const int n = model.n_vars;
  if (n < 1 || n > 26)
    throw std::runtime_error("brute_force_min: variable count beyond the 26-var cap");

  // Per-variable adjacency for O(n) flip updates.
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& [key, c] : model.quadratic) {
    adj[key.first].emplace_back(key.second, c);
    adj[key.second].emplace_back(key.first, c);
  }

  // Gray-code walk: consecutive codes differ in exactly bit ctz(i).
  std::uint64_t state = 0;
  double energy = model.constant;
  BruteForceResult out;
  out.best_bits = 0;
  out.best_energy = energy;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int bit = std::countr_zero(i);
    double delta = model.linear[bit];
    for (const auto& [other, c] : adj[bit])
      if ((state >> other) & 1) delta += c;
    if ((state >> bit) & 1) {
      energy -= delta;
      state &= ~(std::uint64_t{1} << bit);
    } else {
      energy += delta;
      state |= std::uint64_t{1} << bit;
    }
    if (energy < out.best_energy ||
        (energy == out.best_energy && state < out.best_bits)) {
      out.best_energy = energy;
      out.best_bits = state;
    }
  }

  bool first = true;
  for (const std::uint64_t bits : layout.feasible_bitstrings()) {
    const double e = model.energy(bits);
    if (first || e < out.feasible_energy) {
      out.feasible_energy = e;
      out.feasible_bits = bits;
      first = false;
    }
  }
  if (first) throw std::runtime_error("brute_force_min: layout has no feasible states");
  return out;
}

}  // namespace qkrd::baselines
