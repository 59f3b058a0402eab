#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qkrd/baselines.hpp"
#include "qkrd/qaoa.hpp"
#include "qkrd/stats.hpp"

namespace qkrd::harness {

struct ArmSpec {
  std::string label;
  enum class Kind { qaoa, greedy, random } kind = Kind::qaoa;
  qaoa::QaoaConfig qaoa;
  std::optional<double> lambda_override;  // penalty-sweep arms
};

struct ExperimentConfig {
  std::string id;
  std::string manifest_path;
  std::vector<ArmSpec> arms;
  std::uint64_t master_seed = 42;
  int jobs = 1;
  int limit_instances = 0;  // 0 = all
  std::string out_dir;      // empty = in-memory only
};

// The four per-run metrics aggregated by every experiment.
inline const std::array<const char*, 4> metric_names = {
    "final_energy", "coverage", "feasible_mass", "convergence_steps"};

struct RunRecord {
  std::string instance_id;
  std::string arm;
  std::uint64_t seed = 0;
  double final_energy = 0.0;       // the arm's own objective at the end
  double final_expectation = 0.0;  // exact <H> of the final state
  double coverage = 0.0;
  double feasible_mass = 0.0;
  bool top_state_feasible = false;
  bool decode_fallback = false;
  int convergence_steps = 0;
  int steps_run = 0;
  bool converged_early = false;
  std::string decoded_primary;
  std::string decoded_followup;
  std::optional<std::string> failure;

  double metric(const std::string& name) const;
};

struct StatResult {
  std::string arm_a;
  std::string arm_b;
  std::string metric;
  double mean_diff = 0.0;  // mean(A) - mean(B), paired
  double t = 0.0;
  double p = 1.0;
  double p_bonferroni = 1.0;
  double cohens_d = 0.0;
  bool d_defined = true;
  double ci_low = 0.0;  // bootstrap 95% CI of the mean difference
  double ci_high = 0.0;
  bool degenerate = false;
};

struct ExperimentReport {
  std::string id;
  std::uint64_t master_seed = 0;
  std::string manifest_path;
  std::string dataset_config_hash;
  std::vector<std::string> arm_labels;
  std::vector<std::string> instance_ids;   // instances entering the pairing
  std::vector<RunRecord> runs;             // instance-major, arm-minor order
  std::vector<StatResult> stats;
  std::vector<std::string> failures;

  std::vector<double> metric_values(const std::string& arm,
                                    const std::string& metric) const;
  const StatResult* find_stat(const std::string& arm_a, const std::string& arm_b,
                              const std::string& metric) const;
};

// Runs every (instance, arm) pair with instance-paired seeds, aggregates
// the metric distributions and all pairwise paired tests. Failed runs drop
// their instance from the pairing for every arm and land in `failures`.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Paper-mirroring experiment presets: E1 mixers + penalty sweep, E2
// warm-starts, E4 CVaR vs expectation, E5 QAOA vs classical baselines.
ExperimentConfig make_preset(const std::string& id, const std::string& manifest_path,
                             std::uint64_t master_seed);

// Declarative experiment file: id, manifest, master_seed, and per-arm
// QaoaConfig fields by name.
ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig read_experiment_config(const std::string& path);

std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);
void write_report(const ExperimentReport& report, const std::string& out_dir);
ExperimentReport read_report(const std::string& path);

// Plain-text pairwise test table (the `stats` subcommand output).
std::string stats_table(const ExperimentReport& report);

// Per-figure CSV emission: fig2 mixer convergence, fig3 warm-start
// convergence + energy, fig4 risk-objective energies, fig5 coverage
// distributions. Throws on unknown ids, listing the valid ones.
void emit_plot_data(const ExperimentReport& report, const std::string& figure_id,
                    const std::string& out_dir);

}  // namespace qkrd::harness
