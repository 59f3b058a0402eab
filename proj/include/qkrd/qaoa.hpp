#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qkrd/sim.hpp"

namespace qkrd::qaoa {

enum class WarmStart { none, basis, local_superposition };
enum class Objective { expectation, cvar };
enum class OptimizerKind { adam, simplex };

struct AdamParams {
  double lr = 0.05;
  double b1 = 0.9;
  double b2 = 0.999;
  double eps = 1e-8;
};

struct QaoaConfig {
  int p = 2;
  sim::MixerSpec::Kind mixer = sim::MixerSpec::Kind::xy_blocks;
  WarmStart init = WarmStart::none;
  double local_theta = 0.1;
  Objective objective = Objective::expectation;
  double cvar_alpha = 1.0;
  int shots = 1024;
  int max_steps = 1000;
  int early_window = 25;
  double early_threshold = 1e-3;
  OptimizerKind optimizer = OptimizerKind::adam;
  AdamParams adam;
  double fd_step = 1e-3;
  // Magnitude window for the random initial angles; zero angles sit on a
  // stationary point of every warm start, so draws start strictly positive.
  double init_angle_lo = 0.01;
  double init_angle_hi = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ParameterVector {
  std::vector<double> gammas;
  std::vector<double> betas;
};

// An instance bound to one arm's execution form: encoding applied, diagonal
// built, mixer blocks resolved, greedy warm-start bits computed.
struct PreparedInstance {
  const qubo::QkrdInstance* instance = nullptr;
  qubo::QuboModel model;
  qubo::VariableLayout layout;
  sim::DiagonalCost diag;
  sim::MixerSpec mixer;
  std::uint64_t greedy_bits = 0;
  int greedy_primary = 0;
  std::vector<int> greedy_followups;
};

// Binds instance and config; lambda_override rebuilds the QUBO with a
// different one-hot/gating penalty (penalty sweeps). Throws on
// mixer/encoding mismatches (domain-wall mixer needs the wall layout).
PreparedInstance prepare(const qubo::QkrdInstance& instance, const QaoaConfig& cfg,
                         std::optional<double> lambda_override = std::nullopt);

sim::StateVector run_circuit(const PreparedInstance& prep, const ParameterVector& params,
                             const QaoaConfig& cfg);

// Expectation objectives are exact; CVaR draws `shots` samples with the
// given stream and averages the lowest ceil(alpha*shots) energies.
double objective_value(const PreparedInstance& prep, const ParameterVector& params,
                       const QaoaConfig& cfg, std::uint64_t sample_stream = 0);

double cvar_from_energies(std::vector<double> energies, double alpha);

struct Decoded {
  int primary = -1;
  int followup = -1;
  bool feasible = false;
  bool fallback = false;  // greedy stand-in, no feasible support existed
  double energy = 0.0;
  std::uint64_t bits = 0;
};

Decoded decode_solution(const sim::StateVector& sv, const PreparedInstance& prep);

struct OptimizationTrace {
  std::vector<double> energies;          // objective value per step
  std::vector<ParameterVector> params;   // parameters per step
  int steps_run = 0;
  bool converged_early = false;
  ParameterVector final_params;
  double final_objective = 0.0;    // objective at the final parameters
  double final_expectation = 0.0;  // exact <H> of the final state
  double feasible_mass = 0.0;
  bool top_state_feasible = false;  // argmax-probability bitstring feasible?
  Decoded decoded;
};

OptimizationTrace optimize(const PreparedInstance& prep, const QaoaConfig& cfg);

// First step reaching 95% of the initial-to-final descent.
int convergence_steps(const OptimizationTrace& trace);

}  // namespace qkrd::qaoa
