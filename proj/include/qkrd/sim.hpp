#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "qkrd/instance.hpp"

namespace qkrd::sim {

using cplx = std::complex<double>;

// Dense amplitudes over n qubits; variable i of the layout is bit i of the
// array index. A state is owned by exactly one simulation and mutated in
// place by the apply_* routines.
struct StateVector {
  int n_qubits = 0;
  std::vector<cplx> amp;

  static StateVector zeros(int n);
  double norm() const;
};

inline constexpr int default_qubit_cap = 24;

struct DiagonalCost {
  int n_qubits = 0;
  std::vector<double> energies;  // entry b = QUBO energy of bitstring b
  // QUBO diagonals take few distinct values; the phase loop exploits that
  // through this table when present (energies[b] == levels[level_index[b]]).
  std::vector<double> levels;
  std::vector<std::uint32_t> level_index;
};

// Evaluates the 2-local model on every bitstring. Throws a resource error
// past the qubit cap (2^24 doubles = 128 MiB of diagonal).
DiagonalCost build_diagonal(const qubo::QuboModel& model, int n_cap = default_qubit_cap);

StateVector init_uniform(int n);
StateVector init_basis(int n, std::uint64_t bits);
// Basis state softened by one XY-ring application at `theta` per block.
StateVector init_local_superposition(int n, std::uint64_t bits,
                                     const std::vector<std::vector<int>>& blocks,
                                     double theta);

void apply_cost_phase(StateVector& sv, const DiagonalCost& diag, double gamma);

// exp(-i beta X) on every qubit.
void apply_x_mixer(StateVector& sv, double beta);

enum class XyMode {
  trotter,  // even/odd edge-colored sweep of exact two-qubit XY gates
  exact,    // exact block exponential (reference; blocks up to 12 qubits)
};

// Ring-coupled XY mixer per block: Hamming weight inside each block is
// conserved exactly in both modes; only the trotter/exact split differs for
// blocks of three or more qubits. Size-1 blocks are skipped.
void apply_xy_ring_mixer(StateVector& sv, const std::vector<std::vector<int>>& blocks,
                         double beta, XyMode mode = XyMode::trotter);

// Hopping between adjacent valid wall states of the block, exponentiated
// exactly on that K-dimensional subspace; identity elsewhere.
void apply_domain_wall_mixer(StateVector& sv, const std::vector<int>& wall_block,
                             double beta);

double expectation(const StateVector& sv, const DiagonalCost& diag);

// `shots` i.i.d. draws from |amp|^2; bit-reproducible for a fixed
// (seed, stream).
std::map<std::uint64_t, std::uint64_t> sample(const StateVector& sv, int shots,
                                              std::uint64_t seed,
                                              std::uint64_t stream = 0);

// Total probability on constraint-satisfying bitstrings of the layout.
double feasible_mass(const StateVector& sv, const qubo::VariableLayout& layout);

struct MixerSpec {
  enum class Kind { x, xy_primary, xy_blocks, domain_wall };
  Kind kind = Kind::x;
  std::vector<std::vector<int>> xy_blocks;
  std::vector<int> wall_block;
};

void apply_mixer(StateVector& sv, const MixerSpec& mixer, double beta,
                 XyMode mode = XyMode::trotter);

}  // namespace qkrd::sim
