#include "qkrd/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qkrd/rng.hpp"

namespace qkrd::sim {

namespace {

constexpr cplx imag_unit{0.0, 1.0};

std::uint64_t size_of(int n) { return std::uint64_t{1} << n; }

void check_qubits(int n, int cap) {
  if (n < 1) throw std::invalid_argument("statevector: need at least one qubit");
  if (n > cap)
    throw std::runtime_error("statevector: " + std::to_string(n) +
                             " qubits exceeds the " + std::to_string(cap) +
                             "-qubit memory cap");
}

}  // namespace

StateVector StateVector::zeros(int n) {
  check_qubits(n, default_qubit_cap);
  StateVector sv;
  sv.n_qubits = n;
  sv.amp.assign(size_of(n), cplx{0.0, 0.0});
  return sv;
}

double StateVector::norm() const {
  double s = 0;
  for (const cplx& a : amp) s += std::norm(a);
  return std::sqrt(s);
}

DiagonalCost build_diagonal(const qubo::QuboModel& model, int n_cap) {
  check_qubits(model.n_vars, n_cap);
  const std::uint64_t size = size_of(model.n_vars);
  DiagonalCost diag;
  diag.n_qubits = model.n_vars;
  diag.energies.assign(size, model.constant);
  for (int i = 0; i < model.n_vars; ++i) {
    const double c = model.linear[i];
    if (c == 0.0) continue;
    const std::uint64_t stride = std::uint64_t{1} << i;
    for (std::uint64_t base = stride; base < size; base += 2 * stride)
      for (std::uint64_t b = base; b < base + stride; ++b) diag.energies[b] += c;
  }
  for (const auto& [key, c] : model.quadratic) {
    const std::uint64_t mask =
        (std::uint64_t{1} << key.first) | (std::uint64_t{1} << key.second);
    for (std::uint64_t b = 0; b < size; ++b)
      if ((b & mask) == mask) diag.energies[b] += c;
  }

  if (model.n_vars <= 20) {
    diag.levels = diag.energies;
    std::sort(diag.levels.begin(), diag.levels.end());
    diag.levels.erase(std::unique(diag.levels.begin(), diag.levels.end()),
                      diag.levels.end());
    diag.level_index.resize(size);
    for (std::uint64_t b = 0; b < size; ++b)
      diag.level_index[b] = static_cast<std::uint32_t>(
          std::lower_bound(diag.levels.begin(), diag.levels.end(), diag.energies[b]) -
          diag.levels.begin());
  }
  return diag;
}

StateVector init_uniform(int n) {
  StateVector sv = StateVector::zeros(n);
  const double a = std::pow(2.0, -0.5 * n);
  std::fill(sv.amp.begin(), sv.amp.end(), cplx{a, 0.0});
  return sv;
}

StateVector init_basis(int n, std::uint64_t bits) {
  StateVector sv = StateVector::zeros(n);
  if (bits >= size_of(n)) throw std::invalid_argument("init_basis: bits out of range");
  sv.amp[bits] = 1.0;
  return sv;
}

StateVector init_local_superposition(int n, std::uint64_t bits,
                                     const std::vector<std::vector<int>>& blocks,
                                     double theta) {
  StateVector sv = init_basis(n, bits);
  apply_xy_ring_mixer(sv, blocks, theta);
  return sv;
}

void apply_cost_phase(StateVector& sv, const DiagonalCost& diag, double gamma) {
  if (diag.n_qubits != sv.n_qubits)
    throw std::invalid_argument("apply_cost_phase: qubit count mismatch");
  const std::uint64_t size = sv.amp.size();
  if (!diag.levels.empty()) {
    std::vector<cplx> phases(diag.levels.size());
    for (std::size_t u = 0; u < diag.levels.size(); ++u)
      phases[u] = std::polar(1.0, -gamma * diag.levels[u]);
    for (std::uint64_t b = 0; b < size; ++b)
      sv.amp[b] *= phases[diag.level_index[b]];
    return;
  }
  for (std::uint64_t b = 0; b < size; ++b)
    sv.amp[b] *= std::polar(1.0, -gamma * diag.energies[b]);
}

void apply_x_mixer(StateVector& sv, double beta) {
  const double c = std::cos(beta);
  const cplx ms = -imag_unit * std::sin(beta);
  const std::uint64_t size = sv.amp.size();
  for (int q = 0; q < sv.n_qubits; ++q) {
    const std::uint64_t stride = std::uint64_t{1} << q;
    for (std::uint64_t base = 0; base < size; base += 2 * stride)
      for (std::uint64_t b = base; b < base + stride; ++b) {
        const cplx a0 = sv.amp[b];
        const cplx a1 = sv.amp[b + stride];
        sv.amp[b] = c * a0 + ms * a1;
        sv.amp[b + stride] = ms * a0 + c * a1;
      }
  }
}

namespace {

// Exact exp(-i beta (X_i X_j + Y_i Y_j)): identity on |00>,|11>, a
// rotation by 2*beta on the |01>,|10> pair. The predictable scan pattern
// outruns a strided pair enumeration here.
void apply_xy_edge(StateVector& sv, int qi, int qj, double beta) {
  const double c = std::cos(2 * beta);
  const cplx ms = -imag_unit * std::sin(2 * beta);
  const std::uint64_t bi = std::uint64_t{1} << qi;
  const std::uint64_t bj = std::uint64_t{1} << qj;
  const std::uint64_t size = sv.amp.size();
  for (std::uint64_t b = 0; b < size; ++b) {
    if ((b & bi) == 0 || (b & bj) != 0) continue;  // visit each pair once
    const std::uint64_t partner = (b ^ bi) | bj;
    const cplx a10 = sv.amp[b];
    const cplx a01 = sv.amp[partner];
    sv.amp[b] = c * a10 + ms * a01;
    sv.amp[partner] = ms * a10 + c * a01;
  }
}

std::vector<std::pair<int, int>> ring_edges(const std::vector<int>& block) {
  const int m = static_cast<int>(block.size());
  std::vector<std::pair<int, int>> edges;
  if (m == 2) {
    edges.emplace_back(block[0], block[1]);
    return edges;
  }
  for (int t = 0; t < m; ++t) edges.emplace_back(block[t], block[(t + 1) % m]);
  return edges;
}

// ---- exact block exponential (reference mode) ------------------------------

struct DenseMatrix {
  int n = 0;
  std::vector<cplx> a;  // row-major
  explicit DenseMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_) {}
  cplx& at(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
  const cplx& at(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }
};

DenseMatrix matmul(const DenseMatrix& x, const DenseMatrix& y) {
  DenseMatrix out(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      const cplx v = x.at(i, k);
      if (v == cplx{}) continue;
      for (int j = 0; j < x.n; ++j) out.at(i, j) += v * y.at(k, j);
    }
  return out;
}

// Scaling-and-squaring Taylor exponential; dimensions here stay small.
DenseMatrix matexp(const DenseMatrix& m, double norm_bound) {
  int squarings = 0;
  double scale = 1.0;
  while (norm_bound * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  DenseMatrix scaled(m.n);
  for (std::size_t i = 0; i < m.a.size(); ++i) scaled.a[i] = m.a[i] * scale;

  DenseMatrix result(m.n);
  for (int i = 0; i < m.n; ++i) result.at(i, i) = 1.0;
  DenseMatrix term = result;
  for (int k = 1; k <= 24; ++k) {
    term = matmul(term, scaled);
    for (std::size_t i = 0; i < term.a.size(); ++i) term.a[i] /= static_cast<double>(k);
    for (std::size_t i = 0; i < result.a.size(); ++i) result.a[i] += term.a[i];
  }
  for (int s = 0; s < squarings; ++s) result = matmul(result, result);
  return result;
}

// Applies a unitary defined on a list of block-local basis patterns to every
// environment configuration; amplitudes outside the listed patterns are
// untouched.
void apply_subspace_unitary(StateVector& sv, const std::vector<int>& block,
                            const std::vector<std::uint64_t>& local_patterns,
                            const DenseMatrix& u) {
  const int m = static_cast<int>(block.size());
  std::vector<std::uint64_t> global_patterns;
  for (const std::uint64_t lp : local_patterns) {
    std::uint64_t g = 0;
    for (int t = 0; t < m; ++t)
      if ((lp >> t) & 1) g |= std::uint64_t{1} << block[t];
    global_patterns.push_back(g);
  }

  std::vector<int> env_positions;
  std::uint64_t block_mask = 0;
  for (int q : block) block_mask |= std::uint64_t{1} << q;
  for (int q = 0; q < sv.n_qubits; ++q)
    if (!((block_mask >> q) & 1)) env_positions.push_back(q);

  const int dim = static_cast<int>(local_patterns.size());
  std::vector<cplx> x(dim), y(dim);
  const std::uint64_t env_count = std::uint64_t{1} << env_positions.size();
  for (std::uint64_t e = 0; e < env_count; ++e) {
    std::uint64_t base = 0;
    for (std::size_t t = 0; t < env_positions.size(); ++t)
      if ((e >> t) & 1) base |= std::uint64_t{1} << env_positions[t];
    for (int i = 0; i < dim; ++i) x[i] = sv.amp[base | global_patterns[i]];
    for (int i = 0; i < dim; ++i) {
      cplx acc{};
      for (int j = 0; j < dim; ++j) acc += u.at(i, j) * x[j];
      y[i] = acc;
    }
    for (int i = 0; i < dim; ++i) sv.amp[base | global_patterns[i]] = y[i];
  }
}

void apply_xy_block_exact(StateVector& sv, const std::vector<int>& block, double beta) {
  const int m = static_cast<int>(block.size());
  if (m > 12)
    throw std::runtime_error("xy exact mode: block too large (limit 12 qubits)");
  const auto edges_global = ring_edges(block);
  std::vector<std::pair<int, int>> edges;  // block-local positions
  for (const auto& [a, b] : edges_global) {
    const auto pos = [&](int q) {
      return static_cast<int>(std::find(block.begin(), block.end(), q) - block.begin());
    };
    edges.emplace_back(pos(a), pos(b));
  }

  // B conserves Hamming weight: exponentiate each weight sector separately.
  for (int w = 1; w < m; ++w) {
    std::vector<std::uint64_t> patterns;
    for (std::uint64_t lp = 0; lp < (std::uint64_t{1} << m); ++lp)
      if (std::popcount(lp) == w) patterns.push_back(lp);
    const int dim = static_cast<int>(patterns.size());
    const auto index_of = [&](std::uint64_t lp) {
      return static_cast<int>(std::lower_bound(patterns.begin(), patterns.end(), lp) -
                              patterns.begin());
    };
    DenseMatrix h(dim);
    for (int i = 0; i < dim; ++i) {
      const std::uint64_t lp = patterns[i];
      for (const auto& [t, u] : edges) {
        const bool bt = (lp >> t) & 1, bu = (lp >> u) & 1;
        if (bt == bu) continue;
        const std::uint64_t hopped = lp ^ ((std::uint64_t{1} << t) | (std::uint64_t{1} << u));
        h.at(i, index_of(hopped)) += 2.0;  // XX+YY matrix element
      }
    }
    DenseMatrix gen(dim);
    for (std::size_t i = 0; i < h.a.size(); ++i) gen.a[i] = -imag_unit * beta * h.a[i];
    const double bound = std::abs(beta) * 2.0 * 2.0 * edges.size();
    apply_subspace_unitary(sv, block, patterns, matexp(gen, bound));
  }
}

}  // namespace

void apply_xy_ring_mixer(StateVector& sv, const std::vector<std::vector<int>>& blocks,
                         double beta, XyMode mode) {
  for (const auto& block : blocks) {
    if (block.size() < 2) continue;  // nothing to couple
    if (mode == XyMode::exact) {
      apply_xy_block_exact(sv, block, beta);
      continue;
    }
    const auto edges = ring_edges(block);
    // Even/odd edge coloring keeps the sweep deterministic.
    for (std::size_t t = 0; t < edges.size(); t += 2)
      apply_xy_edge(sv, edges[t].first, edges[t].second, beta);
    for (std::size_t t = 1; t < edges.size(); t += 2)
      apply_xy_edge(sv, edges[t].first, edges[t].second, beta);
  }
}

void apply_domain_wall_mixer(StateVector& sv, const std::vector<int>& wall_block,
                             double beta) {
  const int m = static_cast<int>(wall_block.size());
  if (m < 1) return;
  const int k = m + 1;  // encoded choices / valid wall states

  // Valid wall patterns: prefix of i ones, block-local.
  std::vector<std::uint64_t> patterns;
  for (int i = 0; i <= m; ++i) patterns.push_back((std::uint64_t{1} << i) - 1);

  // exp(-i beta A) for the K-node path graph, by its closed-form spectrum:
  // eigenvalue 2 cos(pi q / (K+1)) with sine eigenvectors.
  DenseMatrix u(k);
  const double norm = std::sqrt(2.0 / (k + 1));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      cplx acc{};
      for (int q = 1; q <= k; ++q) {
        const double lambda = 2.0 * std::cos(std::numbers::pi * q / (k + 1));
        const double va = norm * std::sin(std::numbers::pi * q * (a + 1) / (k + 1));
        const double vb = norm * std::sin(std::numbers::pi * q * (b + 1) / (k + 1));
        acc += va * vb * std::polar(1.0, -beta * lambda);
      }
      u.at(a, b) = acc;
    }

  apply_subspace_unitary(sv, wall_block, patterns, u);
}

double expectation(const StateVector& sv, const DiagonalCost& diag) {
  if (diag.n_qubits != sv.n_qubits)
    throw std::invalid_argument("expectation: qubit count mismatch");
  double e = 0;
  for (std::size_t b = 0; b < sv.amp.size(); ++b)
    e += std::norm(sv.amp[b]) * diag.energies[b];
  return e;
}

std::map<std::uint64_t, std::uint64_t> sample(const StateVector& sv, int shots,
                                              std::uint64_t seed, std::uint64_t stream) {
  if (shots < 1) throw std::invalid_argument("sample: shots must be >= 1");
  std::vector<double> cdf(sv.amp.size());
  double acc = 0;
  for (std::size_t b = 0; b < sv.amp.size(); ++b) {
    acc += std::norm(sv.amp[b]);
    cdf[b] = acc;
  }
  rng::Philox gen(seed, stream);
  std::map<std::uint64_t, std::uint64_t> counts;
  for (int s = 0; s < shots; ++s) {
    const double u = gen.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::uint64_t b = it == cdf.end() ? cdf.size() - 1
                                            : static_cast<std::uint64_t>(it - cdf.begin());
    ++counts[b];
  }
  return counts;
}

double feasible_mass(const StateVector& sv, const qubo::VariableLayout& layout) {
  if (layout.n_qubits != sv.n_qubits)
    throw std::invalid_argument("feasible_mass: qubit count mismatch");
  double mass = 0;
  for (const std::uint64_t bits : layout.feasible_bitstrings())
    mass += std::norm(sv.amp[bits]);
  return mass;
}

void apply_mixer(StateVector& sv, const MixerSpec& mixer, double beta, XyMode mode) {
  switch (mixer.kind) {
    case MixerSpec::Kind::x:
      apply_x_mixer(sv, beta);
      return;
    case MixerSpec::Kind::xy_primary:
    case MixerSpec::Kind::xy_blocks:
      apply_xy_ring_mixer(sv, mixer.xy_blocks, beta, mode);
      return;
    case MixerSpec::Kind::domain_wall:
      apply_domain_wall_mixer(sv, mixer.wall_block, beta);
      apply_xy_ring_mixer(sv, mixer.xy_blocks, beta, mode);
      return;
  }
}

}  // namespace qkrd::sim
