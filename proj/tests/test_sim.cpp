#include <doctest.h>

#include <bit>
#include <cmath>

#include "oracles.hpp"
#include "qkrd/rng.hpp"
#include "qkrd/sim.hpp"

using namespace qkrd;
using namespace qkrd::sim;

namespace {

qubo::QuboModel random_model(int n, rng::Philox& gen) {
  qubo::QuboModel m;
  m.n_vars = n;
  m.linear.assign(n, 0.0);
  m.constant = gen.uniform(-2, 2);
  for (int i = 0; i < n; ++i) m.linear[i] = gen.uniform(-5, 5);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (gen.uniform() < 0.5) m.add_quadratic(i, j, gen.uniform(-3, 3));
  return m;
}

StateVector random_state(int n, rng::Philox& gen) {
  StateVector sv = StateVector::zeros(n);
  for (auto& a : sv.amp) a = cplx(gen.uniform(-1, 1), gen.uniform(-1, 1));
  const double nrm = sv.norm();
  for (auto& a : sv.amp) a /= nrm;
  return sv;
}

qubo::VariableLayout one_hot_layout(int k, int f) {
  qubo::VariableLayout l;
  l.encoding = qubo::Encoding::one_hot;
  l.k = k;
  l.f = f;
  l.n_qubits = k * (1 + f);
  for (int m = 0; m < k; ++m) l.primary.push_back(m);
  for (int m = 0; m < k && f > 0; ++m) {
    std::vector<int> block;
    for (int fi = 0; fi < f; ++fi) block.push_back(k + m * f + fi);
    l.followup_blocks.push_back(block);
  }
  return l;
}

}  // namespace

TEST_SUITE_BEGIN("sim");

TEST_CASE("diagonal of the zero model is zero; single linear term alternates") {
  qubo::QuboModel zero;
  zero.n_vars = 3;
  zero.linear.assign(3, 0.0);
  const auto d0 = build_diagonal(zero);
  for (double e : d0.energies) CHECK(e == 0.0);

  qubo::QuboModel lin = zero;
  lin.add_linear(0, 2.5);
  const auto d1 = build_diagonal(lin);
  for (std::uint64_t b = 0; b < 8; ++b)
    CHECK(d1.energies[b] == doctest::Approx(b & 1 ? 2.5 : 0.0));
}

TEST_CASE("diagonal matches per-bitstring recomputation on a random 8-var model") {
  rng::Philox gen(101, 0);
  const auto model = random_model(8, gen);
  const auto diag = build_diagonal(model);
  for (std::uint64_t b = 0; b < 256; ++b) {
    // Independent route: evaluate the polynomial directly.
    double e = model.constant;
    for (int i = 0; i < 8; ++i)
      if ((b >> i) & 1) e += model.linear[i];
    for (const auto& [key, c] : model.quadratic)
      if (((b >> key.first) & 1) && ((b >> key.second) & 1)) e += c;
    CHECK(diag.energies[b] == doctest::Approx(e).epsilon(1e-12));
  }
}

TEST_CASE("diagonal refuses models past the qubit cap") {
  qubo::QuboModel big;
  big.n_vars = 30;
  big.linear.assign(30, 0.0);
  CHECK_THROWS_WITH_AS(build_diagonal(big), doctest::Contains("cap"), std::runtime_error);
  rng::Philox gen(1, 0);
  CHECK_NOTHROW(build_diagonal(random_model(10, gen)));
}

TEST_CASE("initial states") {
  const auto u = init_uniform(2);
  for (const auto& a : u.amp) CHECK(std::abs(a - cplx(0.5, 0)) < 1e-15);

  const auto b = init_basis(2, 0b10);
  CHECK(std::abs(b.amp[2] - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(b.amp[0]) + std::abs(b.amp[1]) + std::abs(b.amp[3]) == 0.0);

  // Local superposition keeps support inside the block's weight-1 subspace.
  const auto ls = init_local_superposition(4, 0b0001, {{0, 1, 2, 3}}, 0.1);
  for (std::uint64_t idx = 0; idx < 16; ++idx) {
    if (std::popcount(idx) == 1) continue;
    CHECK(std::abs(ls.amp[idx]) < 1e-12);
  }
  CHECK(ls.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::norm(ls.amp[0b0001]) > 0.9);  // small-angle: mostly the seed state
}

TEST_CASE("cost phase: identity at gamma 0, global phase for constant shifts, signs at pi") {
  rng::Philox gen(7, 0);
  const auto model = random_model(4, gen);
  const auto diag = build_diagonal(model);
  auto sv = random_state(4, gen);
  const auto before = sv;
  apply_cost_phase(sv, diag, 0.0);
  CHECK(oracle::max_amp_diff(sv, oracle::to_eigen(before)) == 0.0);

  // Constant shift changes nothing observable.
  qubo::QuboModel shifted = model;
  shifted.constant += 3.7;
  auto sv2 = before;
  apply_cost_phase(sv2, build_diagonal(shifted), 0.8);
  auto sv3 = before;
  apply_cost_phase(sv3, diag, 0.8);
  CHECK(expectation(sv2, diag) == doctest::Approx(expectation(sv3, diag)).epsilon(1e-12));

  // Integer diagonal at gamma = pi flips signs by parity of the energy.
  qubo::QuboModel ints;
  ints.n_vars = 2;
  ints.linear = {1.0, 2.0};
  const auto di = build_diagonal(ints);
  auto sv4 = init_uniform(2);
  apply_cost_phase(sv4, di, std::numbers::pi);
  CHECK(std::real(sv4.amp[0]) == doctest::Approx(0.5));
  CHECK(std::real(sv4.amp[1]) == doctest::Approx(-0.5));
  CHECK(std::real(sv4.amp[2]) == doctest::Approx(0.5));
  CHECK(std::real(sv4.amp[3]) == doctest::Approx(-0.5));
}

TEST_CASE("x mixer: special angles and the analytic one-qubit rotation") {
  auto sv = init_basis(3, 0);
  apply_x_mixer(sv, 0.0);
  CHECK(std::abs(sv.amp[0] - cplx(1, 0)) < 1e-15);

  apply_x_mixer(sv, std::numbers::pi / 2);  // full flip up to phase
  CHECK(std::abs(std::abs(sv.amp[7]) - 1.0) < 1e-12);

  const double beta = 0.37;
  auto one = init_basis(1, 0);
  apply_x_mixer(one, beta);
  CHECK(std::abs(one.amp[0] - cplx(std::cos(beta), 0)) < 1e-12);
  CHECK(std::abs(one.amp[1] - cplx(0, -std::sin(beta))) < 1e-12);
}

TEST_CASE("two-qubit xy block matches the dense matrix exponential") {
  const double beta = std::numbers::pi / 4;
  auto sv = init_basis(2, 0b01);
  apply_xy_ring_mixer(sv, {{0, 1}}, beta);
  const auto u = oracle::xy_exact_matrix(2, {{0, 1}}, beta);
  oracle::Vec v = u * oracle::to_eigen(init_basis(2, 0b01));
  CHECK(oracle::max_amp_diff(sv, v) < 1e-12);
  // At pi/4 the excitation swaps completely (up to the -i phase).
  CHECK(std::abs(sv.amp[0b01]) < 1e-12);
  CHECK(std::abs(std::abs(sv.amp[0b10]) - 1.0) < 1e-12);
}

TEST_CASE("trotterized xy mixer equals its dense mirror and conserves weight") {
  rng::Philox gen(19, 0);
  const std::vector<std::vector<int>> blocks = {{0, 1, 2, 3, 4}};
  auto sv = random_state(5, gen);
  const auto before = sv;
  const double beta = 0.61;
  apply_xy_ring_mixer(sv, blocks, beta);
  CHECK(oracle::max_amp_diff(sv, oracle::xy_trotter_matrix(5, blocks, beta) *
                                     oracle::to_eigen(before)) < 1e-10);
  CHECK(sv.norm() == doctest::Approx(1.0).epsilon(1e-12));

  // Weight per block is untouched: mass within each Hamming sector constant.
  for (int w = 0; w <= 5; ++w) {
    double mass_before = 0, mass_after = 0;
    for (std::uint64_t b = 0; b < 32; ++b) {
      if (std::popcount(b) != w) continue;
      mass_before += std::norm(before.amp[b]);
      mass_after += std::norm(sv.amp[b]);
    }
    CHECK(mass_after == doctest::Approx(mass_before).epsilon(1e-12));
  }
}

TEST_CASE("exact xy mode matches the dense block exponential") {
  rng::Philox gen(23, 0);
  for (const int m : {3, 4, 6}) {
    std::vector<int> block(m);
    for (int i = 0; i < m; ++i) block[i] = i;
    auto sv = random_state(m, gen);
    const auto before = sv;
    const double beta = 0.43;
    apply_xy_ring_mixer(sv, {block}, beta, XyMode::exact);
    CHECK(oracle::max_amp_diff(sv, oracle::xy_exact_matrix(m, {block}, beta) *
                                       oracle::to_eigen(before)) < 1e-9);
  }
}

TEST_CASE("domain wall mixer: subspace preservation and dense oracle") {
  // K=3 choices on 2 wall qubits embedded in a 4-qubit register.
  const std::vector<int> wall = {1, 2};
  rng::Philox gen(29, 0);
  auto sv = random_state(4, gen);
  const auto before = sv;
  const double beta = 0.57;
  apply_domain_wall_mixer(sv, wall, beta);
  CHECK(oracle::max_amp_diff(
            sv, oracle::domain_wall_matrix(4, wall, beta) * oracle::to_eigen(before)) <
        1e-10);
  CHECK(sv.norm() == doctest::Approx(1.0).epsilon(1e-12));

  // Valid wall start stays on valid wall states (other qubits free).
  auto vs = init_basis(3, 0b001);  // wall block {0,1} prefix-1 plus env bit 2
  apply_domain_wall_mixer(vs, {0, 1}, 0.9);
  for (std::uint64_t b = 0; b < 8; ++b) {
    const std::uint64_t wall_bits = b & 0b011;
    const bool valid = wall_bits == 0b000 || wall_bits == 0b001 || wall_bits == 0b011;
    if (!valid) CHECK(std::abs(vs.amp[b]) < 1e-12);
  }

  auto id = init_basis(3, 0b011);
  apply_domain_wall_mixer(id, {0, 1}, 0.0);
  CHECK(std::abs(id.amp[0b011] - cplx(1, 0)) < 1e-14);
}

TEST_CASE("expectation: basis states, uniform halves, random oracle") {
  rng::Philox gen(31, 0);
  const auto model = random_model(6, gen);
  const auto diag = build_diagonal(model);
  const auto basis = init_basis(6, 37);
  CHECK(expectation(basis, diag) == doctest::Approx(diag.energies[37]));

  qubo::QuboModel one;
  one.n_vars = 1;
  one.linear = {4.0};
  const auto d1 = build_diagonal(one);
  CHECK(expectation(init_uniform(1), d1) == doctest::Approx(2.0));

  const auto sv = random_state(6, gen);
  double direct = 0;
  for (std::uint64_t b = 0; b < 64; ++b) direct += std::norm(sv.amp[b]) * diag.energies[b];
  CHECK(expectation(sv, diag) == doctest::Approx(direct).epsilon(1e-12));

  double lo = 1e300, hi = -1e300;
  for (double e : diag.energies) {
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  CHECK(expectation(sv, diag) >= lo - 1e-9);
  CHECK(expectation(sv, diag) <= hi + 1e-9);
}

TEST_CASE("sampling: determinism, basis concentration, binomial bound") {
  const auto basis = init_basis(4, 11);
  const auto counts = sample(basis, 100, 5, 0);
  REQUIRE(counts.size() == 1);
  CHECK(counts.at(11) == 100);

  const auto a = sample(init_uniform(3), 5000, 42, 1);
  const auto b = sample(init_uniform(3), 5000, 42, 1);
  CHECK(a == b);
  const auto c = sample(init_uniform(3), 5000, 43, 1);
  CHECK(a != c);

  // Uniform one-qubit: each outcome within 5 sigma of shots/2.
  const auto u = sample(init_uniform(1), 10000, 7, 0);
  const double sigma = std::sqrt(10000 * 0.25);
  for (std::uint64_t b2 = 0; b2 < 2; ++b2) {
    const auto it = u.find(b2);
    const double n = it == u.end() ? 0.0 : static_cast<double>(it->second);
    CHECK(std::abs(n - 5000.0) < 5 * sigma);
  }
}

TEST_CASE("feasible mass: counting and preservation under block mixers") {
  const auto layout = one_hot_layout(8, 0);
  CHECK(feasible_mass(init_uniform(8), layout) == doctest::Approx(8.0 / 256.0));

  const auto warm = init_basis(8, layout.encode(3));
  CHECK(feasible_mass(warm, layout) == doctest::Approx(1.0));

  // Arbitrary states keep their feasible mass through repeated XY sweeps.
  rng::Philox gen(41, 0);
  auto sv = random_state(8, gen);
  const double mass = feasible_mass(sv, layout);
  for (int rep = 0; rep < 7; ++rep)
    apply_xy_ring_mixer(sv, {layout.primary}, gen.uniform(0, 2));
  CHECK(feasible_mass(sv, layout) == doctest::Approx(mass).epsilon(1e-10));
  CHECK(sv.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("unitarity holds across all operators on random states") {
  rng::Philox gen(53, 0);
  const auto model = random_model(6, gen);
  const auto diag = build_diagonal(model);
  auto sv = random_state(6, gen);
  apply_cost_phase(sv, diag, 1.3);
  CHECK(sv.norm() == doctest::Approx(1.0).epsilon(1e-10));
  apply_x_mixer(sv, 0.8);
  CHECK(sv.norm() == doctest::Approx(1.0).epsilon(1e-10));
  apply_xy_ring_mixer(sv, {{0, 1, 2}, {3, 4}}, 0.9);
  CHECK(sv.norm() == doctest::Approx(1.0).epsilon(1e-10));
  apply_xy_ring_mixer(sv, {{0, 1, 2, 3}}, 0.7, XyMode::exact);
  CHECK(sv.norm() == doctest::Approx(1.0).epsilon(1e-10));
  apply_domain_wall_mixer(sv, {0, 1, 2}, 1.1);
  CHECK(sv.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_SUITE_END();
