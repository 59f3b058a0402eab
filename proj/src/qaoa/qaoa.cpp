#include "qkrd/qaoa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkrd/rng.hpp"

namespace qkrd::qaoa {

void QaoaConfig::validate() const {
  if (p < 1) throw std::invalid_argument("qaoa: p must be >= 1");
  if (objective == Objective::cvar) {
    if (!(cvar_alpha > 0.0 && cvar_alpha <= 1.0))
      throw std::invalid_argument("qaoa: cvar alpha must lie in (0, 1]");
    if (shots < 1) throw std::invalid_argument("qaoa: cvar needs shots >= 1");
  }
  if (max_steps < 1) throw std::invalid_argument("qaoa: max_steps must be >= 1");
  if (early_window < 2) throw std::invalid_argument("qaoa: early_window must be >= 2");
  if (!(init_angle_hi >= init_angle_lo && init_angle_lo >= 0))
    throw std::invalid_argument("qaoa: bad init angle window");
}

PreparedInstance prepare(const qubo::QkrdInstance& instance, const QaoaConfig& cfg,
                         std::optional<double> lambda_override) {
  cfg.validate();
  PreparedInstance prep;
  prep.instance = &instance;
  prep.model = instance.qubo;
  prep.layout = instance.layout;

  if (lambda_override) {
    qubo::InstanceConfig icfg = instance.config;
    icfg.weights.lambda_onehot = *lambda_override;
    icfg.weights.lambda_gate = *lambda_override;
    std::tie(prep.model, prep.layout) =
        qubo::build_qubo(instance.candidates, instance.followups, icfg);
  }

  const bool wants_wall = cfg.mixer == sim::MixerSpec::Kind::domain_wall;
  const bool have_wall = prep.layout.encoding == qubo::Encoding::domain_wall;
  if (wants_wall && !have_wall) {
    const double lambda = lambda_override.value_or(
        instance.config.weights.lambda_onehot);
    std::tie(prep.model, prep.layout) =
        qubo::encode_domain_wall(prep.model, prep.layout, lambda);
  }
  if (!wants_wall && prep.layout.encoding == qubo::Encoding::domain_wall &&
      cfg.mixer != sim::MixerSpec::Kind::x)
    throw std::invalid_argument("qaoa: XY mixers require the one-hot layout");

  prep.diag = sim::build_diagonal(prep.model);

  prep.mixer.kind = cfg.mixer;
  switch (cfg.mixer) {
    case sim::MixerSpec::Kind::x:
      break;
    case sim::MixerSpec::Kind::xy_primary:
      prep.mixer.xy_blocks = {prep.layout.primary};
      break;
    case sim::MixerSpec::Kind::xy_blocks:
      prep.mixer.xy_blocks = {prep.layout.primary};
      for (const auto& block : prep.layout.followup_blocks)
        prep.mixer.xy_blocks.push_back(block);
      break;
    case sim::MixerSpec::Kind::domain_wall:
      prep.mixer.wall_block = prep.layout.primary;
      for (const auto& block : prep.layout.followup_blocks)
        prep.mixer.xy_blocks.push_back(block);
      break;
  }

  // Greedy selection: candidates are score-sorted, as are follow-up blocks.
  prep.greedy_primary = 0;
  if (prep.layout.f > 0) {
    prep.greedy_followups.assign(prep.layout.k, 0);
    prep.greedy_bits = prep.layout.encode(0, 0);
  } else {
    prep.greedy_bits = prep.layout.encode(0);
  }
  return prep;
}

namespace {

std::vector<std::vector<int>> warm_blocks(const PreparedInstance& prep) {
  // Blocks softened by the local-superposition start: the primary one-hot
  // block plus the selected follow-up block. Wall layouts hop instead.
  std::vector<std::vector<int>> blocks;
  if (prep.layout.encoding == qubo::Encoding::one_hot) blocks.push_back(prep.layout.primary);
  if (prep.layout.f > 0)
    blocks.push_back(prep.layout.followup_blocks[prep.greedy_primary]);
  return blocks;
}

sim::StateVector initial_state(const PreparedInstance& prep, const QaoaConfig& cfg) {
  const int n = prep.layout.n_qubits;
  switch (cfg.init) {
    case WarmStart::none:
      return sim::init_uniform(n);
    case WarmStart::basis:
      return sim::init_basis(n, prep.greedy_bits);
    case WarmStart::local_superposition: {
      if (prep.layout.encoding == qubo::Encoding::domain_wall) {
        auto sv = sim::init_basis(n, prep.greedy_bits);
        sim::apply_domain_wall_mixer(sv, prep.layout.primary, cfg.local_theta);
        if (prep.layout.f > 0)
          sim::apply_xy_ring_mixer(sv, {prep.layout.followup_blocks[prep.greedy_primary]},
                                   cfg.local_theta);
        return sv;
      }
      return sim::init_local_superposition(n, prep.greedy_bits, warm_blocks(prep),
                                           cfg.local_theta);
    }
  }
  throw std::logic_error("unreachable warm start");
}

}  // namespace

sim::StateVector run_circuit(const PreparedInstance& prep, const ParameterVector& params,
                             const QaoaConfig& cfg) {
  if (static_cast<int>(params.gammas.size()) != cfg.p ||
      static_cast<int>(params.betas.size()) != cfg.p)
    throw std::invalid_argument("run_circuit: parameter count != p");
  sim::StateVector sv = initial_state(prep, cfg);
  for (int layer = 0; layer < cfg.p; ++layer) {
    sim::apply_cost_phase(sv, prep.diag, params.gammas[layer]);
    sim::apply_mixer(sv, prep.mixer, params.betas[layer]);
  }
  return sv;
}

double cvar_from_energies(std::vector<double> energies, double alpha) {
  if (energies.empty()) throw std::invalid_argument("cvar: no energies");
  std::sort(energies.begin(), energies.end());
  const auto keep = static_cast<std::size_t>(
      std::ceil(alpha * static_cast<double>(energies.size())));
  const std::size_t m = std::max<std::size_t>(1, std::min(keep, energies.size()));
  double sum = 0;
  for (std::size_t i = 0; i < m; ++i) sum += energies[i];
  return sum / static_cast<double>(m);
}

double objective_value(const PreparedInstance& prep, const ParameterVector& params,
                       const QaoaConfig& cfg, std::uint64_t sample_stream) {
  const sim::StateVector sv = run_circuit(prep, params, cfg);
  if (cfg.objective == Objective::expectation) return sim::expectation(sv, prep.diag);
  const auto counts = sim::sample(sv, cfg.shots, cfg.seed, sample_stream);
  std::vector<double> energies;
  energies.reserve(cfg.shots);
  for (const auto& [bits, count] : counts)
    for (std::uint64_t i = 0; i < count; ++i)
      energies.push_back(prep.diag.energies[bits]);
  return cvar_from_energies(std::move(energies), cfg.cvar_alpha);
}

Decoded decode_solution(const sim::StateVector& sv, const PreparedInstance& prep) {
  Decoded out;
  double best = 0.0;
  std::uint64_t best_bits = 0;
  bool found = false;
  for (const std::uint64_t bits : prep.layout.feasible_bitstrings()) {
    const double prob = std::norm(sv.amp[bits]);
    if (prob > 0.0 && (!found || prob > best || (prob == best && bits < best_bits))) {
      best = prob;
      best_bits = bits;
      found = true;
    }
  }
  if (!found) {
    out.fallback = true;
    out.feasible = false;
    out.bits = prep.greedy_bits;
    out.primary = prep.greedy_primary;
    out.followup = prep.layout.f > 0 ? 0 : -1;
    out.energy = prep.diag.energies[prep.greedy_bits];
    return out;
  }
  const auto sel = prep.layout.decode(best_bits);
  out.primary = sel->primary;
  out.followup = sel->followup;
  out.feasible = true;
  out.bits = best_bits;
  out.energy = prep.diag.energies[best_bits];
  return out;
}

namespace {

double stdev(const std::vector<double>& xs, std::size_t first, std::size_t count) {
  double mean = 0;
  for (std::size_t i = 0; i < count; ++i) mean += xs[first + i];
  mean /= static_cast<double>(count);
  double var = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = xs[first + i] - mean;
    var += d * d;
  }
  return std::sqrt(var / static_cast<double>(count));
}

struct EvalContext {
  const PreparedInstance* prep;
  const QaoaConfig* cfg;
  std::uint64_t stream = 0;  // advances per evaluation for shot objectives

  double operator()(const ParameterVector& params) {
    const double v = objective_value(*prep, params, *cfg, stream);
    ++stream;
    if (std::isnan(v))
      throw std::runtime_error("optimize: objective returned NaN at stream " +
                               std::to_string(stream - 1));
    return v;
  }
};

ParameterVector unpack(const std::vector<double>& x, int p) {
  ParameterVector out;
  out.gammas.assign(x.begin(), x.begin() + p);
  out.betas.assign(x.begin() + p, x.end());
  return out;
}

std::vector<double> pack(const ParameterVector& pv) {
  std::vector<double> x = pv.gammas;
  x.insert(x.end(), pv.betas.begin(), pv.betas.end());
  return x;
}

bool early_stop(const std::vector<double>& energies, const QaoaConfig& cfg) {
  const auto w = static_cast<std::size_t>(cfg.early_window);
  if (energies.size() < w) return false;
  return stdev(energies, energies.size() - w, w) < cfg.early_threshold;
}

OptimizationTrace run_adam(const PreparedInstance& prep, const QaoaConfig& cfg,
                           std::vector<double> x, EvalContext& eval) {
  OptimizationTrace trace;
  const int dim = static_cast<int>(x.size());
  std::vector<double> m(dim, 0.0), v(dim, 0.0);
  const AdamParams& ap = cfg.adam;

  for (int step = 0; step < cfg.max_steps; ++step) {
    const ParameterVector pv = unpack(x, cfg.p);
    const double energy = eval(pv);
    trace.energies.push_back(energy);
    trace.params.push_back(pv);
    if (early_stop(trace.energies, cfg)) {
      trace.converged_early = true;
      break;
    }

    // Central finite differences; exact simulation keeps them benign.
    std::vector<double> grad(dim);
    for (int d = 0; d < dim; ++d) {
      auto hi = x, lo = x;
      hi[d] += cfg.fd_step;
      lo[d] -= cfg.fd_step;
      grad[d] = (eval(unpack(hi, cfg.p)) - eval(unpack(lo, cfg.p))) / (2 * cfg.fd_step);
    }
    const double t = static_cast<double>(step + 1);
    for (int d = 0; d < dim; ++d) {
      m[d] = ap.b1 * m[d] + (1 - ap.b1) * grad[d];
      v[d] = ap.b2 * v[d] + (1 - ap.b2) * grad[d] * grad[d];
      const double mhat = m[d] / (1 - std::pow(ap.b1, t));
      const double vhat = v[d] / (1 - std::pow(ap.b2, t));
      x[d] -= ap.lr * mhat / (std::sqrt(vhat) + ap.eps);
    }
  }
  trace.final_params = unpack(x, cfg.p);
  return trace;
}

OptimizationTrace run_simplex(const PreparedInstance& prep, const QaoaConfig& cfg,
                              const std::vector<double>& x0, EvalContext& eval) {
  OptimizationTrace trace;
  const int dim = static_cast<int>(x0.size());
  std::vector<std::vector<double>> pts(dim + 1, x0);
  for (int d = 0; d < dim; ++d) pts[d + 1][d] += 0.25;
  std::vector<double> vals(dim + 1);
  for (int i = 0; i <= dim; ++i) vals[i] = eval(unpack(pts[i], cfg.p));

  const auto order = [&]() {
    std::vector<int> idx(dim + 1);
    for (int i = 0; i <= dim; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> np(dim + 1);
    std::vector<double> nv(dim + 1);
    for (int i = 0; i <= dim; ++i) {
      np[i] = pts[idx[i]];
      nv[i] = vals[idx[i]];
    }
    pts.swap(np);
    vals.swap(nv);
  };

  for (int step = 0; step < cfg.max_steps; ++step) {
    order();
    trace.energies.push_back(vals[0]);
    trace.params.push_back(unpack(pts[0], cfg.p));
    if (early_stop(trace.energies, cfg)) {
      trace.converged_early = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (int i = 0; i < dim; ++i)
      for (int d = 0; d < dim; ++d) centroid[d] += pts[i][d] / dim;

    const auto blend = [&](double coeff) {
      std::vector<double> p(dim);
      for (int d = 0; d < dim; ++d)
        p[d] = centroid[d] + coeff * (pts[dim][d] - centroid[d]);
      return p;
    };

    const auto reflected = blend(-1.0);
    const double fr = eval(unpack(reflected, cfg.p));
    if (fr < vals[0]) {
      const auto expanded = blend(-2.0);
      const double fe = eval(unpack(expanded, cfg.p));
      if (fe < fr) {
        pts[dim] = expanded;
        vals[dim] = fe;
      } else {
        pts[dim] = reflected;
        vals[dim] = fr;
      }
      continue;
    }
    if (fr < vals[dim - 1]) {
      pts[dim] = reflected;
      vals[dim] = fr;
      continue;
    }
    const auto contracted = blend(0.5);
    const double fc = eval(unpack(contracted, cfg.p));
    if (fc < vals[dim]) {
      pts[dim] = contracted;
      vals[dim] = fc;
      continue;
    }
    for (int i = 1; i <= dim; ++i) {  // shrink toward the best vertex
      for (int d = 0; d < dim; ++d) pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
      vals[i] = eval(unpack(pts[i], cfg.p));
    }
  }
  order();
  trace.final_params = unpack(pts[0], cfg.p);
  (void)prep;
  return trace;
}

}  // namespace

OptimizationTrace optimize(const PreparedInstance& prep, const QaoaConfig& cfg) {
  cfg.validate();
  rng::Philox angle_gen(cfg.seed, 0xa11);
  std::vector<double> x0(2 * cfg.p);
  for (double& xi : x0) xi = angle_gen.uniform(cfg.init_angle_lo, cfg.init_angle_hi);

  EvalContext eval{&prep, &cfg, 0};
  OptimizationTrace trace = cfg.optimizer == OptimizerKind::adam
                                ? run_adam(prep, cfg, x0, eval)
                                : run_simplex(prep, cfg, x0, eval);
  trace.steps_run = static_cast<int>(trace.energies.size());

  const sim::StateVector final_state = run_circuit(prep, trace.final_params, cfg);
  trace.final_expectation = sim::expectation(final_state, prep.diag);
  trace.final_objective = cfg.objective == Objective::expectation
                              ? trace.final_expectation
                              : objective_value(prep, trace.final_params, cfg, eval.stream);
  trace.feasible_mass = sim::feasible_mass(final_state, prep.layout);
  trace.decoded = decode_solution(final_state, prep);

  std::uint64_t argmax = 0;
  double best = -1.0;
  for (std::size_t b = 0; b < final_state.amp.size(); ++b) {
    const double prob = std::norm(final_state.amp[b]);
    if (prob > best) {
      best = prob;
      argmax = b;
    }
  }
  trace.top_state_feasible = prep.layout.is_feasible(argmax);
  return trace;
}

int convergence_steps(const OptimizationTrace& trace) {
  if (trace.energies.empty()) return 0;
  const double e0 = trace.energies.front();
  const double ef = trace.energies.back();
  if (e0 == ef) return trace.steps_run;
  const double target = 0.95 * (e0 - ef);
  for (int t = 0; t < static_cast<int>(trace.energies.size()); ++t)
    if (e0 - trace.energies[t] >= target) return t;
  return trace.steps_run;
}

}  // namespace qkrd::qaoa
