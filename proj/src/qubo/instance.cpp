#include "qkrd/instance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qkrd::qubo {

using chess::Bitboard;
using chess::Move;
using chess::Position;
using chess::Square;

void QuboWeights::validate() const {
  if (!(alpha1 >= alpha2 && alpha2 > 0))
    throw std::invalid_argument("weights: require alpha1 >= alpha2 > 0");
  if (!(lambda_onehot > 0) || !(lambda_gate > 0))
    throw std::invalid_argument("weights: penalties must be positive");
  if (beta_risk < 0) throw std::invalid_argument("weights: beta_risk must be >= 0");
}

void InstanceConfig::validate() const {
  if (roi_size < 3 || roi_size % 2 == 0)
    throw std::invalid_argument("config: roi_size must be odd and >= 3");
  if (k < 1) throw std::invalid_argument("config: k must be >= 1");
  if (f < 0) throw std::invalid_argument("config: f must be >= 0");
  weights.validate();
}

double candidate_score(int c1, int c2, int risk, const QuboWeights& w) {
  return w.alpha1 * c1 + w.alpha2 * c2 - w.beta_risk * risk;
}

// ---- layout ----------------------------------------------------------------

namespace {

bool bit_set(std::uint64_t bits, int i) { return (bits >> i) & 1; }

// Wall prefix length when the block bits form a valid 1...10...0 pattern.
std::optional<int> wall_prefix(std::uint64_t bits, const std::vector<int>& wall) {
  int prefix = 0;
  bool falling = false;
  for (int q : wall) {
    if (bit_set(bits, q)) {
      if (falling) return std::nullopt;
      ++prefix;
    } else {
      falling = true;
    }
  }
  return prefix;
}

}  // namespace

bool VariableLayout::is_feasible(std::uint64_t bits) const {
  int selected = -1;
  if (encoding == Encoding::one_hot) {
    for (int i = 0; i < k; ++i) {
      if (bit_set(bits, primary[i])) {
        if (selected >= 0) return false;
        selected = i;
      }
    }
    if (selected < 0) return false;
  } else {
    const auto prefix = wall_prefix(bits, primary);
    if (!prefix) return false;
    selected = *prefix;
  }
  for (int m = 0; m < static_cast<int>(followup_blocks.size()); ++m) {
    int weight = 0;
    for (int q : followup_blocks[m]) weight += bit_set(bits, q);
    if (weight != (m == selected && f > 0 ? 1 : 0)) return false;
  }
  return true;
}

std::uint64_t VariableLayout::encode(int choice, int followup) const {
  std::uint64_t bits = 0;
  if (encoding == Encoding::one_hot) {
    bits |= std::uint64_t{1} << primary[choice];
  } else {
    for (int i = 0; i < choice; ++i) bits |= std::uint64_t{1} << primary[i];
  }
  if (f > 0) {
    if (followup < 0 || followup >= f)
      throw std::invalid_argument("layout: follow-up index required");
    bits |= std::uint64_t{1} << followup_blocks[choice][followup];
  }
  return bits;
}

std::vector<std::uint64_t> VariableLayout::feasible_bitstrings() const {
  std::vector<std::uint64_t> out;
  for (int m = 0; m < k; ++m) {
    if (f == 0) out.push_back(encode(m));
    else
      for (int fi = 0; fi < f; ++fi) out.push_back(encode(m, fi));
  }
  return out;
}

std::optional<VariableLayout::Selection> VariableLayout::decode(
    std::uint64_t bits) const {
  if (!is_feasible(bits)) return std::nullopt;
  Selection sel;
  if (encoding == Encoding::one_hot) {
    for (int i = 0; i < k; ++i)
      if (bit_set(bits, primary[i])) sel.primary = i;
  } else {
    sel.primary = *wall_prefix(bits, primary);
  }
  if (f > 0) {
    const auto& block = followup_blocks[sel.primary];
    for (int fi = 0; fi < f; ++fi)
      if (bit_set(bits, block[fi])) sel.followup = fi;
  }
  return sel;
}

// ---- model -----------------------------------------------------------------

void QuboModel::add_linear(int i, double c) {
  if (i < 0 || i >= n_vars) throw std::out_of_range("qubo: variable index");
  linear[i] += c;
}

void QuboModel::add_quadratic(int i, int j, double c) {
  if (i == j) throw std::invalid_argument("qubo: quadratic term needs distinct vars");
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n_vars) throw std::out_of_range("qubo: variable index");
  const auto key = std::make_pair(i, j);
  const double v = (quadratic[key] += c);
  if (v == 0.0) quadratic.erase(key);
}

double QuboModel::energy(std::uint64_t bits) const {
  double e = constant;
  for (int i = 0; i < n_vars; ++i)
    if (bit_set(bits, i)) e += linear[i];
  for (const auto& [key, c] : quadratic)
    if (bit_set(bits, key.first) && bit_set(bits, key.second)) e += c;
  return e;
}

// ---- generation ------------------------------------------------------------

Bitboard extract_roi(const Position& p, int roi_size) {
  if (roi_size < 3 || roi_size % 2 == 0)
    throw std::invalid_argument("extract_roi: roi_size must be odd and >= 3");
  const auto king = p.king_square(chess::opposite(p.side_to_move()));
  if (!king) throw std::invalid_argument("extract_roi: defender king absent");
  const int half = roi_size / 2;
  Bitboard roi = 0;
  for (int fl = king->file() - half; fl <= king->file() + half; ++fl)
    for (int r = king->rank() - half; r <= king->rank() + half; ++r)
      if (fl >= 0 && fl < 8 && r >= 0 && r < 8) roi |= chess::bb(Square(fl, r));
  return roi;
}

namespace {

Candidate make_candidate(const ring::CandidateMove& cm, const QuboWeights& w) {
  Candidate c;
  c.move = cm.move;
  c.c1 = cm.coverage.c1;
  c.c2 = cm.coverage.c2;
  c.risk = cm.risk.value;
  c.gain = cm.gain();
  c.score = candidate_score(c.c1, c.c2, c.risk, w);
  return c;
}

void sort_by_score(std::vector<Candidate>& cs) {
  std::stable_sort(cs.begin(), cs.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.move.notation() < b.move.notation();
  });
}

Position pass_turn(const Position& p) {
  Position q = p;
  q.set_side_to_move(chess::opposite(p.side_to_move()));
  q.set_en_passant(std::nullopt);
  return q;
}

}  // namespace

std::optional<std::vector<Candidate>> select_candidates(const Position& p,
                                                        const InstanceConfig& cfg) {
  cfg.validate();
  const Bitboard roi = extract_roi(p, cfg.roi_size);
  std::vector<Candidate> eligible;
  for (const auto& cm : ring::coverage_increasing_moves(p))
    if (roi & chess::bb(cm.move.to)) eligible.push_back(make_candidate(cm, cfg.weights));
  if (static_cast<int>(eligible.size()) < cfg.k) return std::nullopt;
  sort_by_score(eligible);
  eligible.resize(cfg.k);
  return eligible;
}

std::optional<std::vector<Candidate>> generate_followups(const Position& p,
                                                         const Move& primary,
                                                         const InstanceConfig& cfg) {
  if (cfg.f == 0) return std::vector<Candidate>{};
  const ring::RingPair rings = ring::king_rings(p, p.side_to_move());
  const Position after = chess::apply_move(p, primary);
  const Position again = pass_turn(after);

  // Ring squares the primary already controls, king-transparent.
  const auto primary_piece = after.piece_at(primary.to);
  const Bitboard ghost_occ = after.occupancy() & ~chess::bb(rings.king);
  const Bitboard covered =
      chess::attacks_from(primary_piece->kind, primary_piece->color, primary.to,
                          ghost_occ) &
      (rings.r1 | rings.r2);

  const auto marginal = [&](const Move& m) -> Candidate {
    const auto origin_piece = again.piece_at(m.from);
    const Bitboard origin_attacks =
        chess::attacks_from(origin_piece->kind, origin_piece->color, m.from,
                            again.occupancy() & ~chess::bb(rings.king)) &
        (rings.r1 | rings.r2);
    const Position q = chess::apply_move_unchecked(again, m);
    const auto piece = q.piece_at(m.to);
    const Bitboard occ = q.occupancy() & ~chess::bb(rings.king);
    const Bitboard attacks =
        chess::attacks_from(piece->kind, piece->color, m.to, occ) & ~covered;
    Candidate c;
    c.move = m;
    c.c1 = std::popcount(attacks & rings.r1);
    c.c2 = std::popcount(attacks & rings.r2);
    const int defenders = std::popcount(
        chess::attackers_to(q, m.to, chess::opposite(again.side_to_move())));
    const int supporters =
        std::popcount(chess::attackers_to(q, m.to, again.side_to_move()));
    c.risk = std::max(0, defenders - supporters);
    // Squares the plan newly threatens: beyond both the primary's cover
    // and what this piece already watched from its origin.
    c.gain = std::popcount(((attacks & (rings.r1 | rings.r2)) & ~origin_attacks));
    c.score = candidate_score(c.c1, c.c2, c.risk, cfg.weights);
    return c;
  };

  std::vector<Candidate> strict;
  std::vector<std::string> taken;
  for (const auto& cm : ring::coverage_increasing_moves(again)) {
    strict.push_back(marginal(cm.move));
    taken.push_back(cm.move.notation());
  }
  sort_by_score(strict);
  if (static_cast<int>(strict.size()) > cfg.f) strict.resize(cfg.f);

  if (static_cast<int>(strict.size()) < cfg.f) {
    // Pad with non-strict moves, same marginal ranking.
    std::vector<Candidate> pad;
    for (const Move& m : chess::legal_moves(again)) {
      if (std::find(taken.begin(), taken.end(), m.notation()) != taken.end()) continue;
      pad.push_back(marginal(m));
    }
    sort_by_score(pad);
    for (const auto& c : pad) {
      if (static_cast<int>(strict.size()) == cfg.f) break;
      strict.push_back(c);
    }
    sort_by_score(strict);
  }
  if (static_cast<int>(strict.size()) < cfg.f) return std::nullopt;
  return strict;
}

std::pair<QuboModel, VariableLayout> build_qubo(
    const std::vector<Candidate>& candidates,
    const std::vector<std::vector<Candidate>>& followups, const InstanceConfig& cfg) {
  const int k = static_cast<int>(candidates.size());
  const int f = cfg.f;
  if (k != cfg.k) throw std::invalid_argument("build_qubo: candidate count != K");
  if (static_cast<int>(followups.size()) != (f > 0 ? k : 0))
    throw std::invalid_argument("build_qubo: follow-up blocks mismatch");
  for (const auto& block : followups)
    if (static_cast<int>(block.size()) != f)
      throw std::invalid_argument("build_qubo: follow-up block size != F");

  VariableLayout layout;
  layout.encoding = Encoding::one_hot;
  layout.k = k;
  layout.f = f;
  layout.n_qubits = k * (1 + f);
  for (int m = 0; m < k; ++m) layout.primary.push_back(m);
  for (int m = 0; m < k && f > 0; ++m) {
    std::vector<int> block;
    for (int fi = 0; fi < f; ++fi) block.push_back(k + m * f + fi);
    layout.followup_blocks.push_back(block);
  }

  QuboModel q;
  q.n_vars = layout.n_qubits;
  q.linear.assign(q.n_vars, 0.0);

  const double loh = cfg.weights.lambda_onehot;
  const double lg = cfg.weights.lambda_gate;

  for (int m = 0; m < k; ++m) q.add_linear(m, -candidates[m].score);

  // One-hot penalty over the primaries: loh * (sum_m x_m - 1)^2.
  for (int m = 0; m < k; ++m) q.add_linear(m, -loh);
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) q.add_quadratic(a, b, 2.0 * loh);
  q.constant += loh;

  // Gating: lg * (sum_f y_{m,f} - x_m)^2 per primary, lifted variant only.
  for (int m = 0; m < k && f > 0; ++m) {
    const auto& block = layout.followup_blocks[m];
    for (int fi = 0; fi < f; ++fi) {
      q.add_linear(block[fi], -followups[m][fi].score);
      q.add_linear(block[fi], lg);
      q.add_quadratic(m, block[fi], -2.0 * lg);
      for (int fj = fi + 1; fj < f; ++fj)
        q.add_quadratic(block[fi], block[fj], 2.0 * lg);
    }
    q.add_linear(m, lg);
  }

  return {std::move(q), std::move(layout)};
}

std::pair<QuboModel, VariableLayout> encode_domain_wall(const QuboModel& model,
                                                        const VariableLayout& layout,
                                                        double lambda_onehot) {
  if (layout.encoding != Encoding::one_hot)
    throw std::invalid_argument("encode_domain_wall: layout already domain-wall");
  const int k = layout.k;
  if (k < 2) throw std::invalid_argument("encode_domain_wall: needs K >= 2");

  // Strip the primary one-hot penalty; every valid wall state selects
  // exactly one choice so the penalty carries no information.
  QuboModel stripped = model;
  stripped.constant -= lambda_onehot;
  for (int m = 0; m < k; ++m) stripped.linear[m] += lambda_onehot;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) stripped.add_quadratic(a, b, -2.0 * lambda_onehot);
  for (const auto& [key, c] : stripped.quadratic)
    if (key.first < k && key.second < k && std::abs(c) > 1e-9)
      throw std::runtime_error("encode_domain_wall: residual primary-primary term");

  VariableLayout wall;
  wall.encoding = Encoding::domain_wall;
  wall.k = k;
  wall.f = layout.f;
  wall.n_qubits = layout.n_qubits - 1;
  for (int i = 0; i < k - 1; ++i) wall.primary.push_back(i);
  for (const auto& block : layout.followup_blocks) {
    std::vector<int> shifted;
    for (int q : block) shifted.push_back(q - 1);
    wall.followup_blocks.push_back(shifted);
  }

  QuboModel out;
  out.n_vars = wall.n_qubits;
  out.linear.assign(out.n_vars, 0.0);
  out.constant = stripped.constant;

  // x_i = w_i - w_{i+1}, with w_0 = 1 and w_K = 0; wall var w_j sits at new
  // index j-1. Substituting into linear and x*y terms keeps everything
  // 2-local.
  struct Term {
    int var;      // new index, or -1 for the constant part of x_0
    double sign;  // +1 / -1
  };
  const auto expand_x = [&](int i) {
    std::vector<Term> terms;
    if (i == 0) terms.push_back({-1, 1.0});
    else terms.push_back({i - 1, 1.0});
    if (i + 1 <= k - 1) terms.push_back({i, -1.0});
    return terms;
  };

  for (int v = 0; v < model.n_vars; ++v) {
    const double c = stripped.linear[v];
    if (c == 0.0) continue;
    if (v >= k) {
      out.add_linear(v - 1, c);
      continue;
    }
    for (const auto& t : expand_x(v)) {
      if (t.var < 0) out.constant += t.sign * c;
      else out.add_linear(t.var, t.sign * c);
    }
  }
  for (const auto& [key, c] : stripped.quadratic) {
    const auto [a, b] = key;
    if (a >= k) {  // pure follow-up pair
      out.add_quadratic(a - 1, b - 1, c);
      continue;
    }
    if (b < k) continue;  // residual primary pair, verified ~0 above
    for (const auto& t : expand_x(a)) {
      if (t.var < 0) out.add_linear(b - 1, t.sign * c);
      else out.add_quadratic(t.var, b - 1, t.sign * c);
    }
  }

  return {std::move(out), std::move(wall)};
}

bool filter_position(const Position& p, const InstanceConfig& cfg) {
  if (chess::in_check(p, p.side_to_move())) return false;
  if (p.fullmove_number() < 10) return false;
  if (!p.king_square(chess::opposite(p.side_to_move()))) return false;
  const Bitboard roi = extract_roi(p, cfg.roi_size);
  int count = 0;
  for (const auto& cm : ring::coverage_increasing_moves(p))
    if (roi & chess::bb(cm.move.to)) ++count;
  return count >= std::max(cfg.k, 8);
}

std::optional<QkrdInstance> generate_instance(const Position& p,
                                              const InstanceConfig& cfg,
                                              const SourceInfo& source) {
  auto candidates = select_candidates(p, cfg);
  if (!candidates) return std::nullopt;

  std::vector<std::vector<Candidate>> followups;
  if (cfg.f > 0) {
    for (const auto& c : *candidates) {
      auto block = generate_followups(p, c.move, cfg);
      if (!block) return std::nullopt;
      followups.push_back(std::move(*block));
    }
  }

  QkrdInstance inst;
  inst.source = source;
  inst.source.fen = p.fen();
  if (cfg.f > 0) inst.source.followup_convention = "null_move";
  inst.config = cfg;
  inst.candidates = std::move(*candidates);
  inst.followups = std::move(followups);
  std::tie(inst.qubo, inst.layout) = build_qubo(inst.candidates, inst.followups, cfg);
  return inst;
}

}  // namespace qkrd::qubo
