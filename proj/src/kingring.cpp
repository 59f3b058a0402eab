#include "qkrd/kingring.hpp"

#include <bit>
#include <stdexcept>

namespace qkrd::ring {

using chess::Bitboard;
using chess::Color;
using chess::Move;
using chess::PieceKind;
using chess::Position;
using chess::Square;

namespace {

std::vector<Square> to_squares(Bitboard b) {
  std::vector<Square> out;
  while (b) {
    out.push_back(Square::from_index(std::countr_zero(b)));
    b &= b - 1;
  }
  return out;
}

}  // namespace

int RingPair::r1_size() const { return std::popcount(r1); }
int RingPair::r2_size() const { return std::popcount(r2); }
std::vector<Square> RingPair::r1_squares() const { return to_squares(r1); }
std::vector<Square> RingPair::r2_squares() const { return to_squares(r2); }

RingPair king_rings(const Position& p, Color attacker_color) {
  const auto king = p.king_square(chess::opposite(attacker_color));
  if (!king) throw std::invalid_argument("king_rings: defending king absent");
  RingPair rings{0, 0, *king};
  const int kf = king->file(), kr = king->rank();
  for (int f = kf - 2; f <= kf + 2; ++f) {
    for (int r = kr - 2; r <= kr + 2; ++r) {
      if (f < 0 || f > 7 || r < 0 || r > 7) continue;
      const int d = std::max(std::abs(f - kf), std::abs(r - kr));
      if (d == 1) rings.r1 |= chess::bb(Square(f, r));
      else if (d == 2) rings.r2 |= chess::bb(Square(f, r));
    }
  }
  return rings;
}

CoverageScore piece_ring_coverage(const Position& p, Square s, const RingPair& rings) {
  const auto piece = p.piece_at(s);
  if (!piece) throw std::invalid_argument("piece_ring_coverage: empty square");
  const Bitboard occ = p.occupancy() & ~chess::bb(rings.king);
  const Bitboard attacks = chess::attacks_from(piece->kind, piece->color, s, occ);
  return {std::popcount(attacks & rings.r1), std::popcount(attacks & rings.r2)};
}

CoverageScore move_coverage(const Position& p, const Move& m) {
  const RingPair rings = king_rings(p, p.side_to_move());
  const Position q = chess::apply_move(p, m);
  return piece_ring_coverage(q, m.to, rings);
}

RiskScore move_risk(const Position& p, const Move& m) {
  const Color us = p.side_to_move();
  const Position q = chess::apply_move(p, m);
  const int defenders = std::popcount(chess::attackers_to(q, m.to, chess::opposite(us)));
  // Supporters: own pieces other than the moved one guarding the square.
  const int supporters = std::popcount(chess::attackers_to(q, m.to, us));
  return {std::max(0, defenders - supporters)};
}

std::vector<CandidateMove> coverage_increasing_moves(const Position& p) {
  const RingPair rings = king_rings(p, p.side_to_move());
  std::vector<CandidateMove> out;
  for (const Move& m : chess::legal_moves(p)) {
    const CoverageScore before = piece_ring_coverage(p, m.from, rings);
    const Position q = chess::apply_move_unchecked(p, m);
    const CoverageScore after = piece_ring_coverage(q, m.to, rings);
    if (after.total() <= before.total()) continue;
    const int defenders =
        std::popcount(chess::attackers_to(q, m.to, chess::opposite(p.side_to_move())));
    const int supporters = std::popcount(chess::attackers_to(q, m.to, p.side_to_move()));
    out.push_back({m, after, before, {std::max(0, defenders - supporters)}});
  }
  return out;
}

}  // namespace qkrd::ring
