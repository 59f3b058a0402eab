#pragma once

#include <vector>

#include "qkrd/chess/movegen.hpp"

namespace qkrd::ring {

// Concentric rings around the defending king: r1 at Chebyshev distance 1,
// r2 at exactly 2, both clipped to the board. The king square belongs to
// neither ring.
struct RingPair {
  chess::Bitboard r1 = 0;
  chess::Bitboard r2 = 0;
  chess::Square king;

  int r1_size() const;
  int r2_size() const;
  std::vector<chess::Square> r1_squares() const;
  std::vector<chess::Square> r2_squares() const;
};

struct CoverageScore {
  int c1 = 0;  // attacked r1 squares
  int c2 = 0;  // attacked r2 squares
  int total() const { return c1 + c2; }
  bool operator==(const CoverageScore&) const = default;
};

// max(0, defenders-of-target minus own supporters); zero whenever the
// destination is unattacked by the opponent.
struct RiskScore {
  int value = 0;
  bool operator==(const RiskScore&) const = default;
};

struct CandidateMove {
  chess::Move move;
  CoverageScore coverage;       // from the destination, post-move
  CoverageScore origin_coverage;  // same piece from its origin, pre-move
  RiskScore risk;

  int gain() const { return coverage.total() - origin_coverage.total(); }
};

// Rings centered on the king opposing `attacker_color`. Throws when that
// king is absent.
RingPair king_rings(const chess::Position& p, chess::Color attacker_color);

// Ring squares attacked by the piece on `s`, with the ring owner's king
// treated as transparent to sliding rays: a queen checking the king also
// controls the squares behind it, and those count as covered.
CoverageScore piece_ring_coverage(const chess::Position& p, chess::Square s,
                                  const RingPair& rings);

// Coverage of the moved piece from its destination, post-move occupancy,
// rings fixed at the pre-move defender king square.
CoverageScore move_coverage(const chess::Position& p, const chess::Move& m);

RiskScore move_risk(const chess::Position& p, const chess::Move& m);

// Legal moves whose moving piece covers strictly more ring squares from its
// destination than it did from its origin; order inherited from
// legal_moves.
std::vector<CandidateMove> coverage_increasing_moves(const chess::Position& p);

}  // namespace qkrd::ring
