#pragma once

#include <cstdint>
#include <vector>

#include "qkrd/chess/position.hpp"

namespace qkrd::chess {

// Attack set of a piece of the given kind/color standing on `from`, under
// the given occupancy. Sliding pieces stop at the first occupied square,
// which is included; pawns attack diagonally only.
Bitboard attacks_from(PieceKind kind, Color color, Square from, Bitboard occupancy);

// Bitboard of `attacker`-colored pieces that attack `target` in `p`.
Bitboard attackers_to(const Position& p, Square target, Color attacker);

bool square_attacked(const Position& p, Square s, Color attacker);

// True when `c`'s king exists and stands attacked.
bool in_check(const Position& p, Color c);

// Attack set of the piece occupying `s` (throws if the square is empty),
// as sorted squares. attack_bitboard is the raw form.
std::vector<Square> attack_squares(const Position& p, Square s);
Bitboard attack_bitboard(const Position& p, Square s);

// Standard-chess legal moves (checks, pins, castling, en passant,
// promotions), sorted by coordinate notation. A position whose moving side
// has no king (analysis diagram) yields its pseudo-legal moves minus
// king captures.
std::vector<Move> legal_moves(const Position& p);

// Applies a legal move and returns the successor position. Throws
// std::invalid_argument if `m` is not legal in `p`.
Position apply_move(const Position& p, const Move& m);

// Trusted fast path used by perft and SAN resolution; `m` must come from
// legal_moves(p).
Position apply_move_unchecked(const Position& p, const Move& m);

std::uint64_t perft(const Position& p, int depth);

}  // namespace qkrd::chess
