#pragma once

#include <array>
#include <optional>
#include <string>

#include "qkrd/chess/types.hpp"

namespace qkrd::chess {

// Castling right flags.
inline constexpr std::uint8_t castle_wk = 1;
inline constexpr std::uint8_t castle_wq = 2;
inline constexpr std::uint8_t castle_bk = 4;
inline constexpr std::uint8_t castle_bq = 8;

// Immutable-by-convention full chess state. Operations that change a
// position return a new value; nothing here is shared or mutated after
// construction, so positions are safe to use across threads.
class Position {
 public:
  Position() = default;

  static Position initial();
  // Parses a 6-field FEN record. Throws std::invalid_argument naming the
  // offending field on malformed input, illegal piece counts, or (for
  // positions where both kings are on the board) a side-not-to-move left
  // in check. Diagram positions missing the mover's king are accepted.
  static Position from_fen(const std::string& fen);
  std::string fen() const;

  std::optional<Piece> piece_at(Square s) const;
  Color side_to_move() const { return stm_; }
  std::uint8_t castling_rights() const { return castling_; }
  std::optional<Square> en_passant() const { return ep_; }
  int halfmove_clock() const { return halfmove_; }
  int fullmove_number() const { return fullmove_; }

  Bitboard pieces(Color c, PieceKind k) const {
    return bb_[static_cast<int>(c) * 6 + static_cast<int>(k)];
  }
  Bitboard occupancy(Color c) const { return occ_[static_cast<int>(c)]; }
  Bitboard occupancy() const { return occ_[0] | occ_[1]; }
  std::optional<Square> king_square(Color c) const;

  void set_piece(Square s, Piece p);
  void clear_square(Square s);
  void set_side_to_move(Color c) { stm_ = c; }
  void set_castling_rights(std::uint8_t r) { castling_ = r; }
  void set_en_passant(std::optional<Square> s) { ep_ = s; }
  void set_halfmove_clock(int n) { halfmove_ = n; }
  void set_fullmove_number(int n) { fullmove_ = n; }

  bool operator==(const Position& o) const {
    return bb_ == o.bb_ && stm_ == o.stm_ && castling_ == o.castling_ &&
           ep_ == o.ep_ && halfmove_ == o.halfmove_ && fullmove_ == o.fullmove_;
  }

 private:
  std::array<Bitboard, 12> bb_{};
  std::array<Bitboard, 2> occ_{};
  Color stm_ = Color::white;
  std::uint8_t castling_ = 0;
  std::optional<Square> ep_;
  int halfmove_ = 0;
  int fullmove_ = 1;
};

inline const char* const start_fen =
    "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

}  // namespace qkrd::chess
