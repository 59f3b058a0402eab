#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qkrd::chess {

enum class Color : std::uint8_t { white = 0, black = 1 };

constexpr Color opposite(Color c) {
  return c == Color::white ? Color::black : Color::white;
}

enum class PieceKind : std::uint8_t { pawn, knight, bishop, rook, queen, king };

struct Piece {
  PieceKind kind;
  Color color;
  bool operator==(const Piece&) const = default;
};

char piece_to_char(Piece p);
std::optional<Piece> piece_from_char(char c);

// Board square; a1 = (file 0, rank 0), h8 = (file 7, rank 7).
class Square {
 public:
  constexpr Square() : idx_(0) {}  // a1
  constexpr Square(int file, int rank) : idx_(static_cast<std::uint8_t>(rank * 8 + file)) {
    if (file < 0 || file > 7 || rank < 0 || rank > 7)
      throw std::out_of_range("square coordinates out of range");
  }

  static constexpr Square from_index(int idx) { return Square(idx % 8, idx / 8); }
  static std::optional<Square> parse(std::string_view name);

  constexpr int file() const { return idx_ % 8; }
  constexpr int rank() const { return idx_ / 8; }
  constexpr int index() const { return idx_; }

  std::string name() const {
    return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
  }

  auto operator<=>(const Square&) const = default;

 private:
  std::uint8_t idx_;
};

using Bitboard = std::uint64_t;

constexpr Bitboard bb(Square s) { return Bitboard{1} << s.index(); }

struct Move {
  Square from;
  Square to;
  std::optional<PieceKind> promotion;

  // Coordinate notation: "e2e4", "e7e8q". This string is the total order
  // used everywhere ties are broken.
  std::string notation() const;
  static std::optional<Move> parse(std::string_view text);

  bool operator==(const Move&) const = default;
};

bool move_notation_less(const Move& a, const Move& b);

}  // namespace qkrd::chess
