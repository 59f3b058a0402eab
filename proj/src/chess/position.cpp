#include "qkrd/chess/position.hpp"

#include <bit>
#include <cctype>
#include <sstream>
#include <vector>

#include "qkrd/chess/movegen.hpp"

namespace qkrd::chess {

char piece_to_char(Piece p) {
  static const char table[6] = {'p', 'n', 'b', 'r', 'q', 'k'};
  const char c = table[static_cast<int>(p.kind)];
  return p.color == Color::white ? static_cast<char>(std::toupper(c)) : c;
}

std::optional<Piece> piece_from_char(char c) {
  const Color color = std::isupper(static_cast<unsigned char>(c))
                          ? Color::white
                          : Color::black;
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'p': return Piece{PieceKind::pawn, color};
    case 'n': return Piece{PieceKind::knight, color};
    case 'b': return Piece{PieceKind::bishop, color};
    case 'r': return Piece{PieceKind::rook, color};
    case 'q': return Piece{PieceKind::queen, color};
    case 'k': return Piece{PieceKind::king, color};
    default: return std::nullopt;
  }
}

std::optional<Square> Square::parse(std::string_view name) {
  if (name.size() != 2) return std::nullopt;
  const int file = name[0] - 'a';
  const int rank = name[1] - '1';
  if (file < 0 || file > 7 || rank < 0 || rank > 7) return std::nullopt;
  return Square(file, rank);
}

std::string Move::notation() const {
  std::string s = from.name() + to.name();
  if (promotion) {
    static const char promo[6] = {'p', 'n', 'b', 'r', 'q', 'k'};
    s.push_back(promo[static_cast<int>(*promotion)]);
  }
  return s;
}

std::optional<Move> Move::parse(std::string_view text) {
  if (text.size() != 4 && text.size() != 5) return std::nullopt;
  const auto from = Square::parse(text.substr(0, 2));
  const auto to = Square::parse(text.substr(2, 2));
  if (!from || !to) return std::nullopt;
  std::optional<PieceKind> promo;
  if (text.size() == 5) {
    switch (text[4]) {
      case 'n': promo = PieceKind::knight; break;
      case 'b': promo = PieceKind::bishop; break;
      case 'r': promo = PieceKind::rook; break;
      case 'q': promo = PieceKind::queen; break;
      default: return std::nullopt;
    }
  }
  return Move{*from, *to, promo};
}

bool move_notation_less(const Move& a, const Move& b) {
  return a.notation() < b.notation();
}

std::optional<Piece> Position::piece_at(Square s) const {
  const Bitboard mask = bb(s);
  if (!((occ_[0] | occ_[1]) & mask)) return std::nullopt;
  for (int c = 0; c < 2; ++c) {
    if (!(occ_[c] & mask)) continue;
    for (int k = 0; k < 6; ++k) {
      if (bb_[c * 6 + k] & mask)
        return Piece{static_cast<PieceKind>(k), static_cast<Color>(c)};
    }
  }
  return std::nullopt;
}

std::optional<Square> Position::king_square(Color c) const {
  const Bitboard kings = pieces(c, PieceKind::king);
  if (!kings) return std::nullopt;
  return Square::from_index(std::countr_zero(kings));
}

void Position::set_piece(Square s, Piece p) {
  clear_square(s);
  const Bitboard mask = bb(s);
  bb_[static_cast<int>(p.color) * 6 + static_cast<int>(p.kind)] |= mask;
  occ_[static_cast<int>(p.color)] |= mask;
}

void Position::clear_square(Square s) {
  const Bitboard mask = ~bb(s);
  for (auto& board : bb_) board &= mask;
  occ_[0] &= mask;
  occ_[1] &= mask;
}

Position Position::initial() { return from_fen(start_fen); }

namespace {

[[noreturn]] void fen_error(const std::string& field, const std::string& why) {
  throw std::invalid_argument("FEN " + field + " field: " + why);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

Position Position::from_fen(const std::string& fen) {
  const auto fields = split_ws(fen);
  if (fields.size() != 6)
    throw std::invalid_argument("FEN record: expected 6 fields, got " +
                                std::to_string(fields.size()));

  Position p;

  // Field 1: piece placement, ranks 8 down to 1.
  {
    std::vector<std::string> ranks;
    std::string cur;
    for (char c : fields[0]) {
      if (c == '/') {
        ranks.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    ranks.push_back(cur);
    if (ranks.size() != 8)
      fen_error("placement", "expected 8 ranks, got " + std::to_string(ranks.size()));
    int kings[2] = {0, 0};
    for (int r = 0; r < 8; ++r) {
      const int rank = 7 - r;
      int file = 0;
      for (char c : ranks[r]) {
        if (c >= '1' && c <= '8') {
          file += c - '0';
        } else {
          const auto piece = piece_from_char(c);
          if (!piece) fen_error("placement", std::string("bad piece char '") + c + "'");
          if (file > 7) fen_error("placement", "rank overflows 8 files");
          if (piece->kind == PieceKind::pawn && (rank == 0 || rank == 7))
            fen_error("placement", "pawn on back rank");
          if (piece->kind == PieceKind::king) {
            if (++kings[static_cast<int>(piece->color)] > 1)
              fen_error("placement", "more than one king of a color");
          }
          p.set_piece(Square(file, rank), *piece);
          ++file;
        }
      }
      if (file != 8) fen_error("placement", "rank does not cover 8 files");
    }
  }

  // Field 2: side to move.
  if (fields[1] == "w") p.stm_ = Color::white;
  else if (fields[1] == "b") p.stm_ = Color::black;
  else fen_error("side-to-move", "expected 'w' or 'b'");

  // Field 3: castling rights.
  if (fields[2] != "-") {
    std::uint8_t rights = 0;
    for (char c : fields[2]) {
      std::uint8_t flag = 0;
      switch (c) {
        case 'K': flag = castle_wk; break;
        case 'Q': flag = castle_wq; break;
        case 'k': flag = castle_bk; break;
        case 'q': flag = castle_bq; break;
        default: fen_error("castling", std::string("bad flag '") + c + "'");
      }
      if (rights & flag) fen_error("castling", "duplicate flag");
      rights |= flag;
    }
    const auto at = [&](int file, int rank, PieceKind k, Color c) {
      const auto piece = p.piece_at(Square(file, rank));
      return piece && piece->kind == k && piece->color == c;
    };
    if ((rights & castle_wk) && !(at(4, 0, PieceKind::king, Color::white) &&
                                  at(7, 0, PieceKind::rook, Color::white)))
      fen_error("castling", "K right without king e1 / rook h1");
    if ((rights & castle_wq) && !(at(4, 0, PieceKind::king, Color::white) &&
                                  at(0, 0, PieceKind::rook, Color::white)))
      fen_error("castling", "Q right without king e1 / rook a1");
    if ((rights & castle_bk) && !(at(4, 7, PieceKind::king, Color::black) &&
                                  at(7, 7, PieceKind::rook, Color::black)))
      fen_error("castling", "k right without king e8 / rook h8");
    if ((rights & castle_bq) && !(at(4, 7, PieceKind::king, Color::black) &&
                                  at(0, 7, PieceKind::rook, Color::black)))
      fen_error("castling", "q right without king e8 / rook a8");
    p.castling_ = rights;
  }

  // Field 4: en passant target.
  if (fields[3] != "-") {
    const auto sq = Square::parse(fields[3]);
    if (!sq) fen_error("en-passant", "bad square");
    const int wanted_rank = p.stm_ == Color::white ? 5 : 2;
    if (sq->rank() != wanted_rank)
      fen_error("en-passant", "square not on the capturable rank for the side to move");
    p.ep_ = sq;
  }

  // Fields 5, 6: clocks.
  try {
    p.halfmove_ = std::stoi(fields[4]);
  } catch (...) {
    fen_error("halfmove-clock", "not an integer");
  }
  if (p.halfmove_ < 0) fen_error("halfmove-clock", "negative");
  try {
    p.fullmove_ = std::stoi(fields[5]);
  } catch (...) {
    fen_error("fullmove-number", "not an integer");
  }
  if (p.fullmove_ < 1) fen_error("fullmove-number", "must be >= 1");

  // A real game position never has the side not to move in check. Diagram
  // positions lacking the mover's king skip this (they are not reachable
  // game states to begin with).
  if (p.king_square(p.stm_) && in_check(p, opposite(p.stm_)))
    fen_error("placement", "side not to move is in check");

  return p;
}

std::string Position::fen() const {
  std::string out;
  for (int rank = 7; rank >= 0; --rank) {
    int empty = 0;
    for (int file = 0; file < 8; ++file) {
      const auto piece = piece_at(Square(file, rank));
      if (!piece) {
        ++empty;
        continue;
      }
      if (empty) {
        out += std::to_string(empty);
        empty = 0;
      }
      out.push_back(piece_to_char(*piece));
    }
    if (empty) out += std::to_string(empty);
    if (rank) out.push_back('/');
  }
  out.push_back(' ');
  out.push_back(stm_ == Color::white ? 'w' : 'b');
  out.push_back(' ');
  if (!castling_) {
    out.push_back('-');
  } else {
    if (castling_ & castle_wk) out.push_back('K');
    if (castling_ & castle_wq) out.push_back('Q');
    if (castling_ & castle_bk) out.push_back('k');
    if (castling_ & castle_bq) out.push_back('q');
  }
  out.push_back(' ');
  out += ep_ ? ep_->name() : "-";
  out += ' ' + std::to_string(halfmove_) + ' ' + std::to_string(fullmove_);
  return out;
}

}  // namespace qkrd::chess
