#include "qkrd/chess/movegen.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>

namespace qkrd::chess {

namespace {

constexpr Bitboard file_a = 0x0101010101010101ull;
constexpr Bitboard file_h = file_a << 7;
constexpr Bitboard rank_1 = 0xffull;

constexpr Bitboard shift_n(Bitboard b) { return b << 8; }
constexpr Bitboard shift_s(Bitboard b) { return b >> 8; }
constexpr Bitboard shift_e(Bitboard b) { return (b & ~file_h) << 1; }
constexpr Bitboard shift_w(Bitboard b) { return (b & ~file_a) >> 1; }

constexpr std::array<Bitboard, 64> make_knight_table() {
  std::array<Bitboard, 64> t{};
  for (int sq = 0; sq < 64; ++sq) {
    const int f = sq % 8, r = sq / 8;
    constexpr int df[] = {1, 2, 2, 1, -1, -2, -2, -1};
    constexpr int dr[] = {2, 1, -1, -2, -2, -1, 1, 2};
    for (int i = 0; i < 8; ++i) {
      const int nf = f + df[i], nr = r + dr[i];
      if (nf >= 0 && nf < 8 && nr >= 0 && nr < 8)
        t[sq] |= Bitboard{1} << (nr * 8 + nf);
    }
  }
  return t;
}

constexpr std::array<Bitboard, 64> make_king_table() {
  std::array<Bitboard, 64> t{};
  for (int sq = 0; sq < 64; ++sq) {
    const int f = sq % 8, r = sq / 8;
    for (int df = -1; df <= 1; ++df)
      for (int dr = -1; dr <= 1; ++dr) {
        if (!df && !dr) continue;
        const int nf = f + df, nr = r + dr;
        if (nf >= 0 && nf < 8 && nr >= 0 && nr < 8)
          t[sq] |= Bitboard{1} << (nr * 8 + nf);
      }
  }
  return t;
}

constexpr auto knight_table = make_knight_table();
constexpr auto king_table = make_king_table();

Bitboard ray_attacks(int sq, Bitboard occupancy, const int (&dirs)[4][2]) {
  Bitboard out = 0;
  const int f0 = sq % 8, r0 = sq / 8;
  for (const auto& d : dirs) {
    int f = f0 + d[0], r = r0 + d[1];
    while (f >= 0 && f < 8 && r >= 0 && r < 8) {
      const Bitboard mask = Bitboard{1} << (r * 8 + f);
      out |= mask;
      if (occupancy & mask) break;
      f += d[0];
      r += d[1];
    }
  }
  return out;
}

Bitboard bishop_attacks(int sq, Bitboard occ) {
  static constexpr int dirs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  return ray_attacks(sq, occ, dirs);
}

Bitboard rook_attacks(int sq, Bitboard occ) {
  static constexpr int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  return ray_attacks(sq, occ, dirs);
}

Bitboard pawn_attacks(int sq, Color c) {
  const Bitboard b = Bitboard{1} << sq;
  return c == Color::white ? (shift_e(shift_n(b)) | shift_w(shift_n(b)))
                           : (shift_e(shift_s(b)) | shift_w(shift_s(b)));
}

int pop_lsb(Bitboard& b) {
  const int sq = std::countr_zero(b);
  b &= b - 1;
  return sq;
}

}  // namespace

Bitboard attacks_from(PieceKind kind, Color color, Square from, Bitboard occupancy) {
  const int sq = from.index();
  switch (kind) {
    case PieceKind::pawn: return pawn_attacks(sq, color);
    case PieceKind::knight: return knight_table[sq];
    case PieceKind::bishop: return bishop_attacks(sq, occupancy);
    case PieceKind::rook: return rook_attacks(sq, occupancy);
    case PieceKind::queen: return bishop_attacks(sq, occupancy) | rook_attacks(sq, occupancy);
    case PieceKind::king: return king_table[sq];
  }
  return 0;
}

Bitboard attackers_to(const Position& p, Square target, Color attacker) {
  const Bitboard occ = p.occupancy();
  const int sq = target.index();
  Bitboard out = 0;
  // A piece attacks `target` iff `target`-centric reverse attacks reach it.
  out |= pawn_attacks(sq, opposite(attacker)) & p.pieces(attacker, PieceKind::pawn);
  out |= knight_table[sq] & p.pieces(attacker, PieceKind::knight);
  out |= king_table[sq] & p.pieces(attacker, PieceKind::king);
  const Bitboard diag = bishop_attacks(sq, occ);
  const Bitboard orth = rook_attacks(sq, occ);
  out |= diag & (p.pieces(attacker, PieceKind::bishop) | p.pieces(attacker, PieceKind::queen));
  out |= orth & (p.pieces(attacker, PieceKind::rook) | p.pieces(attacker, PieceKind::queen));
  return out;
}

bool square_attacked(const Position& p, Square s, Color attacker) {
  return attackers_to(p, s, attacker) != 0;
}

bool in_check(const Position& p, Color c) {
  const auto king = p.king_square(c);
  return king && square_attacked(p, *king, opposite(c));
}

Bitboard attack_bitboard(const Position& p, Square s) {
  const auto piece = p.piece_at(s);
  if (!piece) throw std::invalid_argument("attack_squares: empty square " + s.name());
  return attacks_from(piece->kind, piece->color, s, p.occupancy());
}

std::vector<Square> attack_squares(const Position& p, Square s) {
  Bitboard b = attack_bitboard(p, s);
  std::vector<Square> out;
  while (b) out.push_back(Square::from_index(pop_lsb(b)));
  return out;
}

namespace {

void push_promotions(std::vector<Move>& out, Square from, Square to) {
  for (PieceKind k : {PieceKind::knight, PieceKind::bishop, PieceKind::rook, PieceKind::queen})
    out.push_back(Move{from, to, k});
}

std::vector<Move> pseudo_legal_moves(const Position& p) {
  std::vector<Move> out;
  const Color us = p.side_to_move();
  const Color them = opposite(us);
  const Bitboard occ = p.occupancy();
  const Bitboard own = p.occupancy(us);
  const Bitboard enemy_king = p.pieces(them, PieceKind::king);
  // Capturing a king is never a move; masking it here keeps analysis
  // diagrams (opponent left in check) from generating one.
  const Bitboard target_ok = ~own & ~enemy_king;

  for (int kind = 0; kind < 6; ++kind) {
    const auto pk = static_cast<PieceKind>(kind);
    Bitboard pieces = p.pieces(us, pk);
    while (pieces) {
      const Square from = Square::from_index(pop_lsb(pieces));
      if (pk == PieceKind::pawn) {
        const int dir = us == Color::white ? 8 : -8;
        const int start_rank = us == Color::white ? 1 : 6;
        const int promo_rank = us == Color::white ? 7 : 0;
        const int one = from.index() + dir;
        if (!(occ & (Bitboard{1} << one))) {
          const Square to = Square::from_index(one);
          if (to.rank() == promo_rank) push_promotions(out, from, to);
          else out.push_back(Move{from, to, std::nullopt});
          if (from.rank() == start_rank) {
            const int two = one + dir;
            if (!(occ & (Bitboard{1} << two)))
              out.push_back(Move{from, Square::from_index(two), std::nullopt});
          }
        }
        Bitboard caps = pawn_attacks(from.index(), us) & p.occupancy(them) & ~enemy_king;
        while (caps) {
          const Square to = Square::from_index(pop_lsb(caps));
          if (to.rank() == promo_rank) push_promotions(out, from, to);
          else out.push_back(Move{from, to, std::nullopt});
        }
        if (p.en_passant() &&
            (pawn_attacks(from.index(), us) & bb(*p.en_passant())))
          out.push_back(Move{from, *p.en_passant(), std::nullopt});
      } else {
        Bitboard targets = attacks_from(pk, us, from, occ) & target_ok;
        while (targets)
          out.push_back(Move{from, Square::from_index(pop_lsb(targets)), std::nullopt});
      }
    }
  }

  // Castling. Rights are only present when king and rook stand on their
  // home squares (enforced at FEN parse and maintained by apply).
  const int home_rank = us == Color::white ? 0 : 7;
  const std::uint8_t king_side = us == Color::white ? castle_wk : castle_bk;
  const std::uint8_t queen_side = us == Color::white ? castle_wq : castle_bq;
  const Square king_from(4, home_rank);
  if ((p.castling_rights() & king_side) &&
      !(occ & (bb(Square(5, home_rank)) | bb(Square(6, home_rank)))) &&
      !square_attacked(p, king_from, them) &&
      !square_attacked(p, Square(5, home_rank), them) &&
      !square_attacked(p, Square(6, home_rank), them))
    out.push_back(Move{king_from, Square(6, home_rank), std::nullopt});
  if ((p.castling_rights() & queen_side) &&
      !(occ & (bb(Square(1, home_rank)) | bb(Square(2, home_rank)) | bb(Square(3, home_rank)))) &&
      !square_attacked(p, king_from, them) &&
      !square_attacked(p, Square(3, home_rank), them) &&
      !square_attacked(p, Square(2, home_rank), them))
    out.push_back(Move{king_from, Square(2, home_rank), std::nullopt});

  return out;
}

}  // namespace

Position apply_move_unchecked(const Position& p, const Move& m) {
  Position q = p;
  const auto piece = p.piece_at(m.from);
  if (!piece) throw std::invalid_argument("apply_move: no piece on " + m.from.name());
  const Color us = piece->color;

  q.set_en_passant(std::nullopt);
  const auto captured = p.piece_at(m.to);
  bool is_capture = captured.has_value();

  if (piece->kind == PieceKind::pawn && p.en_passant() && m.to == *p.en_passant() &&
      !captured) {
    // En passant: the captured pawn sits behind the target square.
    const int back = us == Color::white ? -8 : 8;
    q.clear_square(Square::from_index(m.to.index() + back));
    is_capture = true;
  }

  q.clear_square(m.from);
  q.set_piece(m.to, m.promotion ? Piece{*m.promotion, us} : *piece);

  if (piece->kind == PieceKind::king && std::abs(m.to.file() - m.from.file()) == 2) {
    const int rank = m.from.rank();
    if (m.to.file() == 6) {
      q.clear_square(Square(7, rank));
      q.set_piece(Square(5, rank), Piece{PieceKind::rook, us});
    } else {
      q.clear_square(Square(0, rank));
      q.set_piece(Square(3, rank), Piece{PieceKind::rook, us});
    }
  }

  if (piece->kind == PieceKind::pawn &&
      std::abs(m.to.rank() - m.from.rank()) == 2) {
    q.set_en_passant(Square(m.from.file(), (m.from.rank() + m.to.rank()) / 2));
  }

  std::uint8_t rights = p.castling_rights();
  const auto drop_if = [&](Square s, std::uint8_t flag) {
    if (m.from == s || m.to == s) rights &= static_cast<std::uint8_t>(~flag);
  };
  if (piece->kind == PieceKind::king) {
    rights &= static_cast<std::uint8_t>(
        us == Color::white ? ~(castle_wk | castle_wq) : ~(castle_bk | castle_bq));
  }
  drop_if(Square(7, 0), castle_wk);
  drop_if(Square(0, 0), castle_wq);
  drop_if(Square(7, 7), castle_bk);
  drop_if(Square(0, 7), castle_bq);
  q.set_castling_rights(rights);

  q.set_halfmove_clock(piece->kind == PieceKind::pawn || is_capture
                           ? 0
                           : p.halfmove_clock() + 1);
  if (us == Color::black) q.set_fullmove_number(p.fullmove_number() + 1);
  q.set_side_to_move(opposite(us));
  return q;
}

std::vector<Move> legal_moves(const Position& p) {
  const Color us = p.side_to_move();
  std::vector<Move> out;
  for (const Move& m : pseudo_legal_moves(p)) {
    const Position q = apply_move_unchecked(p, m);
    if (!in_check(q, us)) out.push_back(m);
  }
  std::sort(out.begin(), out.end(), move_notation_less);
  return out;
}

Position apply_move(const Position& p, const Move& m) {
  const auto legal = legal_moves(p);
  if (std::find(legal.begin(), legal.end(), m) == legal.end())
    throw std::invalid_argument("apply_move: illegal move " + m.notation());
  return apply_move_unchecked(p, m);
}

std::uint64_t perft(const Position& p, int depth) {
  if (depth <= 0) return 1;
  const auto moves = legal_moves(p);
  if (depth == 1) return moves.size();
  std::uint64_t nodes = 0;
  for (const Move& m : moves) nodes += perft(apply_move_unchecked(p, m), depth - 1);
  return nodes;
}

}  // namespace qkrd::chess
