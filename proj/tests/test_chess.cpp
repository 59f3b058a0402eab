#include <doctest.h>

#include <algorithm>
#include <bit>
#include <set>

#include "qkrd/chess/movegen.hpp"
#include "qkrd/chess/pgn.hpp"
#include "qkrd/rng.hpp"

using namespace qkrd;
using namespace qkrd::chess;

namespace {

bool has_move(const std::vector<Move>& moves, const std::string& notation) {
  return std::any_of(moves.begin(), moves.end(),
                     [&](const Move& m) { return m.notation() == notation; });
}

Move mv(const std::string& s) { return *Move::parse(s); }

// The queen-and-pawn analysis diagram used throughout: white Qd1, Pf3,
// black Kd4, white to move.
const char* const diagram_fen = "8/8/8/8/3k4/5P2/8/3Q4 w - - 0 1";

}  // namespace

TEST_SUITE_BEGIN("chess");

TEST_CASE("philox known-answer vectors") {
  CHECK(rng::Philox::raw({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(rng::Philox::raw({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu}) ==
        std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(rng::Philox::raw({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                         {0xa4093822u, 0x299f31d0u}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  // Same seed+stream reproduces the sequence.
  rng::Philox a(42, 7), b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("fen parses the start position") {
  const Position p = Position::initial();
  CHECK(p.side_to_move() == Color::white);
  CHECK(std::popcount(p.occupancy()) == 32);
  CHECK(p.fen() == start_fen);
}

TEST_CASE("fen parses the analysis diagram") {
  const Position p = Position::from_fen(diagram_fen);
  CHECK(p.piece_at(Square(3, 0)) == Piece{PieceKind::queen, Color::white});
  CHECK(p.piece_at(Square(5, 2)) == Piece{PieceKind::pawn, Color::white});
  CHECK(p.piece_at(Square(3, 3)) == Piece{PieceKind::king, Color::black});
  CHECK(!p.king_square(Color::white).has_value());
}

TEST_CASE("fen round-trips") {
  const char* cases[] = {
      start_fen,
      diagram_fen,
      "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
      "rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8",
      "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1",
      "4k3/8/8/8/8/8/4P3/4K3 b - - 5 40",
  };
  for (const char* fen : cases) {
    const Position p = Position::from_fen(fen);
    CHECK(p.fen() == fen);
    CHECK(Position::from_fen(p.fen()) == p);
  }
}

TEST_CASE("fen errors name the field") {
  CHECK_THROWS_WITH_AS(Position::from_fen("8/8/8 w - - 0 1"),
                       doctest::Contains("placement"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(Position::from_fen("9/8/8/8/8/8/8/8 w - - 0 1"),
                       doctest::Contains("placement"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      Position::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR x KQkq - 0 1"),
      doctest::Contains("side-to-move"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      Position::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KX - 0 1"),
      doctest::Contains("castling"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      Position::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq e4 0 1"),
      doctest::Contains("en-passant"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      Position::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - x 1"),
      doctest::Contains("halfmove"), std::invalid_argument);
  // Two kings of one color.
  CHECK_THROWS_WITH_AS(Position::from_fen("kk6/8/8/8/8/8/8/4K3 w - - 0 1"),
                       doctest::Contains("king"), std::invalid_argument);
  // Full game position with the side not to move in check.
  CHECK_THROWS_WITH_AS(Position::from_fen("4k3/4Q3/8/8/8/8/8/4K3 w - - 0 1"),
                       doctest::Contains("check"), std::invalid_argument);
}

TEST_CASE("legal move count and order at the start position") {
  const auto moves = legal_moves(Position::initial());
  CHECK(moves.size() == 20);
  CHECK(std::is_sorted(moves.begin(), moves.end(), move_notation_less));
  // Determinism: regenerate and compare.
  CHECK(moves == legal_moves(Position::initial()));
}

TEST_CASE("diagram position: Qd2 and f4 legal, king capture excluded") {
  const Position p = Position::from_fen(diagram_fen);
  const auto moves = legal_moves(p);
  CHECK(has_move(moves, "d1d2"));
  CHECK(has_move(moves, "f3f4"));
  CHECK(!has_move(moves, "d1d4"));  // capturing the king is never legal
}

TEST_CASE("apply_move basics") {
  const Position start = Position::initial();
  const Position after = apply_move(start, mv("e2e4"));
  CHECK(after.side_to_move() == Color::black);
  CHECK(after.en_passant() == Square(4, 2));
  CHECK(after.halfmove_clock() == 0);
  CHECK(after.fullmove_number() == 1);

  const Position diagram = Position::from_fen(diagram_fen);
  const Position q = apply_move(diagram, mv("d1d2"));
  CHECK(q.piece_at(Square(3, 1)) == Piece{PieceKind::queen, Color::white});
  CHECK(q.side_to_move() == Color::black);

  CHECK_THROWS_AS(apply_move(start, mv("e2e5")), std::invalid_argument);
}

TEST_CASE("apply_move handles castling and en passant") {
  const Position p = Position::from_fen("4k3/8/8/8/8/8/8/4K2R w K - 0 1");
  const Position q = apply_move(p, mv("e1g1"));
  CHECK(q.piece_at(Square(6, 0)) == Piece{PieceKind::king, Color::white});
  CHECK(q.piece_at(Square(5, 0)) == Piece{PieceKind::rook, Color::white});
  CHECK(q.castling_rights() == 0);

  const Position ep =
      Position::from_fen("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 3");
  const Position r = apply_move(ep, mv("e5d6"));
  CHECK(!r.piece_at(Square(3, 4)).has_value());  // captured pawn removed
  CHECK(r.piece_at(Square(3, 5)) == Piece{PieceKind::pawn, Color::white});
}

TEST_CASE("every legal move resolves an existing check") {
  const Position p = Position::from_fen("4k3/8/8/8/8/8/3q4/4K3 w - - 0 1");
  REQUIRE(in_check(p, Color::white));
  for (const Move& m : legal_moves(p)) {
    const Position q = apply_move_unchecked(p, m);
    CHECK(!in_check(q, Color::white));
  }
}

TEST_CASE("perft matches published node counts") {
  struct Case {
    const char* fen;
    int depth;
    std::uint64_t nodes;
  };
  const Case cases[] = {
      {start_fen, 1, 20},
      {start_fen, 2, 400},
      {start_fen, 3, 8902},
      {start_fen, 4, 197281},
      {"r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1", 3, 97862},
      {"8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", 4, 43238},
      {"rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8", 3, 62379},
  };
  for (const auto& c : cases) {
    CAPTURE(c.fen);
    CAPTURE(c.depth);
    CHECK(perft(Position::from_fen(c.fen), c.depth) == c.nodes);
  }
}

TEST_CASE("attack_squares: rook on empty board, pawn diagonals, blockers included") {
  Position p;
  p.set_piece(Square(0, 0), Piece{PieceKind::rook, Color::white});
  CHECK(attack_squares(p, Square(0, 0)).size() == 14);

  Position q = Position::from_fen(diagram_fen);
  const auto pawn = attack_bitboard(q, Square(5, 2));
  CHECK(pawn == (bb(Square(4, 3)) | bb(Square(6, 3))));

  CHECK_THROWS_AS(attack_squares(q, Square(0, 0)), std::invalid_argument);

  // First blocker is included in the attack set.
  const auto queen = attack_bitboard(q, Square(3, 0));
  CHECK((queen & bb(Square(3, 3))) != 0);   // enemy king square reached
  CHECK((queen & bb(Square(3, 4))) == 0);   // but not beyond
  CHECK((queen & bb(Square(5, 2))) != 0);   // own pawn included
  CHECK((queen & bb(Square(6, 3))) == 0);   // not beyond own pawn
}

TEST_CASE("attack sets grow when blockers are removed") {
  rng::Philox gen(2024, 0);
  for (int trial = 0; trial < 200; ++trial) {
    Position p;
    // Sprinkle random pieces; slider under test goes on a fixed square.
    p.set_piece(Square(3, 3), Piece{PieceKind::queen, Color::white});
    std::vector<Square> blockers;
    for (int i = 0; i < 10; ++i) {
      const auto s = Square::from_index(static_cast<int>(gen.below(64)));
      if (s == Square(3, 3) || p.piece_at(s)) continue;
      p.set_piece(s, Piece{PieceKind::pawn, gen.below(2) ? Color::white : Color::black});
      blockers.push_back(s);
    }
    if (blockers.empty()) continue;
    const Bitboard before = attack_bitboard(p, Square(3, 3));
    Position fewer = p;
    fewer.clear_square(blockers[gen.below(blockers.size())]);
    const Bitboard after = attack_bitboard(fewer, Square(3, 3));
    CHECK((before & ~after) == 0);  // monotone: nothing lost
  }
}

TEST_CASE("pgn: two-ply game replays") {
  const auto games = parse_pgn_games("[Event \"t\"]\n\n1. e4 e5 *\n");
  REQUIRE(games.size() == 1);
  CHECK(games[0].positions.size() == 2);
  CHECK(games[0].moves[0].notation() == "e2e4");
  CHECK(games[0].moves[1].notation() == "e7e5");
  CHECK(!games[0].warning.has_value());
}

TEST_CASE("pgn: comments, variations and NAGs are skipped") {
  const std::string plain = "[Event \"a\"]\n\n1. e4 e5 2. Nf3 Nc6 *\n";
  const std::string decorated =
      "[Event \"a\"]\n\n1. e4 {best by test} e5 $1 (1... c5 2. Nf3 {sicilian}) "
      "2. Nf3 Nc6 *\n";
  const auto a = parse_pgn_games(plain);
  const auto b = parse_pgn_games(decorated);
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  REQUIRE(a[0].positions.size() == b[0].positions.size());
  for (std::size_t i = 0; i < a[0].positions.size(); ++i)
    CHECK(a[0].positions[i] == b[0].positions[i]);
}

TEST_CASE("pgn: illegal SAN truncates with a warning") {
  const auto games = parse_pgn_games("[Event \"a\"]\n\n1. e4 Qd9 2. d4 *\n");
  REQUIRE(games.size() == 1);
  CHECK(games[0].positions.size() == 1);
  REQUIRE(games[0].warning.has_value());
  CHECK(games[0].warning->find("Qd9") != std::string::npos);
}

TEST_CASE("pgn: FEN tag overrides the start position") {
  const auto games = parse_pgn_games(
      "[Event \"a\"]\n[SetUp \"1\"]\n[FEN \"4k3/8/8/8/8/8/4P3/4K3 w - - 0 1\"]\n\n"
      "1. e4 Kd7 *\n");
  REQUIRE(games.size() == 1);
  CHECK(games[0].positions.size() == 2);
  CHECK(games[0].start.fen() == "4k3/8/8/8/8/8/4P3/4K3 w - - 0 1");
}

TEST_CASE("pgn: multiple games split correctly") {
  const auto games = parse_pgn_games(
      "[Event \"one\"]\n\n1. e4 e5 1-0\n\n[Event \"two\"]\n\n1. d4 d5 *\n");
  REQUIRE(games.size() == 2);
  CHECK(games[0].tag("Event") == "one");
  CHECK(games[1].tag("Event") == "two");
  CHECK(games[1].moves[0].notation() == "d2d4");
}

TEST_CASE("san round-trip over random self-play") {
  rng::Philox gen(7, 0);
  for (int game = 0; game < 30; ++game) {
    Position p = Position::initial();
    for (int ply = 0; ply < 80; ++ply) {
      const auto moves = legal_moves(p);
      if (moves.empty()) break;
      const Move& m = moves[gen.below(moves.size())];
      const std::string san = to_san(p, m);
      const auto parsed = move_from_san(p, san);
      REQUIRE_MESSAGE(parsed.has_value(), "ply ", ply, " san ", san, " fen ", p.fen());
      CHECK(*parsed == m);
      p = apply_move_unchecked(p, m);
    }
  }
}

TEST_SUITE_END();
