// Seeded self-play generator for the bundled PGN fixtures. Two squads:
// games from the standard start with capture/coverage-biased random play,
// and games seeded from sparse constructed positions (FEN tags) where a
// small attacking force hunts a lightly defended king. The sparse squad is
// what gives candidate lists their realistic quality spread.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "qkrd/chess/pgn.hpp"
#include "qkrd/kingring.hpp"
#include "qkrd/rng.hpp"

using namespace qkrd;
using chess::Color;
using chess::Move;
using chess::PieceKind;
using chess::Piece;
using chess::Position;
using chess::Square;

namespace {

Move pick_move(const Position& p, rng::Philox& gen, double coverage_bias,
               double capture_bias) {
  const auto legal = chess::legal_moves(p);
  Move m = legal[gen.below(legal.size())];
  if (gen.uniform() < capture_bias) {
    std::vector<Move> captures;
    for (const Move& c : legal)
      if (p.piece_at(c.to)) captures.push_back(c);
    if (!captures.empty()) return captures[gen.below(captures.size())];
  }
  if (gen.uniform() < coverage_bias && p.king_square(chess::opposite(p.side_to_move()))) {
    const auto raisers = ring::coverage_increasing_moves(p);
    if (!raisers.empty()) return raisers[gen.below(raisers.size())].move;
  }
  return m;
}

// Random sparse middlegame: both kings, a white attacking force, black
// defenders. Rejection-sampled until the placement is a legal position.
std::optional<Position> sparse_position(rng::Philox& gen) {
  for (int attempt = 0; attempt < 60; ++attempt) {
    Position p;
    const auto free_square = [&]() -> std::optional<Square> {
      for (int tries = 0; tries < 40; ++tries) {
        const Square s = Square::from_index(static_cast<int>(gen.below(64)));
        if (!p.piece_at(s)) return s;
      }
      return std::nullopt;
    };

    // Both kings in opposite corner zones: whichever side ends up the
    // attacker, the defending rings are clipped to a handful of squares,
    // keeping coverage gains small integers with a real spread.
    const int zone = static_cast<int>(gen.below(4));  // corner of the black king
    const auto corner_square = [&](int z) {
      const int f = (z & 1) ? 7 - static_cast<int>(gen.below(2))
                            : static_cast<int>(gen.below(2));
      const int r = (z & 2) ? 7 - static_cast<int>(gen.below(2))
                            : static_cast<int>(gen.below(2));
      return Square(f, r);
    };
    const Square bks = corner_square(zone);
    const Square wks = corner_square(3 - zone);  // diagonally opposite zone
    if (p.piece_at(bks) || p.piece_at(wks) ||
        std::max(std::abs(bks.file() - wks.file()),
                 std::abs(bks.rank() - wks.rank())) < 2)
      continue;
    p.set_piece(bks, Piece{PieceKind::king, Color::black});
    p.set_piece(wks, Piece{PieceKind::king, Color::white});

    const auto drop = [&](PieceKind kind, Color color) {
      if (const auto s = free_square()) {
        if (kind == PieceKind::pawn && (s->rank() == 0 || s->rank() == 7)) return;
        p.set_piece(*s, Piece{kind, color});
      }
    };
    for (const Color side : {Color::white, Color::black}) {
      drop(PieceKind::rook, side);
      if (gen.uniform() < 0.5) drop(PieceKind::knight, side);
      const int pawns = 2 + static_cast<int>(gen.below(2));
      for (int i = 0; i < pawns; ++i) drop(PieceKind::pawn, side);
    }

    // Pawn shelter around each king.
    for (const auto& [king, color] :
         {std::pair{bks, Color::black}, std::pair{wks, Color::white}}) {
      int shelter = 0;
      for (int df = -1; df <= 1 && shelter < 2; ++df)
        for (int dr = -1; dr <= 1 && shelter < 2; ++dr) {
          if (!df && !dr) continue;
          const int f = king.file() + df, r = king.rank() + dr;
          if (f < 0 || f > 7 || r < 1 || r > 6) continue;
          const Square s(f, r);
          if (p.piece_at(s) || gen.uniform() < 0.4) continue;
          p.set_piece(s, Piece{PieceKind::pawn, color});
          ++shelter;
        }
    }

    p.set_side_to_move(Color::white);
    p.set_fullmove_number(12 + static_cast<int>(gen.below(30)));
    p.set_halfmove_clock(0);
    if (chess::in_check(p, Color::black)) continue;  // mover would capture the king
    if (chess::legal_moves(p).empty()) continue;
    return p;
  }
  return std::nullopt;
}

void write_game(std::ofstream& file, const Position& start, bool tagged_fen,
                const std::vector<std::string>& sans, int round,
                std::uint64_t seed) {
  file << "[Event \"selfplay fixture\"]\n"
       << "[Site \"local\"]\n"
       << "[Round \"" << round << "\"]\n"
       << "[White \"gen-" << seed << "\"]\n"
       << "[Black \"gen-" << seed << "\"]\n";
  if (tagged_fen)
    file << "[SetUp \"1\"]\n"
         << "[FEN \"" << start.fen() << "\"]\n";
  file << "[Result \"*\"]\n\n";
  for (std::size_t i = 0; i < sans.size(); ++i) {
    if (i % 2 == 0) file << (i / 2 + 1) << ". ";
    file << sans[i] << ' ';
    if (i % 16 == 15) file << '\n';
  }
  file << "*\n\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate self-play PGN fixtures"};
  int games = 50;
  int sparse_games = 0;
  int max_plies = 80;
  double bias = 0.5;
  double capture_bias = 0.2;
  std::uint64_t seed = 1;
  std::string out;
  app.add_option("--games", games, "standard-start games");
  app.add_option("--sparse", sparse_games, "games seeded from sparse positions");
  app.add_option("--max-plies", max_plies, "plies per game");
  app.add_option("--bias", bias, "probability of picking a coverage-increasing move");
  app.add_option("--capture-bias", capture_bias, "probability of preferring a capture");
  app.add_option("--seed", seed, "rng seed");
  app.add_option("--out", out, "output PGN path")->required();
  CLI11_PARSE(app, argc, argv);

  std::ofstream file(out);
  if (!file) {
    std::cerr << "cannot open " << out << "\n";
    return 1;
  }

  int round = 0;
  for (int g = 0; g < games; ++g) {
    rng::Philox gen(seed, g);
    Position p = Position::initial();
    const Position start = p;
    std::vector<std::string> sans;
    for (int ply = 0; ply < max_plies; ++ply) {
      if (chess::legal_moves(p).empty()) break;
      const Move m = pick_move(p, gen, bias, capture_bias);
      sans.push_back(chess::to_san(p, m));
      p = chess::apply_move_unchecked(p, m);
    }
    write_game(file, start, false, sans, ++round, seed);
  }
  for (int g = 0; g < sparse_games; ++g) {
    rng::Philox gen(seed, 0x5000 + g);
    const auto seeded = sparse_position(gen);
    if (!seeded) continue;
    Position p = *seeded;
    const Position start = p;
    std::vector<std::string> sans;
    for (int ply = 0; ply < max_plies; ++ply) {
      if (chess::legal_moves(p).empty()) break;
      const Move m = pick_move(p, gen, bias, 0.05);
      sans.push_back(chess::to_san(p, m));
      p = chess::apply_move_unchecked(p, m);
    }
    write_game(file, start, true, sans, ++round, seed);
  }
  std::cout << "wrote " << round << " games to " << out << "\n";
  return 0;
}
