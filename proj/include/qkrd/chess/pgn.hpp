#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qkrd/chess/movegen.hpp"

namespace qkrd::chess {

struct PgnGame {
  std::vector<std::pair<std::string, std::string>> tags;
  Position start;
  std::vector<Move> moves;
  std::vector<Position> positions;  // position after each ply
  // Set when an unresolvable SAN token truncated the game at the prior ply.
  std::optional<std::string> warning;

  std::string tag(const std::string& key) const;
};

// Parses a concatenation of PGN games: tag pairs plus mainline movetext.
// Comments, variations, and NAGs are skipped; an illegal SAN move truncates
// that game with a warning record rather than failing the whole parse.
// A [FEN] tag overrides the standard start position.
std::vector<PgnGame> parse_pgn_games(const std::string& text);

std::optional<Move> move_from_san(const Position& p, std::string_view san);
std::string to_san(const Position& p, const Move& m);

}  // namespace qkrd::chess
