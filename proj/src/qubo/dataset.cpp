#include <cstdio>
#include <filesystem>
#include <set>

#include "qkrd/chess/pgn.hpp"
#include "qkrd/instance.hpp"

namespace qkrd::qubo {

GenStats generate_dataset(const std::vector<std::string>& pgn_texts,
                          const std::vector<std::string>& fens,
                          const GenOptions& options, const std::string& out_dir) {
  options.config.validate();
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);

  GenStats stats;
  DatasetManifest manifest;
  manifest.seed = options.seed;
  manifest.config = options.config;
  manifest.config_hash = config_hash(options.config);

  std::set<std::string> seen_fens;

  const auto consider = [&](const chess::Position& p, const SourceInfo& src) {
    if (options.limit > 0 && stats.generated >= options.limit) return;
    ++stats.positions_scanned;
    if (!filter_position(p, options.config)) return;
    ++stats.filter_passed;
    if (!seen_fens.insert(p.fen()).second) {
      ++stats.duplicates;
      return;
    }
    auto inst = generate_instance(p, options.config, src);
    if (!inst) {
      ++stats.rejected;
      return;
    }
    char name[32];
    std::snprintf(name, sizeof name, "inst_%04d", stats.generated);
    inst->id = name;
    const std::string file = std::string(name) + ".json";
    write_instance(*inst, (dir / file).string());
    manifest.instances.push_back(
        {inst->id, file, inst->source.fen, inst->layout.n_qubits});
    ++stats.generated;
  };

  int game_index = 0;
  for (const auto& text : pgn_texts) {
    for (const auto& game : chess::parse_pgn_games(text)) {
      ++stats.games;
      SourceInfo src;
      src.event = game.tag("Event");
      src.white = game.tag("White");
      src.black = game.tag("Black");
      src.game_index = game_index;
      int ply = 0;
      src.ply = ply;
      consider(game.start, src);
      for (const auto& p : game.positions) {
        src.ply = ++ply;
        consider(p, src);
      }
      ++game_index;
    }
  }
  for (const auto& fen : fens) {
    SourceInfo src;
    src.event = "fen-input";
    src.game_index = -1;
    consider(chess::Position::from_fen(fen), src);
  }

  write_manifest(manifest, (dir / "manifest.json").string());
  return stats;
}

}  // namespace qkrd::qubo
