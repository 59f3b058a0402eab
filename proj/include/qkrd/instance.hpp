#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qkrd/kingring.hpp"

namespace qkrd::qubo {

struct QuboWeights {
  double alpha1 = 3.0;       // inner-ring coverage weight
  double alpha2 = 1.0;       // outer-ring coverage weight
  double beta_risk = 1.0;
  double lambda_onehot = 10.0;
  double lambda_gate = 10.0;

  void validate() const;
  bool operator==(const QuboWeights&) const = default;
};

struct InstanceConfig {
  int roi_size = 5;  // odd, >= 3
  int k = 8;
  int f = 0;
  QuboWeights weights;

  void validate() const;
  bool operator==(const InstanceConfig&) const = default;
};

struct Candidate {
  chess::Move move;
  int c1 = 0;
  int c2 = 0;
  int risk = 0;
  int gain = 0;  // coverage added by the move: destination minus origin
  double score = 0.0;
};

double candidate_score(int c1, int c2, int risk, const QuboWeights& w);

enum class Encoding { one_hot, domain_wall };

// Maps problem variables onto qubits. One-hot uses K primary qubits plus
// K*F follow-up qubits; domain-wall re-expresses the K primary choices over
// K-1 wall qubits (choice i <=> the first i wall bits set).
struct VariableLayout {
  Encoding encoding = Encoding::one_hot;
  int k = 0;
  int f = 0;
  int n_qubits = 0;
  std::vector<int> primary;                       // qubit indices
  std::vector<std::vector<int>> followup_blocks;  // per choice, size f each

  bool is_feasible(std::uint64_t bits) const;
  std::vector<std::uint64_t> feasible_bitstrings() const;

  struct Selection {
    int primary = -1;
    int followup = -1;  // index within the selected block; -1 when f == 0
  };
  std::optional<Selection> decode(std::uint64_t bits) const;
  std::uint64_t encode(int primary_choice, int followup = -1) const;
};

struct QuboModel {
  int n_vars = 0;
  double constant = 0.0;
  std::vector<double> linear;
  std::map<std::pair<int, int>, double> quadratic;  // keys i < j

  void add_linear(int i, double c);
  void add_quadratic(int i, int j, double c);
  double energy(std::uint64_t bits) const;
};

struct SourceInfo {
  std::string fen;
  std::string event;
  std::string white;
  std::string black;
  int game_index = 0;
  int ply = 0;
  std::string followup_convention;  // "null_move" when f >= 1
};

struct QkrdInstance {
  std::string id;
  SourceInfo source;
  InstanceConfig config;
  std::vector<Candidate> candidates;
  std::vector<std::vector<Candidate>> followups;  // marginal scores
  VariableLayout layout;
  QuboModel qubo;
};

// Square window of side roi_size centered on the defender king, clipped to
// the board.
chess::Bitboard extract_roi(const chess::Position& p, int roi_size);

// Top-K coverage-increasing moves with destinations inside the ROI, ranked
// by score with coordinate-notation tie-break. nullopt = fewer than K
// eligible moves (instance rejected, not an error).
std::optional<std::vector<Candidate>> select_candidates(const chess::Position& p,
                                                        const InstanceConfig& cfg);

// Top-F follow-ups for a primary move under the pass-the-turn convention;
// coverage is marginal (ring squares the primary does not already cover).
// Falls back to non-strict moves to fill the block, nullopt if still short.
std::optional<std::vector<Candidate>> generate_followups(const chess::Position& p,
                                                         const chess::Move& primary,
                                                         const InstanceConfig& cfg);

std::pair<QuboModel, VariableLayout> build_qubo(
    const std::vector<Candidate>& candidates,
    const std::vector<std::vector<Candidate>>& followups, const InstanceConfig& cfg);

// Re-expresses the primary one-hot block over K-1 wall variables and drops
// its one-hot penalty; follow-up blocks and gating are preserved. The input
// model must be the build_qubo output for the same lambda.
std::pair<QuboModel, VariableLayout> encode_domain_wall(const QuboModel& model,
                                                        const VariableLayout& layout,
                                                        double lambda_onehot);

// Dataset filter: not in check, fullmove >= 10, and at least max(K, 8)
// coverage-increasing moves into the ROI.
bool filter_position(const chess::Position& p, const InstanceConfig& cfg);

std::optional<QkrdInstance> generate_instance(const chess::Position& p,
                                              const InstanceConfig& cfg,
                                              const SourceInfo& source);

// ---- persistence ----------------------------------------------------------

inline constexpr int instance_format_version = 1;

std::string instance_to_json(const QkrdInstance& inst);
QkrdInstance instance_from_json(const std::string& text);
void write_instance(const QkrdInstance& inst, const std::string& path);
QkrdInstance read_instance(const std::string& path);

struct ManifestEntry {
  std::string id;
  std::string path;  // relative to the manifest file
  std::string fen;
  int n_qubits = 0;
};

struct DatasetManifest {
  std::uint64_t seed = 0;
  InstanceConfig config;
  std::string config_hash;
  std::vector<ManifestEntry> instances;
};

std::string config_hash(const InstanceConfig& cfg);
std::string instance_config_to_json(const InstanceConfig& cfg);
InstanceConfig instance_config_from_json(const std::string& text);
void write_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest read_manifest(const std::string& path);
// Loads every instance listed by a manifest, resolving relative paths.
std::vector<QkrdInstance> load_dataset(const std::string& manifest_path,
                                       int limit = 0);

// ---- dataset generation -----------------------------------------------------

struct GenOptions {
  InstanceConfig config;
  std::uint64_t seed = 0;  // recorded in the manifest
  int limit = 0;           // stop after this many instances (0 = no cap)
};

struct GenStats {
  int games = 0;
  int positions_scanned = 0;
  int filter_passed = 0;
  int generated = 0;
  int rejected = 0;
  int duplicates = 0;
};

// Scans every position of every game (plus standalone FENs), keeps those
// passing filter_position, builds instances, and writes inst_*.json files
// with a manifest into out_dir. Deterministic in the input order.
GenStats generate_dataset(const std::vector<std::string>& pgn_texts,
                          const std::vector<std::string>& fens,
                          const GenOptions& options, const std::string& out_dir);

}  // namespace qkrd::qubo
