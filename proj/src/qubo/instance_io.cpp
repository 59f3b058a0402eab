#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qkrd/instance.hpp"

namespace qkrd::qubo {

using nlohmann::json;

namespace {

json weights_to_json(const QuboWeights& w) {
  return {{"alpha1", w.alpha1},
          {"alpha2", w.alpha2},
          {"beta_risk", w.beta_risk},
          {"lambda_onehot", w.lambda_onehot},
          {"lambda_gate", w.lambda_gate}};
}

QuboWeights weights_from_json(const json& j) {
  QuboWeights w;
  w.alpha1 = j.at("alpha1").get<double>();
  w.alpha2 = j.at("alpha2").get<double>();
  w.beta_risk = j.at("beta_risk").get<double>();
  w.lambda_onehot = j.at("lambda_onehot").get<double>();
  w.lambda_gate = j.at("lambda_gate").get<double>();
  return w;
}

json config_to_json(const InstanceConfig& cfg) {
  return {{"roi_size", cfg.roi_size},
          {"k", cfg.k},
          {"f", cfg.f},
          {"weights", weights_to_json(cfg.weights)}};
}

InstanceConfig config_from_json(const json& j) {
  InstanceConfig cfg;
  cfg.roi_size = j.at("roi_size").get<int>();
  cfg.k = j.at("k").get<int>();
  cfg.f = j.at("f").get<int>();
  cfg.weights = weights_from_json(j.at("weights"));
  return cfg;
}

json candidate_to_json(const Candidate& c) {
  return {{"move", c.move.notation()},
          {"c1", c.c1},
          {"c2", c.c2},
          {"risk", c.risk},
          {"gain", c.gain},
          {"score", c.score}};
}

Candidate candidate_from_json(const json& j) {
  Candidate c;
  const auto move = chess::Move::parse(j.at("move").get<std::string>());
  if (!move) throw std::runtime_error("instance: bad move notation");
  c.move = *move;
  c.c1 = j.at("c1").get<int>();
  c.c2 = j.at("c2").get<int>();
  c.risk = j.at("risk").get<int>();
  c.gain = j.at("gain").get<int>();
  c.score = j.at("score").get<double>();
  return c;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void validate_instance(const QkrdInstance& inst) {
  inst.config.validate();
  if (static_cast<int>(inst.candidates.size()) != inst.config.k)
    throw std::runtime_error("instance: candidate count != K");
  const auto& w = inst.config.weights;
  const auto check_block = [&](const std::vector<Candidate>& block, const char* what) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      const Candidate& c = block[i];
      if (std::abs(c.score - candidate_score(c.c1, c.c2, c.risk, w)) > 1e-9)
        throw std::runtime_error(std::string("instance: ") + what +
                                 " score inconsistent with coverage/risk");
      if (i > 0) {
        const Candidate& prev = block[i - 1];
        const bool ordered = prev.score > c.score ||
                             (prev.score == c.score &&
                              prev.move.notation() < c.move.notation());
        if (!ordered)
          throw std::runtime_error(std::string("instance: ") + what +
                                   " ordering invariant violated");
      }
    }
  };
  check_block(inst.candidates, "candidate");
  for (const Candidate& c : inst.candidates)
    if (c.gain < 1)
      throw std::runtime_error("instance: candidate without a strict coverage gain");
  if (inst.config.f > 0) {
    if (inst.followups.size() != inst.candidates.size())
      throw std::runtime_error("instance: follow-up block count != K");
    for (const auto& block : inst.followups) {
      if (static_cast<int>(block.size()) != inst.config.f)
        throw std::runtime_error("instance: follow-up block size != F");
      check_block(block, "follow-up");
    }
  }

  // The stored model must be exactly what the candidates generate.
  auto [expect_model, expect_layout] = build_qubo(inst.candidates, inst.followups,
                                                  inst.config);
  if (inst.layout.encoding == Encoding::domain_wall)
    std::tie(expect_model, expect_layout) = encode_domain_wall(
        expect_model, expect_layout, inst.config.weights.lambda_onehot);
  if (inst.layout.n_qubits != expect_layout.n_qubits ||
      inst.layout.primary != expect_layout.primary ||
      inst.layout.followup_blocks != expect_layout.followup_blocks)
    throw std::runtime_error("instance: layout inconsistent with config");
  if (inst.qubo.n_vars != expect_model.n_vars ||
      std::abs(inst.qubo.constant - expect_model.constant) > 1e-9 ||
      inst.qubo.quadratic.size() != expect_model.quadratic.size())
    throw std::runtime_error("instance: stored QUBO does not match candidates");
  for (int i = 0; i < expect_model.n_vars; ++i)
    if (std::abs(inst.qubo.linear[i] - expect_model.linear[i]) > 1e-9)
      throw std::runtime_error("instance: stored QUBO linear term mismatch");
  for (const auto& [key, c] : expect_model.quadratic) {
    const auto it = inst.qubo.quadratic.find(key);
    if (it == inst.qubo.quadratic.end() || std::abs(it->second - c) > 1e-9)
      throw std::runtime_error("instance: stored QUBO quadratic term mismatch");
  }
}

}  // namespace

std::string config_hash(const InstanceConfig& cfg) {
  return hex64(fnv1a(config_to_json(cfg).dump()));
}

std::string instance_config_to_json(const InstanceConfig& cfg) {
  return config_to_json(cfg).dump(2);
}

InstanceConfig instance_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
  }
  InstanceConfig cfg;  // defaults for omitted fields
  if (j.contains("roi_size")) cfg.roi_size = j.at("roi_size").get<int>();
  if (j.contains("k")) cfg.k = j.at("k").get<int>();
  if (j.contains("f")) cfg.f = j.at("f").get<int>();
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    if (w.contains("alpha1")) cfg.weights.alpha1 = w.at("alpha1").get<double>();
    if (w.contains("alpha2")) cfg.weights.alpha2 = w.at("alpha2").get<double>();
    if (w.contains("beta_risk")) cfg.weights.beta_risk = w.at("beta_risk").get<double>();
    if (w.contains("lambda_onehot"))
      cfg.weights.lambda_onehot = w.at("lambda_onehot").get<double>();
    if (w.contains("lambda_gate"))
      cfg.weights.lambda_gate = w.at("lambda_gate").get<double>();
  }
  cfg.validate();
  return cfg;
}

std::string instance_to_json(const QkrdInstance& inst) {
  json j;
  j["format"] = "qkrd-instance";
  j["version"] = instance_format_version;
  j["id"] = inst.id;
  j["source"] = {{"fen", inst.source.fen},
                 {"event", inst.source.event},
                 {"white", inst.source.white},
                 {"black", inst.source.black},
                 {"game_index", inst.source.game_index},
                 {"ply", inst.source.ply},
                 {"followup_convention", inst.source.followup_convention}};
  j["config"] = config_to_json(inst.config);
  j["config_hash"] = config_hash(inst.config);
  json cands = json::array();
  for (const auto& c : inst.candidates) cands.push_back(candidate_to_json(c));
  j["candidates"] = std::move(cands);
  json blocks = json::array();
  for (const auto& block : inst.followups) {
    json b = json::array();
    for (const auto& c : block) b.push_back(candidate_to_json(c));
    blocks.push_back(std::move(b));
  }
  j["followups"] = std::move(blocks);
  j["layout"] = {
      {"encoding", inst.layout.encoding == Encoding::one_hot ? "one_hot" : "domain_wall"},
      {"k", inst.layout.k},
      {"f", inst.layout.f},
      {"n_qubits", inst.layout.n_qubits},
      {"primary", inst.layout.primary},
      {"followup_blocks", inst.layout.followup_blocks}};
  json quad = json::array();
  for (const auto& [key, c] : inst.qubo.quadratic)
    quad.push_back({key.first, key.second, c});
  j["qubo"] = {{"n_vars", inst.qubo.n_vars},
               {"constant", inst.qubo.constant},
               {"linear", inst.qubo.linear},
               {"quadratic", std::move(quad)}};
  return j.dump(2);
}

QkrdInstance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("instance: invalid JSON: ") + e.what());
  }
  if (j.value("format", "") != "qkrd-instance")
    throw std::runtime_error("instance: unknown format tag");
  if (j.value("version", -1) != instance_format_version)
    throw std::runtime_error("instance: unsupported version " +
                             std::to_string(j.value("version", -1)));

  QkrdInstance inst;
  inst.id = j.value("id", "");
  const auto& src = j.at("source");
  inst.source.fen = src.at("fen").get<std::string>();
  inst.source.event = src.value("event", "");
  inst.source.white = src.value("white", "");
  inst.source.black = src.value("black", "");
  inst.source.game_index = src.value("game_index", 0);
  inst.source.ply = src.value("ply", 0);
  inst.source.followup_convention = src.value("followup_convention", "");
  inst.config = config_from_json(j.at("config"));
  for (const auto& c : j.at("candidates")) inst.candidates.push_back(candidate_from_json(c));
  for (const auto& block : j.at("followups")) {
    std::vector<Candidate> b;
    for (const auto& c : block) b.push_back(candidate_from_json(c));
    inst.followups.push_back(std::move(b));
  }
  const auto& lay = j.at("layout");
  const std::string enc = lay.at("encoding").get<std::string>();
  if (enc == "one_hot") inst.layout.encoding = Encoding::one_hot;
  else if (enc == "domain_wall") inst.layout.encoding = Encoding::domain_wall;
  else throw std::runtime_error("instance: unknown encoding '" + enc + "'");
  inst.layout.k = lay.at("k").get<int>();
  inst.layout.f = lay.at("f").get<int>();
  inst.layout.n_qubits = lay.at("n_qubits").get<int>();
  inst.layout.primary = lay.at("primary").get<std::vector<int>>();
  inst.layout.followup_blocks =
      lay.at("followup_blocks").get<std::vector<std::vector<int>>>();
  const auto& q = j.at("qubo");
  inst.qubo.n_vars = q.at("n_vars").get<int>();
  inst.qubo.constant = q.at("constant").get<double>();
  inst.qubo.linear = q.at("linear").get<std::vector<double>>();
  for (const auto& t : q.at("quadratic")) {
    if (!t.is_array() || t.size() != 3)
      throw std::runtime_error("instance: quadratic entries must be [i, j, c]");
    inst.qubo.quadratic[{t[0].get<int>(), t[1].get<int>()}] = t[2].get<double>();
  }

  validate_instance(inst);
  return inst;
}

void write_instance(const QkrdInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << instance_to_json(inst) << '\n';
}

QkrdInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return instance_from_json(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_manifest(const DatasetManifest& m, const std::string& path) {
  json j;
  j["format"] = "qkrd-manifest";
  j["version"] = instance_format_version;
  j["seed"] = m.seed;
  j["config"] = config_to_json(m.config);
  j["config_hash"] = config_hash(m.config);
  json list = json::array();
  for (const auto& e : m.instances)
    list.push_back({{"id", e.id}, {"path", e.path}, {"fen", e.fen},
                    {"n_qubits", e.n_qubits}});
  j["instances"] = std::move(list);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << j.dump(2) << '\n';
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
  if (j.value("format", "") != "qkrd-manifest")
    throw std::runtime_error(path + ": unknown format tag");
  if (j.value("version", -1) != instance_format_version)
    throw std::runtime_error(path + ": unsupported version");
  DatasetManifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config = config_from_json(j.at("config"));
  m.config_hash = j.at("config_hash").get<std::string>();
  if (m.config_hash != config_hash(m.config))
    throw std::runtime_error(path + ": config hash mismatch");
  for (const auto& e : j.at("instances")) {
    ManifestEntry entry;
    entry.id = e.at("id").get<std::string>();
    entry.path = e.at("path").get<std::string>();
    entry.fen = e.at("fen").get<std::string>();
    entry.n_qubits = e.at("n_qubits").get<int>();
    m.instances.push_back(std::move(entry));
  }
  return m;
}

std::vector<QkrdInstance> load_dataset(const std::string& manifest_path, int limit) {
  const auto manifest = read_manifest(manifest_path);
  const auto base = std::filesystem::path(manifest_path).parent_path();
  std::vector<QkrdInstance> out;
  for (const auto& e : manifest.instances) {
    if (limit > 0 && static_cast<int>(out.size()) >= limit) break;
    auto inst = read_instance((base / e.path).string());
    if (inst.id.empty()) inst.id = e.id;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace qkrd::qubo
