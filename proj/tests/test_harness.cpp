#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qkrd/harness.hpp"
#include "qkrd/rng.hpp"

using namespace qkrd;
using namespace qkrd::harness;

namespace {

// A tiny self-contained dataset: four synthetic single-ply instances
// written through the real IO path.
std::string make_tiny_dataset() {
  const auto dir = std::filesystem::temp_directory_path() / "qkrd_harness_ds";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  qubo::InstanceConfig cfg;
  cfg.k = 4;
  cfg.f = 0;
  qubo::DatasetManifest manifest;
  manifest.seed = 5;
  manifest.config = cfg;
  manifest.config_hash = qubo::config_hash(cfg);

  rng::Philox gen(77, 0);
  for (int i = 0; i < 4; ++i) {
    std::vector<qubo::Candidate> cs;
    for (int m = 0; m < 4; ++m) {
      qubo::Candidate c;
      c.move = chess::Move{chess::Square(m, 0), chess::Square(m, 3 + i % 2), std::nullopt};
      c.c1 = static_cast<int>(gen.below(4));
      c.c2 = static_cast<int>(gen.below(6));
      c.risk = static_cast<int>(gen.below(2));
      c.gain = 1 + static_cast<int>(gen.below(5));
      c.score = qubo::candidate_score(c.c1, c.c2, c.risk, cfg.weights);
      cs.push_back(c);
    }
    std::stable_sort(cs.begin(), cs.end(), [](const auto& a, const auto& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.move.notation() < b.move.notation();
    });
    qubo::QkrdInstance inst;
    inst.id = "tiny_" + std::to_string(i);
    inst.source.fen = chess::Position::initial().fen();
    inst.config = cfg;
    inst.candidates = std::move(cs);
    std::tie(inst.qubo, inst.layout) = qubo::build_qubo(inst.candidates, {}, cfg);
    const std::string file = "tiny_" + std::to_string(i) + ".json";
    qubo::write_instance(inst, (dir / file).string());
    manifest.instances.push_back({inst.id, file, inst.source.fen, inst.layout.n_qubits});
  }
  const std::string path = (dir / "manifest.json").string();
  qubo::write_manifest(manifest, path);
  return path;
}

ExperimentConfig two_identical_arms(const std::string& manifest) {
  ExperimentConfig cfg;
  cfg.id = "self";
  cfg.manifest_path = manifest;
  cfg.master_seed = 9;
  ArmSpec a;
  a.label = "alpha";
  a.qaoa.mixer = sim::MixerSpec::Kind::xy_blocks;
  a.qaoa.init = qaoa::WarmStart::basis;
  a.qaoa.max_steps = 30;
  cfg.arms.push_back(a);
  ArmSpec b = a;
  b.label = "beta";
  cfg.arms.push_back(b);
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("two identical arms compare as indistinguishable") {
  const auto manifest = make_tiny_dataset();
  const auto report = run_experiment(two_identical_arms(manifest));
  REQUIRE(report.instance_ids.size() == 4);
  for (const char* metric : metric_names) {
    const auto* s = report.find_stat("alpha", "beta", metric);
    REQUIRE(s != nullptr);
    CHECK(s->mean_diff == doctest::Approx(0.0));
    // Identical seeds and configs: every paired difference is exactly zero.
    CHECK(s->degenerate);
    CHECK(s->p == doctest::Approx(1.0));
  }
}

TEST_CASE("reports round-trip through json and reproduce byte-identically") {
  const auto manifest = make_tiny_dataset();
  auto cfg = two_identical_arms(manifest);
  cfg.jobs = 2;
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  CHECK(report_to_json(a) == report_to_json(b));

  const auto back = report_from_json(report_to_json(a));
  CHECK(report_to_json(back) == report_to_json(a));

  // Different master seed changes the angle draws, hence the report.
  auto other = cfg;
  other.master_seed = 10;
  const auto c = run_experiment(other);
  CHECK(report_to_json(c) != report_to_json(a));
}

TEST_CASE("pairing drops an instance from every arm when one run fails") {
  const auto manifest = make_tiny_dataset();
  auto cfg = two_identical_arms(manifest);
  // Sabotage arm beta with a config that rejects at prepare time for every
  // instance? Instead: corrupt one instance file so loading fails is not an
  // option (load happens before arms). Use a domain-wall mixer with K=4 ok;
  // force failure via an invalid alpha on one arm only.
  cfg.arms[1].qaoa.objective = qaoa::Objective::cvar;
  cfg.arms[1].qaoa.cvar_alpha = 0.0;  // validate() rejects inside the run
  const auto report = run_experiment(cfg);
  CHECK(report.instance_ids.empty());
  CHECK(report.failures.size() == 4);
  for (const auto& s : report.stats) (void)s;  // no stats with < 2 pairs
  CHECK(report.stats.empty());
}

TEST_CASE("bonferroni column respects the family size and monotonicity") {
  const auto manifest = make_tiny_dataset();
  ExperimentConfig cfg = two_identical_arms(manifest);
  ArmSpec g;
  g.label = "greedy";
  g.kind = ArmSpec::Kind::greedy;
  cfg.arms.push_back(g);
  const auto report = run_experiment(cfg);
  for (const auto& s : report.stats) {
    CHECK(s.p_bonferroni >= s.p - 1e-15);
    CHECK(s.p_bonferroni <= 1.0);
  }
}

TEST_CASE("plot data: known figures, header-only for empty selections, byte-identical") {
  const auto manifest = make_tiny_dataset();
  auto cfg = two_identical_arms(manifest);
  ArmSpec g;
  g.label = "greedy";
  g.kind = ArmSpec::Kind::greedy;
  cfg.arms.push_back(g);
  const auto report = run_experiment(cfg);

  const auto out = std::filesystem::temp_directory_path() / "qkrd_plotdata";
  std::filesystem::remove_all(out);
  emit_plot_data(report, "fig5", out.string());
  REQUIRE(std::filesystem::exists(out / "fig5_coverage.csv"));
  REQUIRE(std::filesystem::exists(out / "fig5_coverage_summary.csv"));

  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string first = slurp(out / "fig5_coverage.csv");
  CHECK(first.rfind("arm,instance_id,coverage", 0) == 0);
  emit_plot_data(report, "fig5", out.string());
  CHECK(slurp(out / "fig5_coverage.csv") == first);

  CHECK_THROWS_WITH_AS(emit_plot_data(report, "fig9", out.string()),
                       doctest::Contains("fig2"), std::invalid_argument);

  // Empty report: headers only.
  ExperimentReport empty;
  empty.arm_labels = {"only"};
  emit_plot_data(empty, "fig2", out.string());
  const std::string header = slurp(out / "fig2_convergence_steps.csv");
  CHECK(header == "arm,instance_id,convergence_steps\n");
}

TEST_CASE("experiment config files parse arm fields by name") {
  const std::string text = R"({
    "id": "custom",
    "manifest": "m.json",
    "master_seed": 11,
    "arms": [
      {"label": "a", "kind": "qaoa", "mixer": "x", "init": "none",
       "objective": "cvar", "cvar_alpha": 0.3, "optimizer": "simplex",
       "max_steps": 77, "shots": 256, "lambda_override": 5.0},
      {"label": "b", "kind": "greedy"},
      {"label": "c", "kind": "random"}
    ]
  })";
  const auto cfg = experiment_config_from_json(text);
  CHECK(cfg.id == "custom");
  CHECK(cfg.master_seed == 11);
  REQUIRE(cfg.arms.size() == 3);
  CHECK(cfg.arms[0].qaoa.mixer == sim::MixerSpec::Kind::x);
  CHECK(cfg.arms[0].qaoa.objective == qaoa::Objective::cvar);
  CHECK(cfg.arms[0].qaoa.cvar_alpha == doctest::Approx(0.3));
  CHECK(cfg.arms[0].qaoa.optimizer == qaoa::OptimizerKind::simplex);
  CHECK(cfg.arms[0].qaoa.max_steps == 77);
  CHECK(cfg.arms[0].qaoa.shots == 256);
  REQUIRE(cfg.arms[0].lambda_override.has_value());
  CHECK(*cfg.arms[0].lambda_override == doctest::Approx(5.0));
  CHECK(cfg.arms[1].kind == ArmSpec::Kind::greedy);
  CHECK(cfg.arms[2].kind == ArmSpec::Kind::random);

  CHECK_THROWS_AS(experiment_config_from_json("{\"arms\": [{\"label\": \"x\", "
                                              "\"mixer\": \"warp\"}]}"),
                  std::invalid_argument);
}

TEST_CASE("presets carry the documented arm structure") {
  const auto e1 = make_preset("E1", "m.json", 1);
  REQUIRE(e1.arms.size() == 7);
  CHECK(e1.arms[0].lambda_override.has_value());
  CHECK(e1.arms[6].qaoa.mixer == sim::MixerSpec::Kind::domain_wall);

  const auto e2 = make_preset("E2", "m.json", 1);
  REQUIRE(e2.arms.size() == 3);
  CHECK(e2.arms[0].qaoa.init == qaoa::WarmStart::none);

  const auto e4 = make_preset("E4", "m.json", 1);
  REQUIRE(e4.arms.size() == 5);
  CHECK(e4.arms[0].qaoa.max_steps == 120);
  CHECK(e4.arms[1].qaoa.objective == qaoa::Objective::cvar);
  CHECK(e4.arms[1].qaoa.cvar_alpha == doctest::Approx(0.05));
  CHECK(e4.arms[1].qaoa.max_steps == 250);
  CHECK(e4.arms[1].qaoa.optimizer == qaoa::OptimizerKind::simplex);

  const auto e5 = make_preset("E5", "m.json", 1);
  REQUIRE(e5.arms.size() == 3);
  CHECK(e5.arms[1].kind == ArmSpec::Kind::greedy);
  CHECK(e5.arms[2].kind == ArmSpec::Kind::random);

  CHECK_THROWS_WITH_AS(make_preset("E3", "m.json", 1), doctest::Contains("E1"),
                       std::invalid_argument);
}

TEST_SUITE_END();
