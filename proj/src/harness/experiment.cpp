#include <atomic>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qkrd/harness.hpp"
#include "qkrd/rng.hpp"

namespace qkrd::harness {

using nlohmann::json;

double RunRecord::metric(const std::string& name) const {
  if (name == "final_energy") return final_energy;
  if (name == "coverage") return coverage;
  if (name == "feasible_mass") return feasible_mass;
  if (name == "convergence_steps") return convergence_steps;
  throw std::invalid_argument("unknown metric: " + name);
}

std::vector<double> ExperimentReport::metric_values(const std::string& arm,
                                                    const std::string& metric) const {
  std::vector<double> out;
  for (const auto& run : runs)
    if (run.arm == arm && !run.failure) out.push_back(run.metric(metric));
  return out;
}

const StatResult* ExperimentReport::find_stat(const std::string& arm_a,
                                              const std::string& arm_b,
                                              const std::string& metric) const {
  for (const auto& s : stats) {
    if (s.metric != metric) continue;
    if (s.arm_a == arm_a && s.arm_b == arm_b) return &s;
  }
  return nullptr;
}

namespace {

// The reported coverage metric is the primary move's coverage gain.
int selection_coverage(const qubo::QkrdInstance& inst, int primary, int followup) {
  (void)followup;
  return inst.candidates[primary].gain;
}

RunRecord execute_run(const qubo::QkrdInstance& inst, const ArmSpec& arm,
                      std::uint64_t seed) {
  RunRecord rec;
  rec.instance_id = inst.id;
  rec.arm = arm.label;
  rec.seed = seed;
  try {
    switch (arm.kind) {
      case ArmSpec::Kind::greedy: {
        const auto g = baselines::greedy_select(inst);
        rec.final_energy = g.energy;
        rec.final_expectation = g.energy;
        rec.coverage = g.coverage;
        rec.feasible_mass = 1.0;
        rec.top_state_feasible = true;
        rec.decoded_primary = inst.candidates[g.primary].move.notation();
        if (g.followup >= 0)
          rec.decoded_followup = inst.followups[g.primary][g.followup].move.notation();
        break;
      }
      case ArmSpec::Kind::random: {
        const auto r = baselines::random_select(inst, seed);
        rec.final_energy = r.energy;
        rec.final_expectation = r.energy;
        rec.coverage = r.coverage;
        rec.feasible_mass = 1.0;
        rec.top_state_feasible = true;
        rec.decoded_primary = inst.candidates[r.primary].move.notation();
        if (r.followup >= 0)
          rec.decoded_followup = inst.followups[r.primary][r.followup].move.notation();
        break;
      }
      case ArmSpec::Kind::qaoa: {
        qaoa::QaoaConfig qcfg = arm.qaoa;
        qcfg.seed = seed;
        const auto prep = qaoa::prepare(inst, qcfg, arm.lambda_override);
        const auto trace = qaoa::optimize(prep, qcfg);
        rec.final_energy = trace.final_objective;
        rec.final_expectation = trace.final_expectation;
        rec.coverage = selection_coverage(inst, trace.decoded.primary,
                                          trace.decoded.followup);
        rec.feasible_mass = trace.feasible_mass;
        rec.top_state_feasible = trace.top_state_feasible;
        rec.decode_fallback = trace.decoded.fallback;
        rec.convergence_steps = qaoa::convergence_steps(trace);
        rec.steps_run = trace.steps_run;
        rec.converged_early = trace.converged_early;
        rec.decoded_primary =
            inst.candidates[trace.decoded.primary].move.notation();
        if (trace.decoded.followup >= 0)
          rec.decoded_followup =
              inst.followups[trace.decoded.primary][trace.decoded.followup]
                  .move.notation();
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.failure = e.what();
  }
  return rec;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.arms.empty()) throw std::invalid_argument("experiment: no arms");
  std::set<std::string> labels;
  for (const auto& arm : cfg.arms)
    if (!labels.insert(arm.label).second)
      throw std::invalid_argument("experiment: duplicate arm label " + arm.label);

  const auto manifest = qubo::read_manifest(cfg.manifest_path);
  const auto instances = qubo::load_dataset(cfg.manifest_path, cfg.limit_instances);
  if (instances.empty()) throw std::runtime_error("experiment: empty dataset");

  ExperimentReport report;
  report.id = cfg.id;
  report.master_seed = cfg.master_seed;
  report.manifest_path = cfg.manifest_path;
  report.dataset_config_hash = manifest.config_hash;
  for (const auto& arm : cfg.arms) report.arm_labels.push_back(arm.label);

  const std::size_t n_arms = cfg.arms.size();
  const std::size_t n_tasks = instances.size() * n_arms;
  std::vector<RunRecord> slots(n_tasks);

  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_tasks) return;
      const std::size_t inst_idx = task / n_arms;
      const std::size_t arm_idx = task % n_arms;
      // Seeds are paired by instance so every arm sees the same draws.
      const std::uint64_t seed = rng::mix(cfg.master_seed, inst_idx);
      slots[task] = execute_run(instances[inst_idx], cfg.arms[arm_idx], seed);
    }
  };
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Pairing integrity: an instance with any failed arm leaves the stats for
  // every arm.
  std::vector<bool> keep(instances.size(), true);
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::size_t a = 0; a < n_arms; ++a)
      if (slots[i * n_arms + a].failure) {
        keep[i] = false;
        report.failures.push_back(instances[i].id + " / " + cfg.arms[a].label + ": " +
                                  *slots[i * n_arms + a].failure);
      }

  report.runs = std::move(slots);
  for (std::size_t i = 0; i < instances.size(); ++i)
    if (keep[i]) report.instance_ids.push_back(instances[i].id);

  // Pairwise paired tests for every metric; Bonferroni over the arm pairs
  // within one metric family.
  const int comparisons = static_cast<int>(n_arms * (n_arms - 1) / 2);
  for (const char* metric : metric_names) {
    for (std::size_t a = 0; a < n_arms; ++a) {
      for (std::size_t b = a + 1; b < n_arms; ++b) {
        std::vector<double> diffs;
        for (std::size_t i = 0; i < instances.size(); ++i) {
          if (!keep[i]) continue;
          const auto& ra = report.runs[i * n_arms + a];
          const auto& rb = report.runs[i * n_arms + b];
          diffs.push_back(ra.metric(metric) - rb.metric(metric));
        }
        if (diffs.size() < 2) continue;
        StatResult s;
        s.arm_a = cfg.arms[a].label;
        s.arm_b = cfg.arms[b].label;
        s.metric = metric;
        s.mean_diff = stats::mean(diffs);
        const auto tt = stats::paired_t_test(diffs);
        s.t = tt.t;
        s.p = tt.p;
        s.degenerate = tt.degenerate;
        s.p_bonferroni = stats::bonferroni(tt.p, comparisons);
        const auto d = stats::cohens_d(diffs);
        s.cohens_d = d.d;
        s.d_defined = d.defined;
        std::tie(s.ci_low, s.ci_high) =
            stats::bootstrap_ci_mean(diffs, rng::mix(cfg.master_seed, a * 1315423911u + b));
        report.stats.push_back(std::move(s));
      }
    }
  }

  if (!cfg.out_dir.empty()) write_report(report, cfg.out_dir);
  return report;
}

// ---- presets ----------------------------------------------------------------

namespace {

qaoa::QaoaConfig arm_defaults(sim::MixerSpec::Kind mixer, qaoa::WarmStart init) {
  qaoa::QaoaConfig q;
  q.mixer = mixer;
  q.init = init;
  return q;
}

}  // namespace

ExperimentConfig make_preset(const std::string& id, const std::string& manifest_path,
                             std::uint64_t master_seed) {
  ExperimentConfig cfg;
  cfg.id = id;
  cfg.manifest_path = manifest_path;
  cfg.master_seed = master_seed;
  using Kind = sim::MixerSpec::Kind;
  using qaoa::WarmStart;

  if (id == "E1") {
    // Mixer families plus the X-mixer penalty sweep, all basis warm-started.
    for (const double lambda : {2.0, 5.0, 10.0, 20.0}) {
      ArmSpec arm;
      arm.label = "x_lambda" + std::to_string(static_cast<int>(lambda));
      arm.qaoa = arm_defaults(Kind::x, WarmStart::basis);
      arm.lambda_override = lambda;
      cfg.arms.push_back(arm);
    }
    for (const auto& [label, kind] :
         std::vector<std::pair<std::string, Kind>>{{"xy_primary", Kind::xy_primary},
                                                   {"xy_blocks", Kind::xy_blocks},
                                                   {"domain_wall", Kind::domain_wall}}) {
      ArmSpec arm;
      arm.label = label;
      arm.qaoa = arm_defaults(kind, WarmStart::basis);
      cfg.arms.push_back(arm);
    }
    return cfg;
  }
  if (id == "E2") {
    for (const auto& [label, ws] : std::vector<std::pair<std::string, qaoa::WarmStart>>{
             {"none", WarmStart::none},
             {"basis", WarmStart::basis},
             {"local_superposition", WarmStart::local_superposition}}) {
      ArmSpec arm;
      arm.label = label;
      arm.qaoa = arm_defaults(Kind::xy_blocks, ws);
      cfg.arms.push_back(arm);
    }
    return cfg;
  }
  if (id == "E4") {
    ArmSpec expectation;
    expectation.label = "expectation";
    expectation.qaoa = arm_defaults(Kind::xy_blocks, WarmStart::basis);
    expectation.qaoa.max_steps = 120;
    cfg.arms.push_back(expectation);
    for (const double alpha : {0.05, 0.1, 0.3, 0.5}) {
      ArmSpec arm;
      arm.label = "cvar" + std::to_string(static_cast<int>(alpha * 100 + 0.5));
      arm.qaoa = arm_defaults(Kind::xy_blocks, WarmStart::none);
      arm.qaoa.objective = qaoa::Objective::cvar;
      arm.qaoa.cvar_alpha = alpha;
      arm.qaoa.optimizer = qaoa::OptimizerKind::simplex;
      arm.qaoa.max_steps = 250;
      arm.qaoa.shots = 1024;
      cfg.arms.push_back(arm);
    }
    return cfg;
  }
  if (id == "E5") {
    ArmSpec q;
    q.label = "qaoa";
    q.qaoa = arm_defaults(Kind::xy_blocks, WarmStart::basis);
    cfg.arms.push_back(q);
    ArmSpec g;
    g.label = "greedy";
    g.kind = ArmSpec::Kind::greedy;
    cfg.arms.push_back(g);
    ArmSpec r;
    r.label = "random";
    r.kind = ArmSpec::Kind::random;
    cfg.arms.push_back(r);
    return cfg;
  }
  throw std::invalid_argument("unknown experiment preset '" + id +
                              "' (available: E1, E2, E4, E5)");
}

// ---- declarative configs ------------------------------------------------------

namespace {

sim::MixerSpec::Kind mixer_from_name(const std::string& name) {
  if (name == "x") return sim::MixerSpec::Kind::x;
  if (name == "xy_primary") return sim::MixerSpec::Kind::xy_primary;
  if (name == "xy_blocks") return sim::MixerSpec::Kind::xy_blocks;
  if (name == "domain_wall") return sim::MixerSpec::Kind::domain_wall;
  throw std::invalid_argument("unknown mixer '" + name + "'");
}

qaoa::WarmStart init_from_name(const std::string& name) {
  if (name == "none") return qaoa::WarmStart::none;
  if (name == "basis") return qaoa::WarmStart::basis;
  if (name == "local_superposition") return qaoa::WarmStart::local_superposition;
  throw std::invalid_argument("unknown warm start '" + name + "'");
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("experiment config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.id = j.value("id", "custom");
  cfg.manifest_path = j.value("manifest", "");
  cfg.master_seed = j.value("master_seed", std::uint64_t{42});
  cfg.jobs = j.value("jobs", 1);
  cfg.limit_instances = j.value("limit_instances", 0);
  cfg.out_dir = j.value("out_dir", "");
  if (!j.contains("arms")) throw std::runtime_error("experiment config: no arms");
  for (const auto& a : j.at("arms")) {
    ArmSpec arm;
    arm.label = a.at("label").get<std::string>();
    const std::string kind = a.value("kind", "qaoa");
    if (kind == "greedy") {
      arm.kind = ArmSpec::Kind::greedy;
    } else if (kind == "random") {
      arm.kind = ArmSpec::Kind::random;
    } else if (kind == "qaoa") {
      arm.kind = ArmSpec::Kind::qaoa;
      auto& q = arm.qaoa;
      q.p = a.value("p", q.p);
      if (a.contains("mixer")) q.mixer = mixer_from_name(a.at("mixer").get<std::string>());
      if (a.contains("init")) q.init = init_from_name(a.at("init").get<std::string>());
      q.local_theta = a.value("local_theta", q.local_theta);
      if (a.contains("objective")) {
        const std::string obj = a.at("objective").get<std::string>();
        if (obj == "expectation") q.objective = qaoa::Objective::expectation;
        else if (obj == "cvar") q.objective = qaoa::Objective::cvar;
        else throw std::invalid_argument("unknown objective '" + obj + "'");
      }
      q.cvar_alpha = a.value("cvar_alpha", q.cvar_alpha);
      q.shots = a.value("shots", q.shots);
      q.max_steps = a.value("max_steps", q.max_steps);
      q.early_window = a.value("early_window", q.early_window);
      q.early_threshold = a.value("early_threshold", q.early_threshold);
      if (a.contains("optimizer")) {
        const std::string opt = a.at("optimizer").get<std::string>();
        if (opt == "adam") q.optimizer = qaoa::OptimizerKind::adam;
        else if (opt == "simplex") q.optimizer = qaoa::OptimizerKind::simplex;
        else throw std::invalid_argument("unknown optimizer '" + opt + "'");
      }
      q.adam.lr = a.value("adam_lr", q.adam.lr);
      q.adam.b1 = a.value("adam_b1", q.adam.b1);
      q.adam.b2 = a.value("adam_b2", q.adam.b2);
      q.fd_step = a.value("fd_step", q.fd_step);
      if (a.contains("lambda_override"))
        arm.lambda_override = a.at("lambda_override").get<double>();
    } else {
      throw std::invalid_argument("unknown arm kind '" + kind + "'");
    }
    cfg.arms.push_back(std::move(arm));
  }
  return cfg;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return experiment_config_from_json(buf.str());
}

// ---- persistence ------------------------------------------------------------

namespace {

json run_to_json(const RunRecord& r) {
  json j{{"instance_id", r.instance_id},
         {"arm", r.arm},
         {"seed", r.seed},
         {"final_energy", r.final_energy},
         {"final_expectation", r.final_expectation},
         {"coverage", r.coverage},
         {"feasible_mass", r.feasible_mass},
         {"top_state_feasible", r.top_state_feasible},
         {"decode_fallback", r.decode_fallback},
         {"convergence_steps", r.convergence_steps},
         {"steps_run", r.steps_run},
         {"converged_early", r.converged_early},
         {"decoded_primary", r.decoded_primary},
         {"decoded_followup", r.decoded_followup}};
  if (r.failure) j["failure"] = *r.failure;
  return j;
}

RunRecord run_from_json(const json& j) {
  RunRecord r;
  r.instance_id = j.at("instance_id").get<std::string>();
  r.arm = j.at("arm").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.final_energy = j.at("final_energy").get<double>();
  r.final_expectation = j.at("final_expectation").get<double>();
  r.coverage = j.at("coverage").get<double>();
  r.feasible_mass = j.at("feasible_mass").get<double>();
  r.top_state_feasible = j.at("top_state_feasible").get<bool>();
  r.decode_fallback = j.at("decode_fallback").get<bool>();
  r.convergence_steps = j.at("convergence_steps").get<int>();
  r.steps_run = j.at("steps_run").get<int>();
  r.converged_early = j.at("converged_early").get<bool>();
  r.decoded_primary = j.at("decoded_primary").get<std::string>();
  r.decoded_followup = j.at("decoded_followup").get<std::string>();
  if (j.contains("failure")) r.failure = j.at("failure").get<std::string>();
  return r;
}

json stat_to_json(const StatResult& s) {
  return {{"arm_a", s.arm_a},
          {"arm_b", s.arm_b},
          {"metric", s.metric},
          {"mean_diff", s.mean_diff},
          {"t", s.t},
          {"p", s.p},
          {"p_bonferroni", s.p_bonferroni},
          {"cohens_d", s.cohens_d},
          {"d_defined", s.d_defined},
          {"ci_low", s.ci_low},
          {"ci_high", s.ci_high},
          {"degenerate", s.degenerate}};
}

StatResult stat_from_json(const json& j) {
  StatResult s;
  s.arm_a = j.at("arm_a").get<std::string>();
  s.arm_b = j.at("arm_b").get<std::string>();
  s.metric = j.at("metric").get<std::string>();
  s.mean_diff = j.at("mean_diff").get<double>();
  s.t = j.at("t").get<double>();
  s.p = j.at("p").get<double>();
  s.p_bonferroni = j.at("p_bonferroni").get<double>();
  s.cohens_d = j.at("cohens_d").get<double>();
  s.d_defined = j.at("d_defined").get<bool>();
  s.ci_low = j.at("ci_low").get<double>();
  s.ci_high = j.at("ci_high").get<double>();
  s.degenerate = j.at("degenerate").get<bool>();
  return s;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  json j;
  j["format"] = "qkrd-report";
  j["version"] = 1;
  j["id"] = report.id;
  j["master_seed"] = report.master_seed;
  j["manifest_path"] = report.manifest_path;
  j["dataset_config_hash"] = report.dataset_config_hash;
  j["arm_labels"] = report.arm_labels;
  j["instance_ids"] = report.instance_ids;
  json runs = json::array();
  for (const auto& r : report.runs) runs.push_back(run_to_json(r));
  j["runs"] = std::move(runs);
  json stats_json = json::array();
  for (const auto& s : report.stats) stats_json.push_back(stat_to_json(s));
  j["stats"] = std::move(stats_json);
  j["failures"] = report.failures;
  return j.dump(2);
}

ExperimentReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("report: invalid JSON: ") + e.what());
  }
  if (j.value("format", "") != "qkrd-report")
    throw std::runtime_error("report: unknown format tag");
  ExperimentReport report;
  report.id = j.at("id").get<std::string>();
  report.master_seed = j.at("master_seed").get<std::uint64_t>();
  report.manifest_path = j.at("manifest_path").get<std::string>();
  report.dataset_config_hash = j.at("dataset_config_hash").get<std::string>();
  report.arm_labels = j.at("arm_labels").get<std::vector<std::string>>();
  report.instance_ids = j.at("instance_ids").get<std::vector<std::string>>();
  for (const auto& r : j.at("runs")) report.runs.push_back(run_from_json(r));
  for (const auto& s : j.at("stats")) report.stats.push_back(stat_from_json(s));
  report.failures = j.at("failures").get<std::vector<std::string>>();
  return report;
}

void write_report(const ExperimentReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw std::runtime_error("cannot write report.json in " + out_dir);
    out << report_to_json(report) << '\n';
  }
  {
    std::ofstream out(dir / "runs.jsonl");
    if (!out) throw std::runtime_error("cannot write runs.jsonl in " + out_dir);
    for (const auto& r : report.runs) out << run_to_json(r).dump() << '\n';
  }
}

ExperimentReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

}  // namespace qkrd::harness
