#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qkrd/baselines.hpp"
#include "qkrd/harness.hpp"

using namespace qkrd;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_fen_lines(const std::string& path) {
  std::vector<std::string> fens;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    fens.push_back(line);
  }
  return fens;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QKRD benchmark toolkit: chess-derived QUBO instances and QAOA experiments"};
  app.require_subcommand(1);

  // ---- gen ------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "build an instance dataset from PGN/FEN input");
  std::vector<std::string> gen_pgn;
  std::string gen_fen_file, gen_config, gen_out;
  std::uint64_t gen_seed = 0;
  int gen_limit = 0, gen_k = -1, gen_f = -1, gen_roi = -1;
  gen->add_option("--pgn", gen_pgn, "PGN input file(s)");
  gen->add_option("--fen", gen_fen_file, "file with one FEN per line");
  gen->add_option("--config", gen_config, "instance config JSON file");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--seed", gen_seed, "seed recorded in the manifest");
  gen->add_option("--limit", gen_limit, "stop after N instances");
  gen->add_option("--k", gen_k, "candidate count override");
  gen->add_option("--f", gen_f, "follow-ups per candidate override");
  gen->add_option("--roi", gen_roi, "ROI window size override");

  // ---- run ------------------------------------------------------------------
  auto* run = app.add_subcommand("run", "run an experiment and write its report");
  std::string run_config, run_preset, run_manifest, run_out;
  std::uint64_t run_seed = 42;
  int run_jobs = 1, run_limit = 0;
  run->add_option("--config", run_config, "experiment config JSON file");
  run->add_option("--preset", run_preset, "built-in experiment id (E1, E2, E4, E5)");
  run->add_option("--manifest", run_manifest, "dataset manifest path");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--seed", run_seed, "master seed");
  run->add_option("--jobs", run_jobs, "parallel workers");
  run->add_option("--limit", run_limit, "use only the first N instances");

  // ---- stats ----------------------------------------------------------------
  auto* stats_cmd = app.add_subcommand("stats", "print the pairwise test table of a report");
  std::string stats_report;
  stats_cmd->add_option("--report", stats_report, "report.json path")->required();

  // ---- plotdata -------------------------------------------------------------
  auto* plot = app.add_subcommand("plotdata", "emit per-figure CSV files from a report");
  std::string plot_report, plot_figure, plot_out;
  plot->add_option("--report", plot_report, "report.json path")->required();
  plot->add_option("--figure", plot_figure, "figure id (fig2..fig5)")->required();
  plot->add_option("--out", plot_out, "output directory")->required();

  // ---- oracle ---------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "brute-force minimum of one instance");
  std::string oracle_instance;
  double oracle_lambda = -1;
  oracle->add_option("--instance", oracle_instance, "instance JSON path")->required();
  oracle->add_option("--lambda", oracle_lambda, "penalty override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      qubo::GenOptions options;
      if (!gen_config.empty())
        options.config = qubo::instance_config_from_json(slurp(gen_config));
      if (gen_k > 0) options.config.k = gen_k;
      if (gen_f >= 0) options.config.f = gen_f;
      if (gen_roi > 0) options.config.roi_size = gen_roi;
      options.config.validate();
      options.seed = gen_seed;
      options.limit = gen_limit;
      std::vector<std::string> pgn_texts;
      for (const auto& path : gen_pgn) pgn_texts.push_back(slurp(path));
      std::vector<std::string> fens;
      if (!gen_fen_file.empty()) fens = read_fen_lines(gen_fen_file);
      if (pgn_texts.empty() && fens.empty())
        throw std::runtime_error("gen: need --pgn and/or --fen input");
      const auto stats = qubo::generate_dataset(pgn_texts, fens, options, gen_out);
      std::cout << "games " << stats.games << ", positions " << stats.positions_scanned
                << ", filter-passed " << stats.filter_passed << ", generated "
                << stats.generated << ", rejected " << stats.rejected << ", duplicates "
                << stats.duplicates << "\n"
                << "manifest: " << gen_out << "/manifest.json\n";
      return 0;
    }
    if (*run) {
      harness::ExperimentConfig cfg;
      if (!run_config.empty()) {
        cfg = harness::read_experiment_config(run_config);
      } else if (!run_preset.empty()) {
        if (run_manifest.empty())
          throw std::runtime_error("run: --preset needs --manifest");
        cfg = harness::make_preset(run_preset, run_manifest, run_seed);
      } else {
        throw std::runtime_error("run: need --config or --preset");
      }
      if (!run_manifest.empty()) cfg.manifest_path = run_manifest;
      if (run->count("--seed")) cfg.master_seed = run_seed;
      if (!run_out.empty()) cfg.out_dir = run_out;
      cfg.jobs = run_jobs;
      if (run_limit > 0) cfg.limit_instances = run_limit;
      const auto report = harness::run_experiment(cfg);
      std::cout << harness::stats_table(report);
      if (!cfg.out_dir.empty())
        std::cout << "report: " << cfg.out_dir << "/report.json\n";
      return 0;
    }
    if (*stats_cmd) {
      std::cout << harness::stats_table(harness::read_report(stats_report));
      return 0;
    }
    if (*plot) {
      harness::emit_plot_data(harness::read_report(plot_report), plot_figure, plot_out);
      std::cout << "wrote " << plot_figure << " CSVs to " << plot_out << "\n";
      return 0;
    }
    if (*oracle) {
      const auto inst = qubo::read_instance(oracle_instance);
      qubo::QuboModel model = inst.qubo;
      qubo::VariableLayout layout = inst.layout;
      if (oracle_lambda > 0) {
        qubo::InstanceConfig icfg = inst.config;
        icfg.weights.lambda_onehot = oracle_lambda;
        icfg.weights.lambda_gate = oracle_lambda;
        std::tie(model, layout) = qubo::build_qubo(inst.candidates, inst.followups, icfg);
      }
      const auto r = baselines::brute_force_min(model, layout);
      const auto sel = layout.decode(r.feasible_bits);
      std::cout << "global minimum:   energy " << r.best_energy << "  bits "
                << r.best_bits << (layout.is_feasible(r.best_bits) ? "  (feasible)" : "  (infeasible)")
                << "\n";
      std::cout << "feasible minimum: energy " << r.feasible_energy << "  bits "
                << r.feasible_bits;
      if (sel) {
        std::cout << "  move " << inst.candidates[sel->primary].move.notation();
        if (sel->followup >= 0)
          std::cout << " + " << inst.followups[sel->primary][sel->followup].move.notation();
      }
      std::cout << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
