#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "qkrd/harness.hpp"

namespace qkrd::harness {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::map<std::string, std::vector<std::string>>& figure_metrics() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"fig2", {"convergence_steps"}},
      {"fig3", {"convergence_steps", "final_energy"}},
      {"fig4", {"final_energy"}},
      {"fig5", {"coverage"}},
  };
  return table;
}

void write_metric_csv(const ExperimentReport& report, const std::string& metric,
                      const std::filesystem::path& dir, const std::string& stem) {
  {
    std::ofstream out(dir / (stem + ".csv"));
    if (!out) throw std::runtime_error("plotdata: cannot write in " + dir.string());
    out << "arm,instance_id," << metric << "\n";
    for (const auto& arm : report.arm_labels)
      for (const auto& run : report.runs) {
        if (run.arm != arm || run.failure) continue;
        out << arm << ',' << run.instance_id << ',' << fmt(run.metric(metric)) << '\n';
      }
  }
  {
    std::ofstream out(dir / (stem + "_summary.csv"));
    out << "arm,mean,sd,ci_low,ci_high\n";
    for (const auto& arm : report.arm_labels) {
      const auto values = report.metric_values(arm, metric);
      if (values.empty()) continue;
      const double m = stats::mean(values);
      const double sd = values.size() > 1 ? stats::sample_sd(values) : 0.0;
      const auto [lo, hi] = stats::bootstrap_ci_mean(values, report.master_seed);
      out << arm << ',' << fmt(m) << ',' << fmt(sd) << ',' << fmt(lo) << ',' << fmt(hi)
          << '\n';
    }
  }
}

}  // namespace

void emit_plot_data(const ExperimentReport& report, const std::string& figure_id,
                    const std::string& out_dir) {
  const auto& table = figure_metrics();
  const auto it = table.find(figure_id);
  if (it == table.end()) {
    std::string available;
    for (const auto& [id, metrics] : table) {
      if (!available.empty()) available += ", ";
      available += id;
    }
    throw std::invalid_argument("unknown figure id '" + figure_id +
                                "' (available: " + available + ")");
  }
  std::filesystem::create_directories(out_dir);
  for (const auto& metric : it->second)
    write_metric_csv(report, metric, out_dir, figure_id + "_" + metric);
}

std::string stats_table(const ExperimentReport& report) {
  std::string out;
  out += "experiment " + report.id + "  (" +
         std::to_string(report.instance_ids.size()) + " paired instances)\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-18s %-22s %-22s %12s %10s %12s %12s %9s\n",
                "metric", "arm_a", "arm_b", "mean_diff", "t", "p", "p_bonf", "d");
  out += line;
  for (const auto& s : report.stats) {
    std::snprintf(line, sizeof line,
                  "%-18s %-22s %-22s %12.4g %10.3f %12.3e %12.3e %9.3f%s\n",
                  s.metric.c_str(), s.arm_a.c_str(), s.arm_b.c_str(), s.mean_diff, s.t,
                  s.p, s.p_bonferroni, s.cohens_d,
                  s.degenerate ? "  [degenerate]" : (s.d_defined ? "" : "  [d undef]"));
    out += line;
  }
  if (!report.failures.empty()) {
    out += "failures:\n";
    for (const auto& f : report.failures) out += "  " + f + "\n";
  }
  return out;
}

}  // namespace qkrd::harness
