#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace qkrd::stats {

double mean(const std::vector<double>& xs);
double sample_sd(const std::vector<double>& xs);  // n-1 denominator
double median(std::vector<double> xs);

// Regularized incomplete beta I_x(a, b) by Lentz continued fractions.
double incomplete_beta(double a, double b, double x);

// Two-sided p-value of Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, int dof);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  int dof = 0;
  bool degenerate = false;  // zero-variance diffs, boundary convention used
};

// Paired t-test on per-instance differences. Zero variance maps to p=1 for
// zero mean and p=0 otherwise, flagged.
TTestResult paired_t_test(const std::vector<double>& diffs);

struct CohensD {
  double d = 0.0;
  bool defined = true;  // false when sd(diffs) == 0 with nonzero mean
};

// Paired effect size: mean(diffs) / sd(diffs).
CohensD cohens_d(const std::vector<double>& diffs);

using Statistic = std::function<double(const std::vector<double>&)>;

// Percentile bootstrap (2.5/97.5) of `stat`, deterministic per seed.
std::pair<double, double> bootstrap_ci(const std::vector<double>& values,
                                       const Statistic& stat, int resamples,
                                       std::uint64_t seed);

inline std::pair<double, double> bootstrap_ci_mean(const std::vector<double>& values,
                                                   std::uint64_t seed,
                                                   int resamples = 10000) {
  return bootstrap_ci(values, mean, resamples, seed);
}

inline double bonferroni(double p, int comparisons) {
  const double adj = p * comparisons;
  return adj > 1.0 ? 1.0 : adj;
}

}  // namespace qkrd::stats
