#include "qkrd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkrd/rng.hpp"

namespace qkrd::stats {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("sd needs at least two values");
  const double m = mean(xs);
  double acc = 0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr int max_iter = 300;
  constexpr double eps = 3e-14;
  constexpr double fpmin = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, int dof) {
  if (dof < 1) throw std::invalid_argument("student t: dof must be >= 1");
  const double x = dof / (dof + t * t);
  return incomplete_beta(0.5 * dof, 0.5, x);
}

TTestResult paired_t_test(const std::vector<double>& diffs) {
  if (diffs.size() < 2)
    throw std::invalid_argument("paired_t_test: need at least two pairs");
  TTestResult r;
  r.dof = static_cast<int>(diffs.size()) - 1;
  const double m = mean(diffs);
  const double sd = sample_sd(diffs);
  if (sd == 0.0) {
    r.degenerate = true;
    r.t = m == 0.0 ? 0.0 : std::copysign(HUGE_VAL, m);
    r.p = m == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = m / (sd / std::sqrt(static_cast<double>(diffs.size())));
  r.p = student_t_two_sided_p(r.t, r.dof);
  return r;
}

CohensD cohens_d(const std::vector<double>& diffs) {
  CohensD r;
  const double sd = sample_sd(diffs);
  const double m = mean(diffs);
  if (sd == 0.0) {
    r.defined = m == 0.0;
    r.d = 0.0;
    return r;
  }
  r.d = m / sd;
  return r;
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& values,
                                       const Statistic& stat, int resamples,
                                       std::uint64_t seed) {
  if (values.empty()) throw std::invalid_argument("bootstrap_ci: empty sample");
  if (resamples < 2) throw std::invalid_argument("bootstrap_ci: resamples too small");
  rng::Philox gen(seed, 0xb007);
  const std::size_t n = values.size();
  std::vector<double> stats(resamples);
  std::vector<double> draw(n);
  for (int r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < n; ++i) draw[i] = values[gen.below(n)];
    stats[r] = stat(draw);
  }
  std::sort(stats.begin(), stats.end());
  // Linear-interpolation percentiles at 2.5 and 97.5.
  const auto pct = [&](double q) {
    const double pos = q * (resamples - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= stats.size()) return stats.back();
    return stats[lo] * (1 - frac) + stats[lo + 1] * frac;
  };
  return {pct(0.025), pct(0.975)};
}

}  // namespace qkrd::stats
