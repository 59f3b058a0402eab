#include <doctest.h>

#include <cmath>

#include "qkrd/rng.hpp"
#include "qkrd/stats.hpp"

using namespace qkrd;
using namespace qkrd::stats;

TEST_SUITE_BEGIN("stats");

TEST_CASE("paired t on [1,2,3]: closed form") {
  const auto r = paired_t_test({1, 2, 3});
  CHECK(r.t == doctest::Approx(3.4641).epsilon(1e-4));
  CHECK(r.dof == 2);
  CHECK(!r.degenerate);
}

TEST_CASE("symmetric differences give t=0, p=1") {
  const auto r = paired_t_test({-2, -1, 0, 1, 2});
  CHECK(r.t == doctest::Approx(0.0));
  CHECK(r.p == doctest::Approx(1.0));
}

TEST_CASE("zero-variance boundary conventions are flagged") {
  const auto zero_mean = paired_t_test({0, 0, 0});
  CHECK(zero_mean.degenerate);
  CHECK(zero_mean.p == 1.0);
  const auto nonzero = paired_t_test({2, 2, 2});
  CHECK(nonzero.degenerate);
  CHECK(nonzero.p == 0.0);
}

TEST_CASE("p-values agree with tabulated critical points") {
  // t_{0.975, 10} = 2.228: two-sided p = 0.05 there.
  CHECK(student_t_two_sided_p(2.228, 10) == doctest::Approx(0.05).epsilon(2e-3));
  // t_{0.975, 30} = 2.042.
  CHECK(student_t_two_sided_p(2.042, 30) == doctest::Approx(0.05).epsilon(2e-3));
  // Large-dof t approaches the normal: p(1.96, 1000) ~ 0.05.
  CHECK(student_t_two_sided_p(1.96, 1000) == doctest::Approx(0.05).epsilon(2e-2));
}

TEST_CASE("null-distribution sanity: p is roughly uniform under H0") {
  rng::Philox gen(2024, 0);
  int below_half = 0, below_tenth = 0;
  const int trials = 400;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> diffs(30);
    for (double& d : diffs) {
      // Sum of 12 uniforms - 6: unit-variance, zero-mean approximation.
      double s = 0;
      for (int i = 0; i < 12; ++i) s += gen.uniform();
      d = s - 6.0;
    }
    const double p = paired_t_test(diffs).p;
    below_half += p < 0.5;
    below_tenth += p < 0.1;
  }
  CHECK(std::abs(below_half - trials / 2) < 5 * std::sqrt(trials * 0.25));
  CHECK(std::abs(below_tenth - trials / 10) < 5 * std::sqrt(trials * 0.09));
}

TEST_CASE("cohen's d basics") {
  const auto r = cohens_d({1, 2, 3});
  CHECK(r.d == doctest::Approx(2.0));
  CHECK(r.defined);

  const auto neg = cohens_d({-1, -2, -3});
  CHECK(neg.d == doctest::Approx(-2.0));

  const auto flat = cohens_d({4, 4, 4});
  CHECK(!flat.defined);
}

TEST_CASE("bootstrap: degenerate data, coverage of the sample mean, dual implementation") {
  const auto [lo, hi] = bootstrap_ci_mean({5, 5, 5, 5}, 1);
  CHECK(lo == doctest::Approx(5.0));
  CHECK(hi == doctest::Approx(5.0));

  std::vector<double> zeros_ones;
  for (int i = 0; i < 30; ++i) zeros_ones.push_back(i % 2 ? 1.0 : 0.0);
  const auto [l2, h2] = bootstrap_ci_mean(zeros_ones, 7);
  CHECK(l2 <= 0.5);
  CHECK(h2 >= 0.5);
  CHECK(l2 < h2);

  // Independent re-implementation with the same resampling stream.
  const std::vector<double> xs = {0.3, -1.2, 2.4, 0.9, -0.5, 1.8, 0.1};
  const int resamples = 2000;
  rng::Philox gen(99, 0xb007);
  std::vector<double> means(resamples);
  for (int r = 0; r < resamples; ++r) {
    double s = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += xs[gen.below(xs.size())];
    means[r] = s / static_cast<double>(xs.size());
  }
  std::sort(means.begin(), means.end());
  const auto interp = [&](double q) {
    const double pos = q * (resamples - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return means[i] * (1 - f) + means[i + 1] * f;
  };
  const auto [l3, h3] = bootstrap_ci(xs, mean, resamples, 99);
  CHECK(l3 == doctest::Approx(interp(0.025)).epsilon(1e-12));
  CHECK(h3 == doctest::Approx(interp(0.975)).epsilon(1e-12));

  // Determinism per seed.
  const auto again = bootstrap_ci(xs, mean, resamples, 99);
  CHECK(again.first == l3);
  CHECK(again.second == h3);
}

TEST_CASE("bonferroni is monotone and capped") {
  CHECK(bonferroni(0.01, 6) == doctest::Approx(0.06));
  CHECK(bonferroni(0.3, 6) == 1.0);
  for (double p : {0.001, 0.02, 0.5}) CHECK(bonferroni(p, 4) >= p);
}

TEST_SUITE_END();
