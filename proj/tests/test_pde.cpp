#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "finestruct/generators.hpp"
#include "finestruct/pde.hpp"
#include "finestruct/random.hpp"

using namespace finestruct;

namespace {

// Brute force: materialize every pairwise |x_i - x_j|, sort, interpolate.
double brute_force_distance_quantile(const std::vector<double>& v, double p, bool positive_only = false) {
  std::vector<double> d;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const double dist = std::fabs(v[i] - v[j]);
      if (!positive_only || dist > 0) d.push_back(dist);
    }
  std::sort(d.begin(), d.end());
  const double h = static_cast<double>(d.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= d.size()) return d.back();
  return d[lo] + (h - lo) * (d[lo + 1] - d[lo]);
}

double brute_force_count(const std::vector<double>& v, double g, double r) {
  double c = 0;
  for (double x : v)
    if (std::fabs(x - g) <= r) c += 1;
  return c;
}

}  // namespace

TEST(ParetoRadius, SpecExamples) {
  const PdeConfig cfg;
  EXPECT_EQ(pareto_radius(std::vector<double>{0, 10}, cfg, 1), 10.0);
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(i);
  EXPECT_EQ(pareto_radius(grid, cfg, 1), 1.0);
  EXPECT_EQ(brute_force_distance_quantile(grid, 0.18), 1.0);
  try {
    pareto_radius(std::vector<double>{3, 3, 3}, cfg, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConstantFeature);
  }
  EXPECT_THROW(pareto_radius(std::vector<double>{1}, cfg, 1), Error);
}

TEST(ParetoRadius, MatchesBruteForce) {
  Rng rng(101);
  const PdeConfig cfg;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(250);
    std::vector<double> v(n);
    for (double& x : v) x = trial % 2 ? rng.normal(5.0, 3.0) : std::round(rng.normal() * 20.0) / 4.0;
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) continue;
    double expected = brute_force_distance_quantile(v, cfg.pareto_quantile);
    if (expected == 0.0) expected = brute_force_distance_quantile(v, cfg.pareto_quantile, true);
    ASSERT_EQ(pareto_radius(v, cfg, 7), expected) << "n=" << n;
  }
}

TEST(ParetoRadius, HeavyTiesEscalateToPositiveDistances) {
  const std::vector<double> v{0, 0, 0, 0, 0, 0, 0, 0, 1, 2};
  EXPECT_EQ(brute_force_distance_quantile(v, 0.18), 0.0);
  const double r = pareto_radius(v, PdeConfig{}, 1);
  EXPECT_GT(r, 0.0);
  EXPECT_EQ(r, brute_force_distance_quantile(v, 0.18, true));
}

TEST(ParetoRadius, LargeSampleShrink) {
  Rng rng(5);
  std::vector<double> v(2048);
  for (double& x : v) x = rng.normal();
  PdeConfig cfg;
  cfg.distance_sample_cap = 5000;
  const double base = brute_force_distance_quantile(v, cfg.pareto_quantile);
  EXPECT_NEAR(pareto_radius(v, cfg, 1), base * std::pow(2.0, -0.2), 1e-15);
}

TEST(ParetoRadius, SubsampledDistancesAreSeeded) {
  Rng rng(6);
  std::vector<double> v(3000);
  for (double& x : v) x = rng.normal();
  PdeConfig cfg;
  cfg.distance_sample_cap = 500;
  cfg.large_n_threshold = 100000;
  const double a = pareto_radius(v, cfg, 1);
  EXPECT_EQ(a, pareto_radius(v, cfg, 1));
  const double full = brute_force_distance_quantile(v, cfg.pareto_quantile);
  EXPECT_NEAR(a, full, 0.1 * full);
}

TEST(ParetoRadius, ConfigValidation) {
  PdeConfig cfg;
  cfg.pareto_quantile = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.grid_min = 100;
  cfg.grid_max = 50;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(PdeEstimate, KernelsSpanDataRangeExactly) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + rng.below(500));
    for (double& x : v) x = rng.normal(rng.uniform(-100, 100), rng.uniform(0.01, 50));
    const auto c = pde_estimate(v, PdeConfig{}, trial);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    ASSERT_EQ(c.kernels.front(), *lo);
    ASSERT_EQ(c.kernels.back(), *hi);
    ASSERT_GE(c.kernels.size(), 64u);
    ASSERT_LE(c.kernels.size(), 2048u);
    ASSERT_TRUE(std::adjacent_find(c.kernels.begin(), c.kernels.end(), std::greater_equal<>()) == c.kernels.end());
  }
}

TEST(PdeEstimate, UnitIntegralOnRandomInputs) {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v(2 + rng.below(300));
    const int kind = trial % 3;
    for (double& x : v) {
      if (kind == 0) x = rng.normal();
      else if (kind == 1) x = std::exp(rng.normal(0, 2));
      else x = std::round(rng.uniform(0, 5));
    }
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) continue;
    const auto c = pde_estimate(v, PdeConfig{}, trial);
    ASSERT_NEAR(trapezoid(c.kernels, c.densities), 1.0, 1e-9);
    for (double d : c.densities) ASSERT_GE(d, 0.0);
  }
}

TEST(PdeEstimate, DensityIsNormalizedNeighborCount) {
  const std::vector<double> v{0.3, 1.1, 1.2, 2.0, 2.05, 2.9, 4.4, 5.0};
  const auto c = pde_estimate(v, PdeConfig{}, 1);
  std::vector<double> counts;
  for (double g : c.kernels) counts.push_back(brute_force_count(v, g, c.radius));
  const double area = trapezoid(c.kernels, counts);
  for (std::size_t i = 0; i < counts.size(); ++i) EXPECT_NEAR(c.densities[i], counts[i] / area, 1e-12);
}

TEST(PdeEstimate, GridSizeRule) {
  const std::vector<double> v{0, 10};
  // r = 10, spacing r/4 = 2.5 -> ceil(10 / 2.5) + 1 = 5, clamped up to 64.
  EXPECT_EQ(pde_estimate(v, PdeConfig{}, 1).kernels.size(), 64u);
  PdeConfig cfg;
  cfg.grid_min = 2;
  EXPECT_EQ(pde_estimate(v, cfg, 1).kernels.size(), 5u);
}

TEST(PdeEstimate, ClippedSampleStaysInsideClipBand) {
  auto f = sample_gauss_mixture(5000, GaussMixSpec{{{1.0, 4000, 900}}}, 3);
  for (double& x : f.values) x = std::clamp(x, 1800.0, 6000.0);
  const auto c = pde_estimate(f.values, PdeConfig{}, 1);
  EXPECT_EQ(c.kernels.front(), 1800.0);
  EXPECT_EQ(c.kernels.back(), 6000.0);
}

TEST(PdeEstimate, EvenGridOnIntervalIsFlat) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -2.0 + 4.0 * static_cast<double>(i) / 999.0;
  const auto c = pde_estimate(v, PdeConfig{}, 1);
  int interior = 0;
  for (std::size_t i = 0; i < c.kernels.size(); ++i) {
    if (c.kernels[i] - c.kernels.front() <= c.radius || c.kernels.back() - c.kernels[i] <= c.radius) continue;
    ++interior;
    EXPECT_NEAR(c.densities[i], 0.25, 0.025) << c.kernels[i];
  }
  EXPECT_GT(interior, 10);
}

TEST(PdeEstimate, TranslationScaleEquivariance) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(50 + rng.below(400)), w;
    for (double& x : v) x = rng.normal();
    const double a = rng.uniform(0.1, 10.0), b = rng.uniform(-50, 50);
    for (double x : v) w.push_back(a * x + b);
    const auto c = pde_estimate(v, PdeConfig{}, 9);
    const auto d = pde_estimate(w, PdeConfig{}, 9);
    ASSERT_EQ(c.kernels.size(), d.kernels.size());
    EXPECT_NEAR(d.radius, a * c.radius, 1e-9 * a * c.radius);
    for (std::size_t i = 0; i < c.kernels.size(); ++i) {
      EXPECT_NEAR(d.kernels[i], a * c.kernels[i] + b, 1e-9 * (1 + std::fabs(d.kernels[i])));
      EXPECT_NEAR(d.densities[i], c.densities[i] / a, 1e-9 * (1 + c.densities[i] / a));
    }
  }
}

TEST(PdeEstimate, Deterministic) {
  Rng rng(3);
  std::vector<double> v(7000);
  for (double& x : v) x = rng.normal();
  const auto a = pde_estimate(v, PdeConfig{}, 5);
  const auto b = pde_estimate(v, PdeConfig{}, 5);
  EXPECT_EQ(a.kernels, b.kernels);
  EXPECT_EQ(a.densities, b.densities);
  EXPECT_EQ(a.radius, b.radius);
}

TEST(NeighborhoodFraction, Edges) {
  const std::vector<double> v{0, 1, 2.5, 7};
  EXPECT_EQ(neighborhood_fraction(v, 7.0), 1.0);
  EXPECT_EQ(neighborhood_fraction(v, 100.0), 1.0);
  EXPECT_EQ(neighborhood_fraction(v, 0.0), 0.25);
  EXPECT_THROW(neighborhood_fraction(std::vector<double>{}, 1.0), Error);
}

TEST(NeighborhoodFraction, ParetoRadiusHoldsAboutAFifth) {
  std::vector<double> fractions;
  for (int s = 0; s < 50; ++s) {
    const auto f = sample_gauss_mixture(1000, GaussMixSpec{{{1.0, 0.0, 1.0}}}, derive_seed(99, s));
    fractions.push_back(neighborhood_fraction(f.values, pareto_radius(f.values, PdeConfig{}, s)));
  }
  std::sort(fractions.begin(), fractions.end());
  const double median = 0.5 * (fractions[24] + fractions[25]);
  EXPECT_GE(median, 0.15);
  EXPECT_LE(median, 0.25);
}
