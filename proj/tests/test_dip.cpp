#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "finestruct/hypothesis.hpp"
#include "finestruct/random.hpp"

using namespace finestruct;

namespace {

struct DipCase {
  std::vector<double> values;
  double dip;
};

// Frozen output of tests/oracles/dip_lp_oracle.py: the dip as the optimum of a
// linear program over unimodal piecewise-linear CDFs, minimized over the
// position of the peak segment. Independent of the GCM/LCM iteration.
const std::vector<DipCase> kLpOracle = {
    {{0.0, 1.0}, 0.250000000000},
    {{1.0, 2.0, 3.0, 4.0, 5.0}, 0.100000000000},
    {{0.0, 0.1, 0.2, 5.0, 5.1, 5.2}, 0.240000000000},
    {{0.0, 1.0, 1.5, 1.7, 1.8, 2.5, 4.0}, 0.071428571429},
    {{0.999871, 0.586661, 0.835101, 0.265712, 0.112481, 0.786025, 0.519942, 0.936264, 0.644487}, 0.088503953157},
    {{-1.951474, -0.158413, 3.268715, 4.409695, 4.442442}, 0.131302832139},
    {{0.382291, 4.280936, 0.816686}, 0.166666666667},
    {{0.156874, 0.933799, 0.64633, 0.128105, 0.922191, 0.897957, 0.345653, 0.885484, 0.278395, 0.693479, 0.054588, 0.321867, 0.295041}, 0.134888929986},
    {{0.225161, 1.696556, -1.962054, 0.874258, -1.023652, -0.868647, -0.018363, 2.489441, 2.805419, 3.494458, 3.677516, 2.096321, 3.126369, 3.854086, 3.868072}, 0.057169537526},
    {{1.570543, 1.863139, 0.486385, 1.439315, 0.235987, 0.183104, 0.057333, 0.063587, 2.642561, 2.340038, 0.778723, 0.490336, 5.046708, 1.538403, 0.249291}, 0.083802116940},
    {{0.092127, 0.780394, 0.501215, 0.380679, 0.726234, 0.555656, 0.797641, 0.828136, 0.291113}, 0.087116508333},
    {{-1.109162, 2.185262, -0.048927, -0.605942, 0.600149, -0.488577, 4.627157, 2.798601, 4.725358, 2.736126, 4.375733, 3.786775}, 0.100239639767},
    {{0.055336, 1.747763, 0.254537, 0.080507, 0.05836, 0.876534}, 0.083333333333},
    {{0.225658, 0.245107, 0.811621, 0.644981, 0.410484, 0.69692, 0.562889, 0.109383, 0.867994, 0.51548}, 0.089933993969},
    {{1.812117, 0.202991, 3.499777, 2.549086}, 0.125000000000},
    {{0.136552, 1.423738, 1.399947, 0.047039, 2.149204, 2.256093, 1.591877}, 0.133405227850},
    {{0.378493, 0.210999, 0.946857, 0.308929}, 0.125000000000},
    {{0.975257, -1.063533, -0.699719, 2.750089, 5.180756, 3.81062}, 0.112218216499},
    {{0.380812, 1.740261, 0.330527, 0.979482, 0.227971, 0.074488, 1.680839, 1.14847, 2.11439, 0.229989, 0.263146, 0.069471, 0.352843}, 0.074488231012},
    {{0.29491, 0.067685, 0.514207, 0.274361, 0.809146, 0.605042, 0.848115, 0.969607, 0.581953, 0.909906}, 0.103803159297},
    {{0.195294, 1.013168, 5.460168, 4.049231}, 0.170680402519},
    {{0.143213, 1.405954, 1.392639, 0.083576, 1.685892, 0.231035}, 0.199607933976},
    {{0.704908, 0.710119, 0.941762, 0.922753, 0.699369, 0.028354, 0.207804, 0.145202, 0.108853}, 0.162793181474},
    {{-0.21626, -0.027445, 0.792205, 3.752227, 2.941783, 5.150392, 4.385599}, 0.140922163931},
    {{0.407497, 0.36217, 0.180741, 0.605556, 0.837826, 0.350792}, 0.083333333333},
    {{0.16779, 0.421209, 0.877552, 0.101355, 0.078764, 0.871766, 0.99774, 0.867645, 0.191422, 0.180179, 0.856077, 0.798498, 0.053847, 0.781911}, 0.167045705166},
    {{0.628267, 0.153865, 5.179181, 4.38987}, 0.206639973860},
    {{1.062016, 1.609517, 2.408305, 2.360043, 0.873767, 1.557778}, 0.156596827527},
};

}  // namespace

TEST(Dip, SpecExamples) {
  EXPECT_DOUBLE_EQ(dip_statistic(std::vector<double>{0, 1}), 0.25);
  EXPECT_DOUBLE_EQ(dip_statistic(std::vector<double>{1, 2, 3, 4, 5}), 0.1);
}

TEST(Dip, MatchesLinearProgramOracle) {
  for (const auto& c : kLpOracle) {
    EXPECT_NEAR(dip_statistic(c.values), c.dip, 1e-8) << "n=" << c.values.size();
  }
}

TEST(Dip, TooFewPoints) {
  try {
    dip_statistic(std::vector<double>{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooFewPoints);
  }
}

TEST(Dip, LowerBoundAttainedOnEvenGrids) {
  for (std::size_t n = 2; n <= 50; ++n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
    EXPECT_DOUBLE_EQ(dip_statistic(v), 1.0 / (2.0 * static_cast<double>(n))) << n;
  }
}

TEST(Dip, WithinAnalyticBounds) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(300);
    std::vector<double> v(n);
    const int kind = trial % 3;
    for (double& x : v) {
      if (kind == 0) x = rng.uniform();
      else if (kind == 1) x = rng.normal() + (rng.uniform() < 0.5 ? 0.0 : 6.0);
      else x = std::round(rng.normal() * 2.0);  // ties
    }
    const double d = dip_statistic(v);
    ASSERT_GE(d, 1.0 / (2.0 * static_cast<double>(n)) - 1e-15);
    ASSERT_LE(d, 0.25 + 1e-15);
  }
}

TEST(Dip, ConstantDataSitsAtTheLowerBound) {
  EXPECT_DOUBLE_EQ(dip_statistic(std::vector<double>(8, 3.0)), 1.0 / 16.0);
}

TEST(Dip, AffineInvariance) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + rng.below(400);
    std::vector<double> v(n), a(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = rng.normal() + (i % 3 == 0 ? 3.0 : 0.0);
      a[i] = 2.5 * v[i] + 7.0;
    }
    const double d = dip_statistic(v);
    EXPECT_NEAR(dip_statistic(a), d, 1e-12);
    // Power-of-two scaling is exact in floating point; mirroring only up to rounding.
    std::vector<double> m(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = 4.0 * v[i];
      r[i] = -v[i];
    }
    EXPECT_EQ(dip_statistic(m), d);
    EXPECT_NEAR(dip_statistic(r), d, 1e-12);
  }
}

TEST(Dip, DependsOnSpacingNotOnlyOnRanks) {
  // Same ranks, different spacing: a monotone but non-affine map changes the dip.
  EXPECT_NEAR(dip_statistic(std::vector<double>{0, 0.1, 0.2, 5, 5.1, 5.2}), 0.24, 1e-12);
  EXPECT_DOUBLE_EQ(dip_statistic(std::vector<double>{0, 1, 2, 3, 4, 5}), 1.0 / 12.0);
}

TEST(Dip, BimodalLargerThanUnimodal) {
  Rng rng(8);
  std::vector<double> uni(2000), bi(2000);
  for (std::size_t i = 0; i < uni.size(); ++i) {
    uni[i] = rng.normal();
    bi[i] = rng.normal() + (i % 2 ? 5.0 : 0.0);
  }
  EXPECT_GT(dip_statistic(bi), 3 * dip_statistic(uni));
}

TEST(DipPValue, AddOneEstimatorBounds) {
  const DipNullDistribution null(100, 199, 4);
  EXPECT_EQ(null.replicates(), 199u);
  EXPECT_DOUBLE_EQ(null.pvalue(0.25 + 1e-9), 1.0 / 200.0);
  EXPECT_DOUBLE_EQ(null.pvalue(1.0 / 200.0), 1.0);
  const double p = null.pvalue(0.04);
  EXPECT_GT(p, 0.0);
  EXPECT_LE(p, 1.0);
}

TEST(DipPValue, DeterministicAndMonotone) {
  const double a = dip_pvalue_mc(0.03, 200, 300, 42);
  EXPECT_EQ(a, dip_pvalue_mc(0.03, 200, 300, 42));
  double prev = 1.0;
  for (double d = 0.005; d < 0.08; d += 0.0025) {
    const double p = dip_pvalue_mc(d, 200, 300, 42);
    EXPECT_LE(p, prev);
    prev = p;
  }
}

TEST(DipPValue, NullCalibration) {
  // Uniform samples are the null; about 5% should reject at 0.05.
  const std::size_t n = 1000;
  const DipNullDistribution null(n, 1000, 77);
  int rejections = 0;
  for (int s = 0; s < 200; ++s) {
    Rng rng(derive_seed(1234, s));
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform();
    if (null.pvalue(dip_statistic(v)) < 0.05) ++rejections;
  }
  EXPECT_GE(rejections, 2);   // 0.01 * 200
  EXPECT_LE(rejections, 20);  // 0.10 * 200
}

TEST(DipPValue, RejectsNonPositiveDip) {
  EXPECT_THROW(dip_pvalue_mc(0.0, 10, 10, 1), Error);
}

TEST(SortedUniformSample, IsSortedAndInUnitInterval) {
  Rng rng(1);
  const auto s = sorted_uniform_sample(5000, rng);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_GT(s.front(), 0.0);
  EXPECT_LT(s.back(), 1.0);
  // Mean of U(0,1) within 4 standard errors.
  double mean = 0;
  for (double v : s) mean += v;
  mean /= 5000;
  EXPECT_NEAR(mean, 0.5, 4 * std::sqrt(1.0 / 12.0 / 5000));
}
