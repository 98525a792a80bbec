#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "finestruct/error.hpp"
#include "finestruct/random.hpp"
#include "finestruct/stats.hpp"

namespace finestruct {

struct GaussComponent {
  double weight = 1;
  double mean = 0;
  double sd = 1;
};

struct GaussMixSpec {
  std::vector<GaussComponent> components;

  void validate() const {
    if (components.empty()) throw Error(ErrorKind::BadSpec, "mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : components) {
      if (!(c.weight >= 0.0 && c.weight <= 1.0)) throw Error(ErrorKind::BadSpec, "weights must lie in [0,1]");
      if (!(c.sd > 0.0) || !std::isfinite(c.sd) || !std::isfinite(c.mean))
        throw Error(ErrorKind::BadSpec, "component sd must be positive and finite");
      total += c.weight;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw Error(ErrorKind::BadSpec, "weights must sum to 1");
  }
};

struct SkewSpec {
  double xi = 1.0;
  bool standardized = true;
};

inline FeatureSeries sample_uniform(std::size_t n, double low, double high, std::uint64_t seed) {
  if (!(low < high) || !std::isfinite(low) || !std::isfinite(high))
    throw Error(ErrorKind::BadRange, "uniform sampler needs low < high");
  Rng rng(seed);
  FeatureSeries f{"uniform", std::vector<double>(n), 0};
  for (double& v : f.values) v = rng.uniform(low, high);
  return f;
}

inline FeatureSeries sample_gauss_mixture(std::size_t n, const GaussMixSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  FeatureSeries f{"gaussmix", std::vector<double>(n), 0};
  for (double& v : f.values) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    const GaussComponent* pick = &spec.components.back();
    for (const auto& c : spec.components) {
      cumulative += c.weight;
      if (u < cumulative) {
        pick = &c;
        break;
      }
    }
    // Zero-weight trailing components are never the fallback.
    while (pick->weight == 0.0 && pick != &spec.components.front()) --pick;
    v = rng.normal(pick->mean, pick->sd);
  }
  return f;
}

// Mean and standard deviation of the Fernandez-Steel skewed standard normal.
struct SkewMoments {
  double mean;
  double sd;
};

inline SkewMoments skew_normal_moments(double xi) {
  const double m1 = 2.0 / std::sqrt(2.0 * std::numbers::pi);
  const double mean = m1 * (xi - 1.0 / xi);
  const double var = (1.0 - m1 * m1) * (xi * xi + 1.0 / (xi * xi)) + 2.0 * m1 * m1 - 1.0;
  return {mean, std::sqrt(var)};
}

// Half-normal magnitude, stretched by xi on the right and shrunk by 1/xi on the
// left; the right side is chosen with probability xi^2 / (1 + xi^2).
inline FeatureSeries sample_skew_normal(std::size_t n, const SkewSpec& spec, std::uint64_t seed) {
  if (!(spec.xi > 0.0) || !std::isfinite(spec.xi)) throw Error(ErrorKind::BadSpec, "xi must be positive");
  const double xi = spec.xi;
  const double p_right = xi * xi / (1.0 + xi * xi);
  const auto moments = skew_normal_moments(xi);
  Rng rng(seed);
  FeatureSeries f{"skewnorm", std::vector<double>(n), 0};
  for (double& v : f.values) {
    const double magnitude = std::fabs(rng.normal());
    v = rng.uniform() < p_right ? magnitude * xi : -magnitude / xi;
    if (spec.standardized) v = (v - moments.mean) / moments.sd;
  }
  return f;
}

}  // namespace finestruct
