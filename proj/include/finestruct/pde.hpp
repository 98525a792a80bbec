#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "finestruct/error.hpp"
#include "finestruct/random.hpp"
#include "finestruct/stats.hpp"

namespace finestruct {

struct PdeConfig {
  double pareto_quantile = 0.18;
  std::size_t distance_sample_cap = 5000;
  std::size_t large_n_threshold = 1024;
  std::size_t grid_min = 64;
  std::size_t grid_max = 2048;
  double spacing_divisor = 4.0;

  void validate() const {
    if (!(pareto_quantile > 0.0 && pareto_quantile < 1.0))
      throw Error(ErrorKind::InvalidArgument, "pareto_quantile must lie in (0,1)");
    if (grid_min < 2 || grid_min > grid_max) throw Error(ErrorKind::InvalidArgument, "need 2 <= grid_min <= grid_max");
    if (distance_sample_cap < 2 || large_n_threshold == 0)
      throw Error(ErrorKind::InvalidArgument, "sample caps must be positive");
    if (!(spacing_divisor > 0.0)) throw Error(ErrorKind::InvalidArgument, "spacing_divisor must be positive");
  }
};

struct DensityCurve {
  std::vector<double> kernels;
  std::vector<double> densities;
  double radius = 0;
};

namespace detail {

// Number of pairs i<j of ascending data with x[j] - x[i] <= t (two pointers).
inline std::uint64_t count_pairs_within(std::span<const double> sorted, double t) {
  std::uint64_t count = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (j < i + 1) j = i + 1;
    while (j < sorted.size() && sorted[j] - sorted[i] <= t) ++j;
    count += j - i - 1;
  }
  return count;
}

// k-th smallest (0-based) of the n(n-1)/2 differences x[j] - x[i], i<j, found
// exactly by bisecting over the bit patterns of non-negative doubles; the
// counting pass uses the same floating-point differences it selects from.
inline double kth_pairwise_distance(std::span<const double> sorted, std::uint64_t k) {
  std::uint64_t lo = 0;
  std::uint64_t hi = std::bit_cast<std::uint64_t>(sorted.back() - sorted.front());
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (count_pairs_within(sorted, std::bit_cast<double>(mid)) >= k + 1)
      hi = mid;
    else
      lo = mid + 1;
  }
  return std::bit_cast<double>(lo);
}

// Linear-interpolation quantile of the pairwise distances that exceed the
// first `skip` (smallest) ones.
inline double pairwise_distance_quantile(std::span<const double> sorted, double p, std::uint64_t skip = 0) {
  const std::uint64_t n = sorted.size();
  const std::uint64_t total = n * (n - 1) / 2 - skip;
  const double h = static_cast<double>(total - 1) * p;
  const auto lo = static_cast<std::uint64_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  const double a = kth_pairwise_distance(sorted, skip + lo);
  if (frac == 0.0 || lo + 1 >= total) return a;
  const double b = kth_pairwise_distance(sorted, skip + lo + 1);
  return a + frac * (b - a);
}

inline std::uint64_t count_tied_pairs(std::span<const double> sorted) {
  std::uint64_t ties = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      ties += static_cast<std::uint64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return ties;
}

}  // namespace detail

// Pareto radius: a fixed quantile of the pairwise absolute differences, chosen
// so a neighborhood holds roughly a fifth of the data.
inline double pareto_radius(std::span<const double> values, const PdeConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (values.size() < 2) throw Error(ErrorKind::TooFewPoints, "Pareto radius needs at least 2 values");
  std::vector<double> work;
  if (values.size() > cfg.distance_sample_cap) {
    Rng rng(derive_seed(seed, 0x5A4D));
    const auto idx = sample_indices(values.size(), cfg.distance_sample_cap, rng);
    work.reserve(idx.size());
    for (auto i : idx) work.push_back(values[i]);
  } else {
    work.assign(values.begin(), values.end());
  }
  std::sort(work.begin(), work.end());
  if (work.front() == work.back()) {
    // The subsample may be constant while the data is not; fall back to all data.
    if (std::ranges::all_of(values, [&](double v) { return v == values[0]; }))
      throw Error(ErrorKind::ConstantFeature, "all values identical");
    work.assign(values.begin(), values.end());
    std::sort(work.begin(), work.end());
  }

  double radius = detail::pairwise_distance_quantile(work, cfg.pareto_quantile);
  if (radius == 0.0) radius = detail::pairwise_distance_quantile(work, cfg.pareto_quantile, detail::count_tied_pairs(work));

  if (values.size() > cfg.large_n_threshold)
    radius *= std::pow(static_cast<double>(values.size()) / static_cast<double>(cfg.large_n_threshold), -0.2);
  return radius;
}

inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return area;
}

// Kernel grid spans exactly [min, max]; the density is zero outside it.
inline DensityCurve pde_estimate(std::span<const double> values, const PdeConfig& cfg, std::uint64_t seed) {
  const double radius = pareto_radius(values, cfg, seed);
  const auto sorted = sorted_copy(values);
  const double low = sorted.front(), high = sorted.back();

  const double steps = std::ceil((high - low) / (radius / cfg.spacing_divisor));
  const double wanted = std::isfinite(steps) ? steps + 1.0 : static_cast<double>(cfg.grid_max);
  const auto m = static_cast<std::size_t>(
      std::clamp(wanted, static_cast<double>(cfg.grid_min), static_cast<double>(cfg.grid_max)));

  DensityCurve curve;
  curve.radius = radius;
  curve.kernels.resize(m);
  const double step = (high - low) / static_cast<double>(m - 1);
  for (std::size_t i = 0; i < m; ++i) curve.kernels[i] = low + step * static_cast<double>(i);
  curve.kernels.back() = high;
  for (std::size_t i = 1; i < m; ++i)
    if (!(curve.kernels[i] > curve.kernels[i - 1]))
      throw Error(ErrorKind::DegenerateSpread, "data range too narrow for a kernel grid");

  curve.densities.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double g = curve.kernels[i];
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), g - radius);
    const auto last = std::upper_bound(first, sorted.end(), g + radius);
    curve.densities[i] = static_cast<double>(last - first);
  }
  const double area = trapezoid(curve.kernels, curve.densities);
  for (double& d : curve.densities) d /= area;
  return curve;
}

// Average self-inclusive share of points within `radius` of each point.
inline double neighborhood_fraction(std::span<const double> values, double radius) {
  if (values.empty()) throw Error(ErrorKind::EmptyFeature, "neighborhood fraction of empty data");
  const auto sorted = sorted_copy(values);
  double total = 0.0;
  for (double x : sorted) {
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), x - radius);
    const auto last = std::upper_bound(first, sorted.end(), x + radius);
    total += static_cast<double>(last - first);
  }
  const double n = static_cast<double>(sorted.size());
  return total / (n * n);
}

}  // namespace finestruct
