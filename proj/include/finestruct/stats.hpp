#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "finestruct/error.hpp"

namespace finestruct {

// One named numeric column. Non-finite raw entries are dropped at ingestion and
// counted in missing_count.
struct FeatureSeries {
  std::string name;
  std::vector<double> values;
  std::size_t missing_count = 0;

  static FeatureSeries from_raw(std::string name, std::span<const double> raw) {
    FeatureSeries f{std::move(name), {}, 0};
    f.values.reserve(raw.size());
    for (double v : raw) {
      if (std::isfinite(v))
        f.values.push_back(v);
      else
        ++f.missing_count;
    }
    return f;
  }

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

struct DescriptiveStats {
  std::size_t n = 0;
  std::size_t missing = 0;
  double q01 = 0, q25 = 0, median = 0, q75 = 0, q99 = 0;
  double mean = 0;
  // Empty for constant features (zero second central moment).
  std::optional<double> skewness_g1;
  std::optional<double> excess_kurtosis;
};

enum class ScalingMode { None, Percentalize, Robust, CompleteRobust, Log };

inline constexpr ScalingMode kAllScalingModes[] = {ScalingMode::None, ScalingMode::Percentalize,
                                                  ScalingMode::Robust, ScalingMode::CompleteRobust,
                                                  ScalingMode::Log};

constexpr std::string_view to_string(ScalingMode mode) {
  switch (mode) {
    case ScalingMode::None: return "none";
    case ScalingMode::Percentalize: return "percentalize";
    case ScalingMode::Robust: return "robust";
    case ScalingMode::CompleteRobust: return "completerobust";
    case ScalingMode::Log: return "log";
  }
  return "none";
}

inline ScalingMode parse_scaling_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (ScalingMode m : kAllScalingModes)
    if (lower == to_string(m)) return m;
  throw Error(ErrorKind::InvalidArgument, "unknown scaling mode '" + std::string(text) + "'");
}

// Linear-interpolation quantile on ascending data, index h = (n-1)p.
inline double quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::EmptyFeature, "quantile of empty data");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "probability outside [0,1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  return s;
}

struct CentralMoments {
  double mean = 0, m2 = 0, m3 = 0, m4 = 0;
};

// Population central moments m_k = sum((x - mean)^k) / n, summed in input order.
inline CentralMoments central_moments(std::span<const double> values) {
  CentralMoments cm;
  if (values.empty()) return cm;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  cm.mean = sum / n;
  for (double v : values) {
    const double d = v - cm.mean;
    const double d2 = d * d;
    cm.m2 += d2;
    cm.m3 += d2 * d;
    cm.m4 += d2 * d2;
  }
  cm.m2 /= n;
  cm.m3 /= n;
  cm.m4 /= n;
  return cm;
}

inline std::size_t count_unique(std::span<const double> sorted) {
  if (sorted.empty()) return 0;
  std::size_t unique = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] != sorted[i - 1]) ++unique;
  return unique;
}

inline DescriptiveStats describe(const FeatureSeries& f) {
  if (f.empty()) throw Error(ErrorKind::EmptyFeature, "feature '" + f.name + "' has no values");
  // Moments are taken over the sorted copy so the result ignores input order.
  const auto s = sorted_copy(f.values);
  DescriptiveStats d;
  d.n = s.size();
  d.missing = f.missing_count;
  d.q01 = quantile(s, 0.01);
  d.q25 = quantile(s, 0.25);
  d.median = quantile(s, 0.5);
  d.q75 = quantile(s, 0.75);
  d.q99 = quantile(s, 0.99);
  const auto cm = central_moments(s);
  d.mean = cm.mean;
  if (cm.m2 > 0.0) {
    d.skewness_g1 = cm.m3 / std::pow(cm.m2, 1.5);
    d.excess_kurtosis = cm.m4 / (cm.m2 * cm.m2) - 3.0;
  }
  return d;
}

inline double symmetric_log(double x) { return std::copysign(std::log10(1.0 + std::fabs(x)), x); }

inline FeatureSeries transform(const FeatureSeries& f, ScalingMode mode) {
  if (f.empty()) throw Error(ErrorKind::EmptyFeature, "feature '" + f.name + "' has no values");
  FeatureSeries out = f;
  switch (mode) {
    case ScalingMode::None:
      break;
    case ScalingMode::Percentalize: {
      const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
      const double low = *lo, span = *hi - *lo;
      if (span == 0.0) throw Error(ErrorKind::ConstantFeature, "cannot percentalize '" + f.name + "'");
      for (double& v : out.values) v = 100.0 * (v - low) / span;
      break;
    }
    case ScalingMode::Robust:
    case ScalingMode::CompleteRobust: {
      const auto s = sorted_copy(f.values);
      const double q01 = quantile(s, 0.01), q99 = quantile(s, 0.99);
      const double span = q99 - q01;
      if (span == 0.0)
        throw Error(ErrorKind::ConstantFeature, "1%..99% quantile window of '" + f.name + "' is empty");
      for (double& v : out.values) {
        v = (v - q01) / span;
        if (mode == ScalingMode::CompleteRobust) v = std::clamp(v, 0.0, 1.0);
      }
      break;
    }
    case ScalingMode::Log:
      for (double& v : out.values) v = symmetric_log(v);
      break;
  }
  return out;
}

struct GaussianFit {
  double mu = 0;
  double sigma = 1;
};

// Normal-consistent IQR divisor.
inline constexpr double kIqrToSigma = 1.349;

inline GaussianFit robust_gaussian_fit(const FeatureSeries& f) {
  if (f.size() < 2) throw Error(ErrorKind::TooFewPoints, "robust fit needs at least 2 values");
  const auto s = sorted_copy(f.values);
  const double iqr = quantile(s, 0.75) - quantile(s, 0.25);
  if (!(iqr > 0.0)) throw Error(ErrorKind::DegenerateSpread, "interquartile range of '" + f.name + "' is zero");
  return {quantile(s, 0.5), iqr / kIqrToSigma};
}

}  // namespace finestruct
