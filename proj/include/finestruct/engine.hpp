#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "finestruct/error.hpp"
#include "finestruct/hypothesis.hpp"
#include "finestruct/pde.hpp"
#include "finestruct/random.hpp"
#include "finestruct/stats.hpp"

namespace finestruct {

enum class Ordering { Default, Columnwise, Alphabetical, Statistics };

constexpr std::string_view to_string(Ordering o) {
  switch (o) {
    case Ordering::Default: return "default";
    case Ordering::Columnwise: return "columnwise";
    case Ordering::Alphabetical: return "alphabetical";
    case Ordering::Statistics: return "statistics";
  }
  return "default";
}

inline Ordering parse_ordering(std::string_view text) {
  for (Ordering o : {Ordering::Default, Ordering::Columnwise, Ordering::Alphabetical, Ordering::Statistics})
    if (text == to_string(o)) return o;
  throw Error(ErrorKind::InvalidArgument, "unknown ordering '" + std::string(text) + "'");
}

struct EngineConfig {
  std::size_t sample_size_cap = 500000;
  std::size_t min_data = 50;
  std::size_t min_unique = 12;
  double alpha = 0.05;
  ScalingMode scaling = ScalingMode::None;
  Ordering ordering = Ordering::Default;
  bool robust_gaussian = true;
  bool boxplot_overlay = false;
  std::size_t replicates = kDefaultReplicates;
  std::uint64_t seed = 1;
  PdeConfig pde;

  void validate() const {
    if (min_data < 2) throw Error(ErrorKind::InvalidArgument, "min_data must be at least 2");
    if (min_unique < 1) throw Error(ErrorKind::InvalidArgument, "min_unique must be at least 1");
    if (sample_size_cap < min_data) throw Error(ErrorKind::InvalidArgument, "sample_size_cap must be >= min_data");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
    if (replicates < 1) throw Error(ErrorKind::InvalidArgument, "replicates must be positive");
    pde.validate();
  }
};

inline constexpr double kJitterAmplitude = 0.3;

struct DensityGlyph {
  DensityCurve curve;
};

struct JitterPoint {
  double value;
  double offset;  // horizontal, in column widths, within [-0.3, 0.3]
};

struct JitterGlyph {
  std::vector<JitterPoint> points;
};

struct DiracGlyph {
  double value;
};

struct GaussianOverlay {
  double mu;
  double sigma;
  std::vector<double> curve;  // normal pdf at the density kernels
};

struct BoxOverlay {
  double q25, median, q75, whisker_low, whisker_high;
};

struct GlyphModel {
  std::string feature;
  std::variant<DensityGlyph, JitterGlyph, DiracGlyph> shape;
  std::optional<GaussianOverlay> gaussian_overlay;
  std::optional<BoxOverlay> box_overlay;
  std::optional<TestReport> report;

  bool is_density() const { return std::holds_alternative<DensityGlyph>(shape); }
  std::string_view kind_name() const {
    switch (shape.index()) {
      case 0: return "density";
      case 1: return "jitter";
      default: return "dirac";
    }
  }
  std::pair<double, double> extent() const;
};

enum class ShapeClass { Nonunimodal, Skewed, GaussianLike, Discrete };

constexpr std::string_view to_string(ShapeClass c) {
  switch (c) {
    case ShapeClass::Nonunimodal: return "nonunimodal";
    case ShapeClass::Skewed: return "skewed";
    case ShapeClass::GaussianLike: return "gaussianlike";
    case ShapeClass::Discrete: return "discrete";
  }
  return "discrete";
}

struct FeatureAnalysis {
  std::string name;
  DescriptiveStats stats;
  std::optional<TestReport> report;
  ShapeClass shape_class = ShapeClass::Discrete;
  std::optional<double> radius;
  std::vector<std::string> diagnostics;
};

struct FeatureDiagnostic {
  std::string feature;
  std::string message;
  bool skipped = false;
};

struct PlotModel {
  std::vector<GlyphModel> glyphs;
  double y_low = 0;
  double y_high = 1;
  ScalingMode scaling_applied = ScalingMode::None;
  std::string title;
  std::string y_label;
};

// Everything a plot run produces; analyses are aligned with model.glyphs.
struct PlotBuild {
  PlotModel model;
  std::vector<FeatureAnalysis> analyses;
  std::vector<FeatureDiagnostic> diagnostics;
};

inline std::pair<double, double> GlyphModel::extent() const {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  auto cover = [&](double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  if (const auto* d = std::get_if<DensityGlyph>(&shape)) {
    cover(d->curve.kernels.front());
    cover(d->curve.kernels.back());
  } else if (const auto* j = std::get_if<JitterGlyph>(&shape)) {
    for (const auto& p : j->points) cover(p.value);
  } else {
    cover(std::get<DiracGlyph>(shape).value);
  }
  if (box_overlay) {
    cover(box_overlay->whisker_low);
    cover(box_overlay->whisker_high);
  }
  return {lo, hi};
}

inline std::uint64_t feature_seed(std::uint64_t seed, std::string_view name) { return seed ^ stable_hash(name); }

inline FeatureSeries subsample(const FeatureSeries& f, std::size_t cap, std::uint64_t seed) {
  if (cap < 1) throw Error(ErrorKind::InvalidArgument, "subsample cap must be positive");
  if (f.size() <= cap) return f;
  Rng rng(seed);
  FeatureSeries out{f.name, {}, f.missing_count};
  out.values.reserve(cap);
  for (auto i : sample_indices(f.size(), cap, rng)) out.values.push_back(f.values[i]);
  return out;
}

inline double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline GaussianOverlay make_gaussian_overlay(const GaussianFit& fit, std::span<const double> kernels) {
  GaussianOverlay g{fit.mu, fit.sigma, {}};
  g.curve.reserve(kernels.size());
  for (double k : kernels) g.curve.push_back(normal_pdf(k, fit.mu, fit.sigma));
  return g;
}

// Largest vertical-slice gap between overlay and density, both divided by the
// density maximum (the renderer's per-feature width scale).
inline double overlay_gap(const DensityCurve& curve, const GaussianOverlay& overlay) {
  const double peak = *std::max_element(curve.densities.begin(), curve.densities.end());
  double gap = 0.0;
  for (std::size_t i = 0; i < curve.densities.size(); ++i)
    gap = std::max(gap, std::fabs(overlay.curve[i] - curve.densities[i]) / peak);
  return gap;
}

inline BoxOverlay box_statistics(std::span<const double> sorted) {
  BoxOverlay b{quantile(sorted, 0.25), quantile(sorted, 0.5), quantile(sorted, 0.75), 0, 0};
  const double reach = 1.5 * (b.q75 - b.q25);
  b.whisker_low = *std::lower_bound(sorted.begin(), sorted.end(), b.q25 - reach);
  b.whisker_high = *(std::upper_bound(sorted.begin(), sorted.end(), b.q75 + reach) - 1);
  b.whisker_low = std::min(b.whisker_low, b.q25);
  b.whisker_high = std::max(b.whisker_high, b.q75);
  return b;
}

namespace detail {

inline double radical_inverse2(std::uint64_t k) {
  double inv = 0.5, out = 0.0;
  for (; k; k >>= 1, inv *= 0.5)
    if (k & 1) out += inv;
  return out;
}

// One stack per unique value; stack width grows with the value's count and
// offsets follow a rotated van der Corput sequence.
inline JitterGlyph jitter_points(std::span<const double> sorted, std::uint64_t seed) {
  JitterGlyph g;
  g.points.reserve(sorted.size());
  std::size_t max_count = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    max_count = std::max(max_count, j - i);
    i = j;
  }
  std::uint64_t group = 0;
  for (std::size_t i = 0; i < sorted.size(); ++group) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double width = kJitterAmplitude * static_cast<double>(j - i) / static_cast<double>(max_count);
    const double shift = Rng(derive_seed(seed, group)).uniform();
    for (std::size_t k = i; k < j; ++k) {
      double h = radical_inverse2(k - i + 1) + shift;
      h -= std::floor(h);
      g.points.push_back({sorted[k], width * (2.0 * h - 1.0)});
    }
    i = j;
  }
  return g;
}

}  // namespace detail

inline ShapeClass classify(const TestReport& r, double alpha) {
  if (r.dip_p < alpha) return ShapeClass::Nonunimodal;
  if (!r.skew || r.skew->p < alpha) return ShapeClass::Skewed;
  return ShapeClass::GaussianLike;
}

inline std::uint64_t dip_null_seed(std::uint64_t seed) { return derive_seed(seed, 0xD1B); }

// Routes one feature to a glyph. Throws EmptyFeature for an empty series; every
// other problem becomes a diagnostic on the analysis.
inline std::pair<GlyphModel, FeatureAnalysis> analyze_feature(const FeatureSeries& f, const EngineConfig& cfg,
                                                              const DipNullDistribution* null = nullptr) {
  if (f.empty()) throw Error(ErrorKind::EmptyFeature, "feature '" + f.name + "' has no values");
  const std::uint64_t seed = feature_seed(cfg.seed, f.name);
  const auto sorted = sorted_copy(f.values);
  const std::size_t unique = count_unique(sorted);

  GlyphModel glyph;
  glyph.feature = f.name;
  FeatureAnalysis analysis;
  analysis.name = f.name;
  analysis.stats = describe(f);

  if (cfg.boxplot_overlay) glyph.box_overlay = box_statistics(sorted);

  if (unique == 1) {
    glyph.shape = DiracGlyph{sorted.front()};
    return {std::move(glyph), std::move(analysis)};
  }
  if (f.size() < cfg.min_data || unique < cfg.min_unique) {
    glyph.shape = detail::jitter_points(sorted, derive_seed(seed, 2));
    return {std::move(glyph), std::move(analysis)};
  }

  DensityCurve curve;
  try {
    curve = pde_estimate(f.values, cfg.pde, derive_seed(seed, 3));
  } catch (const Error& e) {
    analysis.diagnostics.push_back(e.what());
    glyph.shape = detail::jitter_points(sorted, derive_seed(seed, 2));
    return {std::move(glyph), std::move(analysis)};
  }
  analysis.radius = curve.radius;

  const auto gate = gaussian_gate(f, cfg.alpha, cfg.replicates, dip_null_seed(cfg.seed), null);
  if (!gate.diagnostic.empty()) analysis.diagnostics.push_back(gate.diagnostic);
  analysis.report = gate.report;
  glyph.report = gate.report;
  analysis.shape_class = gate.report ? classify(*gate.report, cfg.alpha) : ShapeClass::Skewed;

  if (cfg.robust_gaussian && gate.overlay) {
    try {
      glyph.gaussian_overlay = make_gaussian_overlay(robust_gaussian_fit(f), curve.kernels);
    } catch (const Error& e) {
      analysis.diagnostics.push_back(e.what());
    }
  }
  glyph.shape = DensityGlyph{std::move(curve)};
  return {std::move(glyph), std::move(analysis)};
}

// Statistics order: Gaussian-like first (dip p descending, then |z| ascending),
// discrete features last, ties broken by name and then input position.
inline std::vector<std::size_t> order_features(std::span<const FeatureAnalysis> analyses, Ordering mode) {
  std::vector<std::size_t> perm(analyses.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  switch (mode) {
    case Ordering::Columnwise:
      break;
    case Ordering::Alphabetical:
      std::stable_sort(perm.begin(), perm.end(),
                       [&](std::size_t a, std::size_t b) { return analyses[a].name < analyses[b].name; });
      break;
    case Ordering::Default:
    case Ordering::Statistics: {
      auto key = [&](std::size_t i) {
        const auto& a = analyses[i];
        const bool discrete = a.shape_class == ShapeClass::Discrete || !a.report;
        const double dip_p = a.report ? a.report->dip_p : 0.0;
        const double abs_z = a.report && a.report->skew ? std::fabs(a.report->skew->z)
                                                        : std::numeric_limits<double>::infinity();
        return std::tuple(discrete, -dip_p, abs_z, std::string_view(a.name), i);
      };
      std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
      break;
    }
  }
  return perm;
}

inline PlotBuild build_plot_model(std::span<const FeatureSeries> features, const EngineConfig& cfg) {
  cfg.validate();
  if (features.empty()) throw Error(ErrorKind::NoPlottableFeatures, "no features given");
  const std::size_t cap = std::max(cfg.sample_size_cap / features.size(), cfg.min_data);

  PlotBuild out;
  std::vector<GlyphModel> glyphs;
  std::vector<FeatureAnalysis> analyses;
  std::map<std::size_t, std::unique_ptr<DipNullDistribution>> nulls;

  for (const auto& raw : features) {
    try {
      if (raw.empty()) throw Error(ErrorKind::EmptyFeature, "no finite values");
      const auto sampled = subsample(raw, cap, derive_seed(feature_seed(cfg.seed, raw.name), 1));
      const auto scaled = transform(sampled, cfg.scaling);

      const DipNullDistribution* null = nullptr;
      const auto s = sorted_copy(scaled.values);
      if (scaled.size() >= cfg.min_data && count_unique(s) >= cfg.min_unique) {
        auto& slot = nulls[scaled.size()];
        if (!slot)
          slot = std::make_unique<DipNullDistribution>(scaled.size(), cfg.replicates, dip_null_seed(cfg.seed));
        null = slot.get();
      }
      auto [glyph, analysis] = analyze_feature(scaled, cfg, null);
      // Descriptive statistics describe the raw column, not the plotted scale.
      analysis.stats = describe(raw);
      for (const auto& d : analysis.diagnostics) out.diagnostics.push_back({raw.name, d, false});
      glyphs.push_back(std::move(glyph));
      analyses.push_back(std::move(analysis));
    } catch (const Error& e) {
      out.diagnostics.push_back({raw.name, e.what(), true});
    }
  }
  if (glyphs.empty()) throw Error(ErrorKind::NoPlottableFeatures, "every feature was skipped");

  for (auto i : order_features(analyses, cfg.ordering)) {
    out.model.glyphs.push_back(std::move(glyphs[i]));
    out.analyses.push_back(std::move(analyses[i]));
  }

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& g : out.model.glyphs) {
    const auto [a, b] = g.extent();
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  const double span = hi - lo;
  const double pad = span > 0.0 ? 0.02 * span : 0.02 * std::max(1.0, std::fabs(lo));
  out.model.y_low = lo - pad;
  out.model.y_high = hi + pad;
  out.model.scaling_applied = cfg.scaling;
  out.model.title = "MD plot";
  out.model.y_label = cfg.scaling == ScalingMode::None ? "value" : "value (" + std::string(to_string(cfg.scaling)) + ")";
  return out;
}

}  // namespace finestruct
