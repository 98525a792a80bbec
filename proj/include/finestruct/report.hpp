#pragma once

#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

#include "finestruct/engine.hpp"
#include "finestruct/version.hpp"

namespace finestruct {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kPlotModelSchemaVersion = 1;

inline Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json to_json(const DescriptiveStats& s) {
  return Json{{"n", s.n},
              {"missing", s.missing},
              {"q01", s.q01},
              {"q25", s.q25},
              {"median", s.median},
              {"q75", s.q75},
              {"q99", s.q99},
              {"mean", s.mean},
              {"skewness_g1", optional_number(s.skewness_g1)},
              {"excess_kurtosis", optional_number(s.excess_kurtosis)}};
}

inline Json to_json(const TestReport& r) {
  Json j{{"n", r.n}, {"dip_d", r.dip_d}, {"dip_p", r.dip_p}, {"dip_replicates", r.dip_replicates}};
  j["skew_g1"] = r.skew ? Json(r.skew->g1) : Json(nullptr);
  j["skew_z"] = r.skew ? Json(r.skew->z) : Json(nullptr);
  j["skew_p"] = r.skew ? Json(r.skew->p) : Json(nullptr);
  j["seed"] = r.seed;
  return j;
}

inline Json to_json(const EngineConfig& c) {
  return Json{{"sample_size_cap", c.sample_size_cap},
              {"min_data", c.min_data},
              {"min_unique", c.min_unique},
              {"alpha", c.alpha},
              {"scaling", to_string(c.scaling)},
              {"ordering", to_string(c.ordering)},
              {"robust_gaussian", c.robust_gaussian},
              {"boxplot_overlay", c.boxplot_overlay},
              {"replicates", c.replicates},
              {"seed", c.seed},
              {"pde",
               {{"pareto_quantile", c.pde.pareto_quantile},
                {"distance_sample_cap", c.pde.distance_sample_cap},
                {"large_n_threshold", c.pde.large_n_threshold},
                {"grid_min", c.pde.grid_min},
                {"grid_max", c.pde.grid_max},
                {"spacing_divisor", c.pde.spacing_divisor}}}};
}

// Per-feature report in plot order, followed by skipped features.
inline Json build_report(const PlotBuild& build, const EngineConfig& cfg) {
  Json features = Json::array();
  for (std::size_t i = 0; i < build.analyses.size(); ++i) {
    const auto& a = build.analyses[i];
    const auto& g = build.model.glyphs[i];
    Json diag = Json::array();
    for (const auto& d : a.diagnostics) diag.push_back(d);
    features.push_back(Json{{"position", i},
                            {"name", a.name},
                            {"glyph", g.kind_name()},
                            {"shape_class", to_string(a.shape_class)},
                            {"gaussian_overlay", g.gaussian_overlay.has_value()},
                            {"radius", optional_number(a.radius)},
                            {"stats", to_json(a.stats)},
                            {"test", a.report ? to_json(*a.report) : Json(nullptr)},
                            {"diagnostics", diag}});
  }
  Json skipped = Json::array();
  for (const auto& d : build.diagnostics)
    if (d.skipped) skipped.push_back(Json{{"name", d.feature}, {"reason", d.message}});
  return Json{{"schema_version", kReportSchemaVersion},
              {"tool", kToolName},
              {"version", kToolVersion},
              {"seed", cfg.seed},
              {"scaling", to_string(cfg.scaling)},
              {"ordering", to_string(cfg.ordering)},
              {"alpha", cfg.alpha},
              {"features", features},
              {"skipped", skipped}};
}

inline Json to_json(const PlotModel& m) {
  Json glyphs = Json::array();
  for (const auto& g : m.glyphs) {
    Json j{{"feature", g.feature}, {"kind", g.kind_name()}};
    if (const auto* d = std::get_if<DensityGlyph>(&g.shape)) {
      j["radius"] = d->curve.radius;
      j["kernels"] = d->curve.kernels;
      j["densities"] = d->curve.densities;
    } else if (const auto* jt = std::get_if<JitterGlyph>(&g.shape)) {
      Json pts = Json::array();
      for (const auto& p : jt->points) pts.push_back(Json::array({p.value, p.offset}));
      j["points"] = pts;
    } else {
      j["value"] = std::get<DiracGlyph>(g.shape).value;
    }
    if (g.gaussian_overlay)
      j["gaussian_overlay"] = Json{
          {"mu", g.gaussian_overlay->mu}, {"sigma", g.gaussian_overlay->sigma}, {"curve", g.gaussian_overlay->curve}};
    else
      j["gaussian_overlay"] = nullptr;
    if (g.box_overlay) {
      const auto& b = *g.box_overlay;
      j["box_overlay"] = Json{{"q25", b.q25},
                              {"median", b.median},
                              {"q75", b.q75},
                              {"whisker_low", b.whisker_low},
                              {"whisker_high", b.whisker_high}};
    } else {
      j["box_overlay"] = nullptr;
    }
    j["report"] = g.report ? to_json(*g.report) : Json(nullptr);
    glyphs.push_back(std::move(j));
  }
  return Json{{"schema_version", kPlotModelSchemaVersion},
              {"title", m.title},
              {"y_label", m.y_label},
              {"scaling_applied", to_string(m.scaling_applied)},
              {"y_range", Json::array({m.y_low, m.y_high})},
              {"glyphs", glyphs}};
}

}  // namespace finestruct
