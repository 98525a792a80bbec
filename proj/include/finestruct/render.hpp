#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finestruct/engine.hpp"
#include "finestruct/error.hpp"

namespace finestruct {

struct RenderConfig {
  int width_px = 900;
  int height_px = 600;
  double column_width_fraction = 0.9;
  std::string glyph_fill = "#bdbdbd";
  std::string gaussian_color = "magenta";
  std::string box_color = "black";
  std::string reference_line_color = "red";
  std::vector<double> reference_lines;

  void validate() const;
};

namespace svg {

inline bool valid_color(std::string_view c) {
  if (c.empty() || c.size() > 32) return false;
  if (c.front() == '#') {
    if (c.size() != 4 && c.size() != 7) return false;
    return std::all_of(c.begin() + 1, c.end(), [](unsigned char ch) { return std::isxdigit(ch); });
  }
  return std::all_of(c.begin(), c.end(), [](unsigned char ch) { return std::isalpha(ch); });
}

// Fixed three-decimal coordinates; locale independent, never "-0.000".
inline std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  std::string s(buf, res.ptr);
  if (s == "-0.000") s = "0.000";
  return s;
}

inline std::string label(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // Control characters are not allowed in XML 1.0 text.
        if (static_cast<unsigned char>(c) >= 0x20 || c == '\t' || c == '\n') out += c;
    }
  }
  return out;
}

}  // namespace svg

inline void RenderConfig::validate() const {
  if (width_px <= 0 || height_px <= 0) throw Error(ErrorKind::InvalidArgument, "image size must be positive");
  if (!(column_width_fraction > 0.0 && column_width_fraction <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "column_width_fraction must lie in (0,1]");
  for (const auto* c : {&glyph_fill, &gaussian_color, &box_color, &reference_line_color})
    if (!svg::valid_color(*c)) throw Error(ErrorKind::InvalidArgument, "invalid color '" + *c + "'");
  for (double y : reference_lines)
    if (!std::isfinite(y)) throw Error(ErrorKind::InvalidArgument, "reference line must be finite");
}

// "Nice" ticks inside [low, high] with a 1-2-5 step; 2.5 is tried only when
// no 1-2-5 step lands between 6 and 10 ticks.
inline std::vector<double> nice_ticks(double low, double high) {
  std::vector<double> best;
  if (!(high > low)) return {low};
  const int top = static_cast<int>(std::floor(std::log10(high - low)));
  auto ticks_for = [&](double mantissa, int exponent) {
    std::vector<double> t;
    const double scale = std::pow(10.0, std::abs(exponent));
    auto value = [&](double k) { return exponent >= 0 ? k * mantissa * scale : k * mantissa / scale; };
    const double step = value(1.0);
    for (double k = std::ceil(low / step); value(k) <= high && t.size() < 64; k += 1.0) t.push_back(value(k));
    return t;
  };
  for (const auto& mantissas : {std::vector<double>{5, 2, 1}, std::vector<double>{5, 2.5, 2, 1}}) {
    for (int e = top + 1; e >= top - 2; --e) {
      for (double m : mantissas) {
        auto t = ticks_for(m, e);
        if (t.size() >= 6 && t.size() <= 10) return t;
        if (best.empty() || (best.size() < 6 && t.size() > best.size() && t.size() <= 12)) best = std::move(t);
      }
    }
  }
  return best;
}

struct OverlayPoint {
  double y;
  double half_width;
};

// Normal pdf at the kernels, scaled by the same factor as the glyph's density.
inline std::vector<OverlayPoint> gaussian_overlay_path(double mu, double sigma, std::span<const double> kernels,
                                                       double width_scale) {
  std::vector<OverlayPoint> path;
  path.reserve(kernels.size());
  for (double k : kernels) path.push_back({k, normal_pdf(k, mu, sigma) * width_scale});
  return path;
}

class AxisMap {
 public:
  AxisMap(double data_low, double data_high, double px_bottom, double px_top)
      : low_(data_low), high_(data_high), bottom_(px_bottom), top_(px_top) {}

  double to_px(double y) const { return bottom_ - (y - low_) / (high_ - low_) * (bottom_ - top_); }
  double to_data(double px) const { return low_ + (bottom_ - px) / (bottom_ - top_) * (high_ - low_); }

 private:
  double low_, high_, bottom_, top_;
};

struct PlotLayout {
  double left = 70, right = 20, top = 40, bottom = 110;
  double plot_left, plot_right, plot_top, plot_bottom, column_width;

  PlotLayout(const RenderConfig& cfg, std::size_t columns) {
    plot_left = left;
    plot_right = std::max(left + 1.0, cfg.width_px - right);
    plot_top = top;
    plot_bottom = std::max(top + 1.0, cfg.height_px - bottom);
    column_width = (plot_right - plot_left) / static_cast<double>(columns);
  }
  double center(std::size_t i) const { return plot_left + (static_cast<double>(i) + 0.5) * column_width; }
};

inline std::string render_svg(const PlotModel& model, const RenderConfig& cfg) {
  cfg.validate();
  if (model.glyphs.empty()) throw Error(ErrorKind::NoPlottableFeatures, "nothing to render");
  const PlotLayout layout(cfg, model.glyphs.size());
  const AxisMap axis(model.y_low, model.y_high, layout.plot_bottom, layout.plot_top);
  const double max_half = cfg.column_width_fraction / 2.0 * layout.column_width;
  using svg::num;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(cfg.width_px) +
         "\" height=\"" + std::to_string(cfg.height_px) + "\" viewBox=\"0 0 " + std::to_string(cfg.width_px) + " " +
         std::to_string(cfg.height_px) + "\" font-family=\"sans-serif\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(cfg.width_px) + "\" height=\"" +
         std::to_string(cfg.height_px) + "\" fill=\"white\"/>\n";
  out += "<text class=\"title\" x=\"" + num(cfg.width_px / 2.0) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
         svg::escape(model.title) + "</text>\n";

  // Axis.
  out += "<g class=\"axis\" stroke=\"black\" font-size=\"11\">\n";
  out += "<line x1=\"" + num(layout.plot_left) + "\" y1=\"" + num(layout.plot_top) + "\" x2=\"" + num(layout.plot_left) +
         "\" y2=\"" + num(layout.plot_bottom) + "\"/>\n";
  for (double t : nice_ticks(model.y_low, model.y_high)) {
    const double py = axis.to_px(t);
    out += "<line class=\"tick\" x1=\"" + num(layout.plot_left - 5) + "\" y1=\"" + num(py) + "\" x2=\"" +
           num(layout.plot_left) + "\" y2=\"" + num(py) + "\"/>\n";
    out += "<text x=\"" + num(layout.plot_left - 8) + "\" y=\"" + num(py + 4) +
           "\" text-anchor=\"end\" stroke=\"none\">" + svg::escape(svg::label(t)) + "</text>\n";
  }
  out += "<text x=\"16\" y=\"" + num((layout.plot_top + layout.plot_bottom) / 2) +
         "\" text-anchor=\"middle\" stroke=\"none\" transform=\"rotate(-90 16 " +
         num((layout.plot_top + layout.plot_bottom) / 2) + ")\">" + svg::escape(model.y_label) + "</text>\n";
  out += "</g>\n";

  for (std::size_t i = 0; i < model.glyphs.size(); ++i) {
    const auto& g = model.glyphs[i];
    const double cx = layout.center(i);
    out += "<g class=\"feature\" data-feature=\"" + svg::escape(g.feature) + "\" data-kind=\"" +
           std::string(g.kind_name()) + "\">\n";

    if (const auto* d = std::get_if<DensityGlyph>(&g.shape)) {
      const auto& c = d->curve;
      const double peak = *std::max_element(c.densities.begin(), c.densities.end());
      const double scale = max_half / peak;
      out += "<polygon class=\"density\" fill=\"" + cfg.glyph_fill + "\" stroke=\"black\" stroke-width=\"0.5\" points=\"";
      for (std::size_t k = 0; k < c.kernels.size(); ++k)
        out += num(cx + c.densities[k] * scale) + "," + num(axis.to_px(c.kernels[k])) + " ";
      for (std::size_t k = c.kernels.size(); k-- > 0;)
        out += num(cx - c.densities[k] * scale) + "," + num(axis.to_px(c.kernels[k])) + (k ? " " : "");
      out += "\"/>\n";

      if (g.gaussian_overlay) {
        const auto path = gaussian_overlay_path(g.gaussian_overlay->mu, g.gaussian_overlay->sigma, c.kernels, scale);
        for (int side : {1, -1}) {
          out += "<polyline class=\"gaussian\" fill=\"none\" stroke=\"" + cfg.gaussian_color +
                 "\" stroke-width=\"1.5\" points=\"";
          for (std::size_t k = 0; k < path.size(); ++k) {
            // The overlay may be wider than the column where the fit disagrees; clip it there.
            const double w = std::min(path[k].half_width, layout.column_width / 2.0);
            out += num(cx + side * w) + "," + num(axis.to_px(path[k].y)) + (k + 1 < path.size() ? " " : "");
          }
          out += "\"/>\n";
        }
      }
    } else if (const auto* j = std::get_if<JitterGlyph>(&g.shape)) {
      out += "<g class=\"jitter\" fill=\"black\">\n";
      for (const auto& p : j->points)
        out += "<circle cx=\"" + num(cx + p.offset * layout.column_width) + "\" cy=\"" + num(axis.to_px(p.value)) +
               "\" r=\"1.5\"/>\n";
      out += "</g>\n";
    } else {
      const double py = axis.to_px(std::get<DiracGlyph>(g.shape).value);
      out += "<line class=\"dirac\" x1=\"" + num(cx - max_half) + "\" y1=\"" + num(py) + "\" x2=\"" + num(cx + max_half) +
             "\" y2=\"" + num(py) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }

    if (g.box_overlay) {
      const auto& b = *g.box_overlay;
      const double hw = 0.1 * layout.column_width;
      const double p25 = axis.to_px(b.q25), p75 = axis.to_px(b.q75);
      out += "<g class=\"box\" stroke=\"" + cfg.box_color + "\" fill=\"none\" stroke-width=\"1\">\n";
      out += "<rect x=\"" + num(cx - hw) + "\" y=\"" + num(p75) + "\" width=\"" + num(2 * hw) + "\" height=\"" +
             num(p25 - p75) + "\"/>\n";
      auto hline = [&](const char* cls, double py, double half) {
        out += std::string("<line class=\"") + cls + "\" x1=\"" + num(cx - half) + "\" y1=\"" + num(py) + "\" x2=\"" +
               num(cx + half) + "\" y2=\"" + num(py) + "\"/>\n";
      };
      hline("median", axis.to_px(b.median), hw);
      hline("whisker-low", axis.to_px(b.whisker_low), hw / 2);
      hline("whisker-high", axis.to_px(b.whisker_high), hw / 2);
      out += "<line x1=\"" + num(cx) + "\" y1=\"" + num(p25) + "\" x2=\"" + num(cx) + "\" y2=\"" +
             num(axis.to_px(b.whisker_low)) + "\"/>\n";
      out += "<line x1=\"" + num(cx) + "\" y1=\"" + num(p75) + "\" x2=\"" + num(cx) + "\" y2=\"" +
             num(axis.to_px(b.whisker_high)) + "\"/>\n";
      out += "</g>\n";
    }

    const double ly = layout.plot_bottom + 14;
    out += "<text class=\"label\" x=\"" + num(cx) + "\" y=\"" + num(ly) + "\" font-size=\"11\" text-anchor=\"end\" transform=\"rotate(-45 " +
           num(cx) + " " + num(ly) + ")\">" + svg::escape(g.feature) + "</text>\n";
    out += "</g>\n";
  }

  for (double y : cfg.reference_lines) {
    const double py = axis.to_px(y);
    out += "<line class=\"refline\" data-y=\"" + svg::label(y) + "\" x1=\"" + num(layout.plot_left) + "\" y1=\"" +
           num(py) + "\" x2=\"" + num(layout.plot_right) + "\" y2=\"" + num(py) + "\" stroke=\"" +
           cfg.reference_line_color + "\" stroke-width=\"1\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace finestruct
