#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <span>
#include <string>

#include "gbct/dataset.hpp"
#include "gbct/error.hpp"
#include "gbct/granular_ball.hpp"

namespace gbct {

struct ScatterOptions {
  std::size_t dim_x = 0;
  std::size_t dim_y = 1;
  double size = 800.0;  // canvas edge in px
  double margin = 20.0;
  double marker_radius = 2.5;
};

namespace svg_detail {

inline const char* color(int label) {
  static constexpr std::array<const char*, 10> palette{
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
      "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#393b79"};
  if (label < 0) return "#9e9e9e";
  return palette[static_cast<std::size_t>(label) % palette.size()];
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace svg_detail

/// 2-D scatter plot of two chosen dimensions. One <circle class="point">
/// per point, coloured by `labels` (may be empty); with `balls` each ball is
/// drawn as an unfilled <circle class="ball"> of its max radius. Both axes
/// share one scale so ball outlines stay circular.
inline std::string scatter_svg(const Dataset& ds, std::span<const int> labels,
                               const BallSet* balls, const ScatterOptions& opt = {}) {
  if (opt.dim_x >= ds.dim() || opt.dim_y >= ds.dim())
    throw InvalidArgument("plot dimension out of range for " + std::to_string(ds.dim()) +
                          "-dimensional data");
  if (!labels.empty() && labels.size() != ds.size())
    throw InvalidArgument("label count does not match point count");

  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto p = ds.point(i);
    lo_x = std::min(lo_x, p[opt.dim_x]);
    hi_x = std::max(hi_x, p[opt.dim_x]);
    lo_y = std::min(lo_y, p[opt.dim_y]);
    hi_y = std::max(hi_y, p[opt.dim_y]);
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double scale = (opt.size - 2.0 * opt.margin) / span;
  auto sx = [&](double x) { return opt.margin + (x - lo_x) * scale; };
  auto sy = [&](double y) { return opt.size - opt.margin - (y - lo_y) * scale; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_detail::num(opt.size) +
         "\" height=\"" + svg_detail::num(opt.size) + "\" viewBox=\"0 0 " +
         svg_detail::num(opt.size) + " " + svg_detail::num(opt.size) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g>\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto p = ds.point(i);
    const int label = labels.empty() ? 0 : labels[i];
    out += "<circle class=\"point\" cx=\"" + svg_detail::num(sx(p[opt.dim_x])) + "\" cy=\"" +
           svg_detail::num(sy(p[opt.dim_y])) + "\" r=\"" + svg_detail::num(opt.marker_radius) +
           "\" fill=\"" + svg_detail::color(label) + "\"/>\n";
  }
  out += "</g>\n";
  if (balls) {
    out += "<g fill=\"none\" stroke=\"#333333\" stroke-width=\"0.8\">\n";
    for (const auto& b : balls->balls) {
      out += "<circle class=\"ball\" cx=\"" + svg_detail::num(sx(b.center[opt.dim_x])) +
             "\" cy=\"" + svg_detail::num(sy(b.center[opt.dim_y])) + "\" r=\"" +
             svg_detail::num(b.max_radius * scale) + "\"/>\n";
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace gbct
