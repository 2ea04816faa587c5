#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "mpmab/metrics.hpp"

namespace mpmab {

inline constexpr const char* kCsvHeader =
    "t,pseudo_regret_mean,pseudo_regret_std,realized_regret_mean,realized_regret_std,"
    "collisions_per_user_mean,collisions_per_user_std";

namespace detail {

inline std::string fmt_g(double v, int precision = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace detail

// One row per logged round, LF line endings, fixed column order. The bytes
// are a pure function of the aggregate.
inline std::string csv_string(const TraceAggregate& agg) {
  if (agg.times.empty()) throw std::invalid_argument("csv_string: empty aggregate");
  std::string out = kCsvHeader;
  out += '\n';
  char buf[320];
  for (std::size_t i = 0; i < agg.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%lld,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  static_cast<long long>(agg.times[i]), agg.pseudo_mean[i], agg.pseudo_std[i],
                  agg.realized_mean[i], agg.realized_std[i], agg.collisions_per_user_mean[i],
                  agg.collisions_per_user_std[i]);
    out += buf;
  }
  return out;
}

inline void write_csv(const TraceAggregate& agg, const std::string& path) {
  detail::write_file(path, csv_string(agg));
}

namespace detail {

struct PanelLayout {
  double x0, y0, width, height;
};

// One line plot with a shaded +-1 std band, axes and tick labels.
inline void render_panel(std::string& svg, const PanelLayout& box, const TraceAggregate& agg,
                         const std::vector<double>& mean, const std::vector<double>& dev,
                         const char* title, const char* color, const char* band_color) {
  const double t_min = static_cast<double>(agg.times.front());
  const double t_max = static_cast<double>(agg.times.back());
  double y_max = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) y_max = std::max(y_max, mean[i] + dev[i]);
  if (y_max <= 0.0) y_max = 1.0;
  const double t_span = t_max > t_min ? t_max - t_min : 1.0;
  auto px = [&](double t) { return box.x0 + (t - t_min) / t_span * box.width; };
  auto py = [&](double y) { return box.y0 + box.height - y / y_max * box.height; };
  auto num = [](double v) { return fmt_g(v, 6); };

  svg += "<g>\n";
  svg += "<text class=\"title\" x=\"" + num(box.x0) + "\" y=\"" + num(box.y0 - 12) + "\">";
  svg += title;
  svg += "</text>\n";
  // band
  svg += "<polygon class=\"band\" fill=\"";
  svg += band_color;
  svg += "\" points=\"";
  for (std::size_t i = 0; i < mean.size(); ++i)
    svg += num(px(static_cast<double>(agg.times[i]))) + "," + num(py(mean[i] + dev[i])) + " ";
  for (std::size_t i = mean.size(); i-- > 0;)
    svg += num(px(static_cast<double>(agg.times[i]))) + "," +
           num(py(std::max(0.0, mean[i] - dev[i]))) + " ";
  svg += "\"/>\n";
  // mean line
  svg += "<polyline class=\"line\" stroke=\"";
  svg += color;
  svg += "\" points=\"";
  for (std::size_t i = 0; i < mean.size(); ++i)
    svg += num(px(static_cast<double>(agg.times[i]))) + "," + num(py(mean[i])) + " ";
  svg += "\"/>\n";
  // axes
  svg += "<polyline class=\"axis\" points=\"" + num(box.x0) + "," + num(box.y0) + " " +
         num(box.x0) + "," + num(box.y0 + box.height) + " " + num(box.x0 + box.width) + "," +
         num(box.y0 + box.height) + "\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double t = t_min + t_span * i / 4.0;
    const double y = y_max * i / 4.0;
    svg += "<text class=\"tick\" text-anchor=\"middle\" x=\"" + num(px(t)) + "\" y=\"" +
           num(box.y0 + box.height + 18) + "\">" + num(t) + "</text>\n";
    svg += "<text class=\"tick\" text-anchor=\"end\" x=\"" + num(box.x0 - 6) + "\" y=\"" +
           num(py(y) + 4) + "\">" + num(y) + "</text>\n";
  }
  svg += "</g>\n";
}

}  // namespace detail

// Standalone two-panel figure: cumulative pseudo-regret and cumulative
// collisions per user, mean over repetitions with a +-1 std band.
inline std::string svg_string(const TraceAggregate& agg) {
  if (agg.times.empty()) throw std::invalid_argument("svg_string: empty aggregate");
  std::string svg;
  svg +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 700\" "
      "font-family=\"sans-serif\">\n";
  svg +=
      "<style>.line{fill:none;stroke-width:1.6}.band{stroke:none;opacity:0.35}"
      ".axis{fill:none;stroke:#444;stroke-width:1}.tick{font-size:11px;fill:#444}"
      ".title{font-size:14px;fill:#111}</style>\n";
  svg += "<rect width=\"960\" height=\"700\" fill=\"white\"/>\n";
  detail::render_panel(svg, {80, 50, 820, 240}, agg, agg.pseudo_mean, agg.pseudo_std,
                       "cumulative pseudo-regret (mean, +-1 std over repetitions)", "#1f6fb2",
                       "#a6c9e6");
  detail::render_panel(svg, {80, 400, 820, 240}, agg, agg.collisions_per_user_mean,
                       agg.collisions_per_user_std,
                       "cumulative collisions per user (mean, +-1 std over repetitions)",
                       "#b2541f", "#e6b8a6");
  svg += "</svg>\n";
  return svg;
}

inline void write_svg(const TraceAggregate& agg, const std::string& path) {
  detail::write_file(path, svg_string(agg));
}

}  // namespace mpmab
