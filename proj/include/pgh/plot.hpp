#pragma once

// Static SVG line charts of trace CSVs: objective gap, K, or recovery error
// against the global iteration counter, one polyline per trace file.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pgh/errors.hpp"
#include "pgh/io.hpp"

namespace pgh {

enum class PlotKind { gap, k, recovery };

inline PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "gap") return PlotKind::gap;
  if (s == "K" || s == "k") return PlotKind::k;
  if (s == "recovery") return PlotKind::recovery;
  throw contract_error("unknown plot kind '" + s + "' (expected gap, K or recovery)");
}

inline bool log_scale(PlotKind kind) { return kind != PlotKind::k; }

struct PlotSeries {
  std::string name;
  std::vector<double> x;      // iter_global
  std::vector<double> y;
  std::vector<int> stage;
};

/// Extracts the plotted series from a trace table. On log-scale plots,
/// points with non-positive ordinate are dropped.
inline PlotSeries series_from_table(const CsvTable& table, PlotKind kind, std::string name) {
  const char* column = kind == PlotKind::gap ? "gap" : kind == PlotKind::k ? "K" : "recovery_err";
  const std::size_t xc = table.column("iter_global");
  const std::size_t yc = table.column(column);
  const std::size_t sc = table.column("stage");
  PlotSeries s;
  s.name = std::move(name);
  for (const auto& row : table.rows) {
    const double y = row[yc];
    if (!std::isfinite(y) || (log_scale(kind) && !(y > 0.0))) continue;
    s.x.push_back(row[xc]);
    s.y.push_back(y);
    s.stage.push_back(static_cast<int>(row[sc]));
  }
  return s;
}

inline PlotSeries load_series(const std::filesystem::path& csv, PlotKind kind) {
  return series_from_table(read_csv_table(csv), kind, csv.stem().string());
}

namespace detail {

inline const char* series_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_svg(const std::vector<PlotSeries>& series, PlotKind kind) {
  if (series.empty()) throw contract_error("plot: no series to draw");
  constexpr double width = 800, height = 500;
  constexpr double left = 80, right = 180, top = 30, bottom = 60;
  const bool logy = log_scale(kind);

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = logy ? std::log10(s.y[i]) : s.y[i];
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  }
  if (logy) {
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  const char* ylabel = kind == PlotKind::gap ? "objective gap"
                       : kind == PlotKind::k ? "K"
                                             : "recovery error";
  std::ostringstream svg;
  svg.precision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  // y ticks: decades on log plots, five even steps otherwise
  const int yticks = logy ? static_cast<int>(ymax - ymin) : 5;
  const int ystride = std::max(1, yticks / 10);
  for (int t = 0; t <= yticks; t += ystride) {
    const double yv = ymin + (ymax - ymin) * t / yticks;
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << left << "\" y2=\""
        << sy(yv) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">";
    if (logy) {
      svg << "1e" << static_cast<int>(std::lround(yv));
    } else {
      svg << yv;
    }
    svg << "</text>\n";
  }
  for (int t = 0; t <= 5; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 5.0;
    svg << "<line x1=\"" << sx(xv) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(xv)
        << "\" y2=\"" << top + ph + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << std::lround(xv) << "</text>\n";
  }
  svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
      << "\" font-size=\"13\" text-anchor=\"middle\">iteration</text>\n";
  svg << "<text x=\"18\" y=\"" << top + ph / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 18 " << top + ph / 2 << ")\">" << ylabel << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    svg << "<polyline fill=\"none\" stroke=\"" << detail::series_color(i)
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t p = 0; p < s.x.size(); ++p) {
      const double y = logy ? std::log10(s.y[p]) : s.y[p];
      svg << (p ? " " : "") << sx(s.x[p]) << ',' << sy(y);
    }
    svg << "\"/>\n";
    const double ly = top + 20 + 20.0 * static_cast<double>(i);
    svg << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40
        << "\" y2=\"" << ly << "\" stroke=\"" << detail::series_color(i)
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
        << detail::xml_escape(s.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

/// Reads every CSV, renders one chart and writes it to out. Nothing is
/// written when the list is empty or a file fails to parse.
inline void emit_plot(const std::vector<std::filesystem::path>& csvs, PlotKind kind,
                      const std::filesystem::path& out) {
  if (csvs.empty()) throw contract_error("plot: empty trace list");
  std::vector<PlotSeries> series;
  for (const auto& p : csvs) series.push_back(load_series(p, kind));
  const std::string svg = render_svg(series, kind);
  detail::write_text(out, svg);
}

}  // namespace pgh
