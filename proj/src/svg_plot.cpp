#include "tvopt/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tvopt::svg {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kMargin = 60.0;

struct Box {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;

  void grow(double x, double y, bool& first) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    if (first) {
      xmin = xmax = x;
      ymin = ymax = y;
      first = false;
      return;
    }
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }

  void pad() {
    const double dx = xmax - xmin, dy = ymax - ymin;
    const double px = dx > 0 ? 0.05 * dx : 1.0;
    const double py = dy > 0 ? 0.05 * dy : 1.0;
    xmin -= px;
    xmax += px;
    ymin -= py;
    ymax += py;
  }
};

double map_x(const Box& b, double x) {
  return kMargin + (x - b.xmin) / (b.xmax - b.xmin) * (kWidth - 2 * kMargin);
}

double map_y(const Box& b, double y) {
  return kHeight - kMargin - (y - b.ymin) / (b.ymax - b.ymin) * (kHeight - 2 * kMargin);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

// Keep path sizes bounded; plots do not need every integration step.
size_t plot_stride(size_t n) { return std::max<size_t>(1, n / 1500); }

void emit_polyline(std::ostream& out, const Box& b, const Series& s) {
  if (s.x.empty()) return;
  out << "<polyline fill=\"none\" stroke=\"" << s.color
      << "\" stroke-width=\"1.4\" points=\"";
  const size_t stride = plot_stride(s.x.size());
  for (size_t i = 0; i < s.x.size(); i += stride) {
    if (!std::isfinite(s.y[i])) continue;
    out << fmt(map_x(b, s.x[i])) << ',' << fmt(map_y(b, s.y[i])) << ' ';
  }
  out << "\"/>\n";
}

void emit_axes(std::ostream& out, const Box& b, const std::string& title,
               const std::string& xlabel, const std::string& ylabel) {
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
      << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = b.xmin + (b.xmax - b.xmin) * i / 5.0;
    const double fy = b.ymin + (b.ymax - b.ymin) * i / 5.0;
    const double px = map_x(b, fx);
    const double py = map_y(b, fy);
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
        << fmt(px) << "\" y2=\"" << kHeight - kMargin + 5 << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << fmt(px) << "\" y=\"" << kHeight - kMargin + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
    out << "<line x1=\"" << kMargin - 5 << "\" y1=\"" << fmt(py) << "\" x2=\"" << kMargin
        << "\" y2=\"" << fmt(py) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << kMargin - 8 << "\" y=\"" << fmt(py + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
  }
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" font-size=\"15\" "
      << "text-anchor=\"middle\">" << title << "</text>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" font-size=\"12\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kHeight / 2 << ")\">" << ylabel << "</text>\n";
}

void emit_legend(std::ostream& out, const std::vector<Series>& series) {
  double y = kMargin + 16;
  for (const Series& s : series) {
    if (s.label.empty()) continue;
    out << "<line x1=\"" << kWidth - kMargin - 130 << "\" y1=\"" << y - 4 << "\" x2=\""
        << kWidth - kMargin - 105 << "\" y2=\"" << y - 4 << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kMargin - 100 << "\" y=\"" << y
        << "\" font-size=\"12\">" << s.label << "</text>\n";
    y += 16;
  }
}

}  // namespace

void write_line_plot(const std::filesystem::path& path, const LinePlot& plot) {
  Box b;
  bool first = true;
  for (const Series& s : plot.series) {
    for (size_t i = 0; i < s.x.size(); ++i) b.grow(s.x[i], s.y[i], first);
  }
  if (plot.hline) b.grow(b.xmin, *plot.hline, first);
  if (first) b = Box{};
  b.pad();

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open plot file for writing: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (plot.shade_above && !plot.shade_above->x.empty()) {
    const Series& s = *plot.shade_above;
    out << "<polygon fill=\"#cccccc\" fill-opacity=\"0.6\" stroke=\"none\" points=\"";
    const size_t stride = plot_stride(s.x.size());
    for (size_t i = 0; i < s.x.size(); i += stride) {
      const double y = std::min(std::max(s.y[i], b.ymin), b.ymax);
      out << fmt(map_x(b, s.x[i])) << ',' << fmt(map_y(b, y)) << ' ';
    }
    out << fmt(map_x(b, s.x.back())) << ',' << fmt(map_y(b, b.ymax)) << ' ';
    out << fmt(map_x(b, s.x.front())) << ',' << fmt(map_y(b, b.ymax));
    out << "\"/>\n";
  }
  emit_axes(out, b, plot.title, plot.xlabel, plot.ylabel);
  if (plot.hline && *plot.hline >= b.ymin && *plot.hline <= b.ymax) {
    const double py = map_y(b, *plot.hline);
    out << "<line x1=\"" << kMargin << "\" y1=\"" << fmt(py) << "\" x2=\""
        << kWidth - kMargin << "\" y2=\"" << fmt(py)
        << "\" stroke=\"#777\" stroke-dasharray=\"6 4\"/>\n";
    if (!plot.hline_label.empty()) {
      out << "<text x=\"" << kMargin + 6 << "\" y=\"" << fmt(py - 5)
          << "\" font-size=\"11\" fill=\"#555\">" << plot.hline_label << "</text>\n";
    }
  }
  for (const Series& s : plot.series) emit_polyline(out, b, s);
  emit_legend(out, plot.series);
  out << "</svg>\n";
}

void write_planar_plot(const std::filesystem::path& path, const PlanarPlot& plot) {
  Box b;
  bool first = true;
  for (const Series& s : plot.paths) {
    for (size_t i = 0; i < s.x.size(); ++i) b.grow(s.x[i], s.y[i], first);
  }
  for (const Disc& d : plot.discs) {
    b.grow(d.center(0) - d.radius, d.center(1) - d.radius, first);
    b.grow(d.center(0) + d.radius, d.center(1) + d.radius, first);
  }
  if (first) b = Box{};
  b.pad();
  // Equal aspect: widen the shorter extent.
  const double spanx = b.xmax - b.xmin, spany = b.ymax - b.ymin;
  const double usable_w = kWidth - 2 * kMargin, usable_h = kHeight - 2 * kMargin;
  if (spanx / usable_w < spany / usable_h) {
    const double want = spany * usable_w / usable_h;
    const double mid = 0.5 * (b.xmin + b.xmax);
    b.xmin = mid - want / 2;
    b.xmax = mid + want / 2;
  } else {
    const double want = spanx * usable_h / usable_w;
    const double mid = 0.5 * (b.ymin + b.ymax);
    b.ymin = mid - want / 2;
    b.ymax = mid + want / 2;
  }

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open plot file for writing: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  emit_axes(out, b, plot.title, "x1", "x2");
  const double rscale = (kWidth - 2 * kMargin) / (b.xmax - b.xmin);
  for (const Disc& d : plot.discs) {
    out << "<circle cx=\"" << fmt(map_x(b, d.center(0))) << "\" cy=\""
        << fmt(map_y(b, d.center(1))) << "\" r=\"" << fmt(d.radius * rscale)
        << "\" fill=\"#bbbbbb\" stroke=\"#555\"/>\n";
  }
  for (const Series& s : plot.paths) emit_polyline(out, b, s);
  emit_legend(out, plot.paths);
  out << "</svg>\n";
}

}  // namespace tvopt::svg
