#ifndef TVOPT_SVG_PLOT_HPP
#define TVOPT_SVG_PLOT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tvopt/scenarios.hpp"

namespace tvopt::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  std::string label;
};

struct LinePlot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
  // Shade the area above this curve (e.g. an infeasible region).
  std::optional<Series> shade_above;
  std::optional<double> hline;  // dashed reference level
  std::string hline_label;
};

void write_line_plot(const std::filesystem::path& path, const LinePlot& plot);

struct PlanarPlot {
  std::string title;
  std::vector<Series> paths;  // x/y pairs in world coordinates
  std::vector<Disc> discs;
};

void write_planar_plot(const std::filesystem::path& path, const PlanarPlot& plot);

}  // namespace tvopt::svg

#endif  // TVOPT_SVG_PLOT_HPP
