#pragma once

#include <string>
#include <vector>

#include "dualgan/types.hpp"

namespace dualgan {

/// Minimal static SVG charts for the experiment artifacts.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

struct ScatterSet {
  std::string label;
  Matrix points;  // n x 2
  std::string color = "#1f77b4";
};

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series, const std::string& config_hash = {});

void write_scatter_chart(const std::string& path, const std::string& title,
                         const std::vector<ScatterSet>& sets,
                         const std::string& config_hash = {});

/// Rows = iterations, columns = histogram bins over [0, 1]; darker = more mass.
void write_histogram_heatmap(const std::string& path, const std::string& title,
                             const std::vector<double>& iters, const Matrix& bin_masses,
                             const std::string& config_hash = {});

}  // namespace dualgan
