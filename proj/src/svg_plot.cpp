#include "dualgan/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "dualgan/errors.hpp"

namespace dualgan {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

struct Range {
  double lo = 0.0, hi = 1.0;
  void expand(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi <= lo) hi = lo + 1.0;
    const double p = 0.03 * (hi - lo);
    lo -= p;
    hi += p;
  }
};

double map_x(double v, const Range& r) {
  return kMarginLeft + (v - r.lo) / (r.hi - r.lo) * (kWidth - kMarginLeft - kMarginRight);
}

double map_y(double v, const Range& r) {
  return kHeight - kMarginBottom -
         (v - r.lo) / (r.hi - r.lo) * (kHeight - kMarginTop - kMarginBottom);
}

std::ofstream open_svg(const std::string& path, const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open plot file for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\">\n";
  if (!config_hash.empty()) out << "<!-- config=" << config_hash << " -->\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out;
}

void draw_frame(std::ofstream& out, const std::string& title, const std::string& x_label,
                const std::string& y_label, const Range& xr, const Range& yr) {
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << kWidth - kMarginLeft - kMarginRight << "\" height=\""
      << kHeight - kMarginTop - kMarginBottom << "\" fill=\"none\" stroke=\"#444\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << kHeight / 2
      << ")\">" << y_label << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    out << "<text x=\"" << map_x(xv, xr) << "\" y=\"" << kHeight - kMarginBottom + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << static_cast<float>(xv)
        << "</text>\n";
    out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << map_y(yv, yr) + 3
        << "\" text-anchor=\"end\" font-size=\"10\">" << static_cast<float>(yv) << "</text>\n";
  }
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series, const std::string& config_hash) {
  Range xr{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
  Range yr = xr;
  for (const PlotSeries& s : series) {
    for (double v : s.x) xr.expand(v);
    for (double v : s.y) yr.expand(v);
  }
  if (xr.lo > xr.hi) xr = {0.0, 1.0};
  if (yr.lo > yr.hi) yr = {0.0, 1.0};
  xr.pad();
  yr.pad();

  std::ofstream out = open_svg(path, config_hash);
  draw_frame(out, title, x_label, y_label, xr, yr);
  int legend_y = kMarginTop + 14;
  for (const PlotSeries& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      out << map_x(s.x[i], xr) << "," << map_y(s.y[i], yr) << " ";
    }
    out << "\"/>\n";
    out << "<text x=\"" << kWidth - kMarginRight - 6 << "\" y=\"" << legend_y
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << s.color << "\">" << s.label
        << "</text>\n";
    legend_y += 14;
  }
  out << "</svg>\n";
}

void write_scatter_chart(const std::string& path, const std::string& title,
                         const std::vector<ScatterSet>& sets, const std::string& config_hash) {
  Range xr{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
  Range yr = xr;
  for (const ScatterSet& s : sets) {
    for (int i = 0; i < s.points.rows(); ++i) {
      xr.expand(s.points(i, 0));
      yr.expand(s.points(i, 1));
    }
  }
  if (xr.lo > xr.hi) xr = {0.0, 1.0};
  if (yr.lo > yr.hi) yr = {0.0, 1.0};
  xr.pad();
  yr.pad();

  std::ofstream out = open_svg(path, config_hash);
  draw_frame(out, title, "x", "y", xr, yr);
  int legend_y = kMarginTop + 14;
  for (const ScatterSet& s : sets) {
    for (int i = 0; i < s.points.rows(); ++i) {
      out << "<circle cx=\"" << map_x(s.points(i, 0), xr) << "\" cy=\""
          << map_y(s.points(i, 1), yr) << "\" r=\"2\" fill=\"" << s.color
          << "\" fill-opacity=\"0.5\"/>\n";
    }
    out << "<text x=\"" << kWidth - kMarginRight - 6 << "\" y=\"" << legend_y
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << s.color << "\">" << s.label
        << "</text>\n";
    legend_y += 14;
  }
  out << "</svg>\n";
}

void write_histogram_heatmap(const std::string& path, const std::string& title,
                             const std::vector<double>& iters, const Matrix& bin_masses,
                             const std::string& config_hash) {
  if (static_cast<int>(iters.size()) != bin_masses.rows()) {
    throw ValidationError("write_histogram_heatmap: row count mismatch");
  }
  std::ofstream out = open_svg(path, config_hash);
  Range xr{iters.empty() ? 0.0 : iters.front(), iters.empty() ? 1.0 : iters.back()};
  Range yr{0.0, 1.0};
  if (xr.hi <= xr.lo) xr.hi = xr.lo + 1.0;
  draw_frame(out, title, "iteration", "2n lambda", xr, yr);

  const double max_mass = bin_masses.size() > 0 ? bin_masses.maxCoeff() : 1.0;
  const int bins = static_cast<int>(bin_masses.cols());
  const double cell_h = (kHeight - kMarginTop - kMarginBottom) / static_cast<double>(bins);
  for (int i = 0; i < bin_masses.rows(); ++i) {
    const double x0 = map_x(iters[i], xr);
    const double x1 = (i + 1 < bin_masses.rows()) ? map_x(iters[i + 1], xr) : x0 + 2.0;
    for (int b = 0; b < bins; ++b) {
      const double mass = bin_masses(i, b);
      if (mass <= 0.0) continue;
      const double intensity = max_mass > 0.0 ? mass / max_mass : 0.0;
      const int shade = static_cast<int>(255.0 * (1.0 - intensity));
      const double y_top = map_y(static_cast<double>(b + 1) / bins, yr);
      out << "<rect x=\"" << x0 << "\" y=\"" << y_top << "\" width=\""
          << std::max(x1 - x0, 0.5) << "\" height=\"" << cell_h << "\" fill=\"rgb(" << shade
          << "," << shade << ",255)\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace dualgan
