#include "twostation/svg_plot.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twostation {

namespace {

constexpr double kWidth = 640.0, kHeight = 440.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 55.0;

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)) {}

void SvgPlot::set_x_range(double lo, double hi) {
  x_lo_ = lo;
  x_hi_ = hi > lo ? hi : lo + 1.0;
}

void SvgPlot::set_y_range(double lo, double hi) {
  y_lo_ = lo;
  y_hi_ = hi > lo ? hi : lo + 1.0;
}

void SvgPlot::add_bar(double x0, double x1, double height) {
  bars_.push_back({x0, x1, height});
}

void SvgPlot::add_polyline(
    const std::vector<std::pair<double, double>>& points,
    const std::string& color, double stroke_width) {
  lines_.push_back({points, color, stroke_width});
}

void SvgPlot::add_legend(
    const std::vector<std::pair<std::string, std::string>>& label_color_pairs) {
  legend_ = label_color_pairs;
}

double SvgPlot::to_px_x(double x) const {
  return kLeft + (x - x_lo_) / (x_hi_ - x_lo_) * (kWidth - kLeft - kRight);
}

double SvgPlot::to_px_y(double y) const {
  return kHeight - kBottom -
         (y - y_lo_) / (y_hi_ - y_lo_) * (kHeight - kTop - kBottom);
}

std::string SvgPlot::render() const {
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << title_ << "</text>\n";

  for (const Bar& b : bars_) {
    const double px0 = to_px_x(b.x0);
    const double px1 = to_px_x(b.x1);
    const double py = to_px_y(b.height);
    const double base = to_px_y(std::max(y_lo_, 0.0));
    svg << "<rect x=\"" << px0 << "\" y=\"" << py << "\" width=\""
        << std::max(px1 - px0 - 0.5, 0.5) << "\" height=\""
        << std::max(base - py, 0.0)
        << "\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n";
  }

  for (const Line& line : lines_) {
    svg << "<polyline fill=\"none\" stroke=\"" << line.color
        << "\" stroke-width=\"" << line.stroke_width << "\" points=\"";
    for (const auto& [x, y] : line.points)
      svg << to_px_x(x) << "," << to_px_y(y) << " ";
    svg << "\"/>\n";
  }

  // Axes and ticks.
  const double ax_y = kHeight - kBottom;
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << ax_y << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << ax_y
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << ax_y << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double fx = x_lo_ + (x_hi_ - x_lo_) * i / n_ticks;
    const double px = to_px_x(fx);
    svg << "<line x1=\"" << px << "\" y1=\"" << ax_y << "\" x2=\"" << px
        << "\" y2=\"" << ax_y + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << ax_y + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt_tick(fx) << "</text>\n";

    const double fy = y_lo_ + (y_hi_ - y_lo_) * i / n_ticks;
    const double py = to_px_y(fy);
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\""
        << kLeft << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt_tick(fy) << "</text>\n";
  }
  svg << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\""
      << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << x_label_ << "</text>\n";
  svg << "<text x=\"16\" y=\"" << (kTop + ax_y) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 16 "
      << (kTop + ax_y) / 2 << ")\">" << y_label_ << "</text>\n";

  double ly = kTop + 8;
  for (const auto& [label, color] : legend_) {
    svg << "<line x1=\"" << kWidth - kRight - 150 << "\" y1=\"" << ly
        << "\" x2=\"" << kWidth - kRight - 120 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kWidth - kRight - 114 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << label
        << "</text>\n";
    ly += 18;
  }

  svg << "</svg>\n";
  return svg.str();
}

void SvgPlot::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << render();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace twostation
