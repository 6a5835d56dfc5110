#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace twostation {

// Minimal static SVG writer: axes with numeric ticks, bars, polylines.
// Enough for the histogram and sweep figures; no external plotting
// dependency.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void set_x_range(double lo, double hi);
  void set_y_range(double lo, double hi);

  void add_bar(double x0, double x1, double height);
  void add_polyline(const std::vector<std::pair<double, double>>& points,
                    const std::string& color, double stroke_width = 1.5);
  void add_legend(const std::vector<std::pair<std::string, std::string>>&
                      label_color_pairs);

  std::string render() const;
  void write(const std::filesystem::path& path) const;

 private:
  struct Bar {
    double x0, x1, height;
  };
  struct Line {
    std::vector<std::pair<double, double>> points;
    std::string color;
    double stroke_width;
  };

  double to_px_x(double x) const;
  double to_px_y(double y) const;

  std::string title_, x_label_, y_label_;
  double x_lo_ = 0.0, x_hi_ = 1.0, y_lo_ = 0.0, y_hi_ = 1.0;
  std::vector<Bar> bars_;
  std::vector<Line> lines_;
  std::vector<std::pair<std::string, std::string>> legend_;
};

}  // namespace twostation
