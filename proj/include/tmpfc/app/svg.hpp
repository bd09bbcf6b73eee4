#pragma once

#include <span>
#include <string>
#include <vector>

namespace tmpfc::app {

// Minimal deterministic SVG plotting: fixed-precision coordinates, no
// timestamps, so plots can be diffed in tests.
class Plot {
 public:
  Plot(double width, double height, std::string title, std::string x_label, std::string y_label);

  /// Expands the data range to include these values; call before drawing.
  void include(std::span<const double> xs, std::span<const double> ys);
  void include_point(double x, double y);

  void polyline(std::span<const double> xs, std::span<const double> ys, const std::string& color, bool dashed = false);
  void points(std::span<const double> xs, std::span<const double> ys, const std::string& color);
  void hline(double y, const std::string& color, const std::string& label, bool dashed = true);
  void vline(double x, const std::string& color, const std::string& label, bool dashed = true);
  void fill_between(std::span<const double> xs, std::span<const double> lo, std::span<const double> hi,
                    const std::string& color);
  void box(double x, double half_width, double whisker_lo, double q1, double median, double q3, double whisker_hi,
           const std::string& color);
  void tick_label(double x, const std::string& text);
  void note(const std::string& text);

  std::string render(double offset_x, double offset_y) const;
  double width() const { return width_; }
  double height() const { return height_; }

 private:
  struct Op {
    enum Kind { Line, Dots, HLine, VLine, Band, Box, XTick } kind;
    std::vector<double> a, b, c;
    std::string color;
    std::string label;
    bool dashed = false;
  };

  double px(double x) const;
  double py(double y) const;

  double width_, height_;
  std::string title_, x_label_, y_label_;
  double x_min_ = 0.0, x_max_ = 1.0, y_min_ = 0.0, y_max_ = 1.0;
  bool has_range_ = false;
  std::vector<Op> ops_;
  std::vector<std::string> notes_;
};

/// Panels laid out left to right in one document.
std::string svg_document(const std::vector<Plot>& panels);

}  // namespace tmpfc::app
