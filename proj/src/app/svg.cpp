#include "tmpfc/app/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tmpfc::app {
namespace {

constexpr double kMarginLeft = 60.0, kMarginRight = 20.0, kMarginTop = 30.0, kMarginBottom = 45.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

Plot::Plot(double width, double height, std::string title, std::string x_label, std::string y_label)
    : width_(width), height_(height), title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void Plot::include_point(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) return;
  if (!has_range_) {
    x_min_ = x_max_ = x;
    y_min_ = y_max_ = y;
    has_range_ = true;
    return;
  }
  x_min_ = std::min(x_min_, x);
  x_max_ = std::max(x_max_, x);
  y_min_ = std::min(y_min_, y);
  y_max_ = std::max(y_max_, y);
}

void Plot::include(std::span<const double> xs, std::span<const double> ys) {
  for (std::size_t i = 0; i < std::min(xs.size(), ys.size()); ++i) include_point(xs[i], ys[i]);
}

double Plot::px(double x) const {
  const double span = x_max_ > x_min_ ? x_max_ - x_min_ : 1.0;
  return kMarginLeft + (x - x_min_) / span * (width_ - kMarginLeft - kMarginRight);
}

double Plot::py(double y) const {
  const double span = y_max_ > y_min_ ? y_max_ - y_min_ : 1.0;
  return height_ - kMarginBottom - (y - y_min_) / span * (height_ - kMarginTop - kMarginBottom);
}

void Plot::polyline(std::span<const double> xs, std::span<const double> ys, const std::string& color, bool dashed) {
  ops_.push_back({Op::Line, {xs.begin(), xs.end()}, {ys.begin(), ys.end()}, {}, color, {}, dashed});
}

void Plot::points(std::span<const double> xs, std::span<const double> ys, const std::string& color) {
  ops_.push_back({Op::Dots, {xs.begin(), xs.end()}, {ys.begin(), ys.end()}, {}, color, {}, false});
}

void Plot::hline(double y, const std::string& color, const std::string& label, bool dashed) {
  include_point(x_min_, y);
  ops_.push_back({Op::HLine, {y}, {}, {}, color, label, dashed});
}

void Plot::vline(double x, const std::string& color, const std::string& label, bool dashed) {
  include_point(x, y_min_);
  ops_.push_back({Op::VLine, {x}, {}, {}, color, label, dashed});
}

void Plot::fill_between(std::span<const double> xs, std::span<const double> lo, std::span<const double> hi,
                        const std::string& color) {
  include(xs, lo);
  include(xs, hi);
  Op op{Op::Band, {xs.begin(), xs.end()}, {lo.begin(), lo.end()}, {hi.begin(), hi.end()}, color, {}, false};
  ops_.push_back(std::move(op));
}

void Plot::box(double x, double half_width, double whisker_lo, double q1, double median, double q3, double whisker_hi,
               const std::string& color) {
  include_point(x - half_width, whisker_lo);
  include_point(x + half_width, whisker_hi);
  ops_.push_back({Op::Box, {x, half_width}, {whisker_lo, q1, median, q3, whisker_hi}, {}, color, {}, false});
}

void Plot::tick_label(double x, const std::string& text) { ops_.push_back({Op::XTick, {x}, {}, {}, "#000", text, false}); }

void Plot::note(const std::string& text) { notes_.push_back(text); }

std::string Plot::render(double ox, double oy) const {
  std::string s = "<g transform=\"translate(" + num(ox) + "," + num(oy) + ")\">\n";
  const double left = kMarginLeft, right = width_ - kMarginRight, top = kMarginTop, bottom = height_ - kMarginBottom;
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) + "\" fill=\"#fff\"/>\n";
  s += "<text x=\"" + num(width_ / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" + escape(title_) + "</text>\n";
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(right) + "\" y2=\"" + num(bottom) +
       "\" stroke=\"#000\"/>\n";
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" + num(bottom) +
       "\" stroke=\"#000\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_min_ + (x_max_ - x_min_) * i / 4.0;
    const double yv = y_min_ + (y_max_ - y_min_) * i / 4.0;
    s += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(bottom + 14) + "\" text-anchor=\"middle\" font-size=\"10\">" +
         tick_text(xv) + "</text>\n";
    s += "<text x=\"" + num(left - 4) + "\" y=\"" + num(py(yv) + 3) + "\" text-anchor=\"end\" font-size=\"10\">" +
         tick_text(yv) + "</text>\n";
  }
  s += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num(height_ - 8) + "\" text-anchor=\"middle\" font-size=\"11\">" +
       escape(x_label_) + "</text>\n";
  s += "<text x=\"14\" y=\"" + num((top + bottom) / 2) + "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 " +
       num((top + bottom) / 2) + ")\">" + escape(y_label_) + "</text>\n";

  for (const auto& op : ops_) {
    const std::string dash = op.dashed ? " stroke-dasharray=\"5,4\"" : "";
    switch (op.kind) {
      case Op::Line: {
        s += "<polyline fill=\"none\" stroke=\"" + op.color + "\" stroke-width=\"1.5\"" + dash + " points=\"";
        for (std::size_t i = 0; i < op.a.size(); ++i) s += num(px(op.a[i])) + "," + num(py(op.b[i])) + " ";
        s += "\"/>\n";
        break;
      }
      case Op::Dots:
        for (std::size_t i = 0; i < op.a.size(); ++i) {
          s += "<circle cx=\"" + num(px(op.a[i])) + "\" cy=\"" + num(py(op.b[i])) + "\" r=\"2.5\" fill=\"" + op.color + "\"/>\n";
        }
        break;
      case Op::HLine:
        s += "<line x1=\"" + num(left) + "\" y1=\"" + num(py(op.a[0])) + "\" x2=\"" + num(right) + "\" y2=\"" +
             num(py(op.a[0])) + "\" stroke=\"" + op.color + "\"" + dash + "/>\n";
        if (!op.label.empty()) {
          s += "<text x=\"" + num(right - 2) + "\" y=\"" + num(py(op.a[0]) - 3) + "\" text-anchor=\"end\" font-size=\"10\" fill=\"" +
               op.color + "\">" + escape(op.label) + "</text>\n";
        }
        break;
      case Op::VLine:
        s += "<line x1=\"" + num(px(op.a[0])) + "\" y1=\"" + num(top) + "\" x2=\"" + num(px(op.a[0])) + "\" y2=\"" +
             num(bottom) + "\" stroke=\"" + op.color + "\"" + dash + "/>\n";
        if (!op.label.empty()) {
          s += "<text x=\"" + num(px(op.a[0]) + 3) + "\" y=\"" + num(top + 10) + "\" font-size=\"10\" fill=\"" + op.color +
               "\">" + escape(op.label) + "</text>\n";
        }
        break;
      case Op::Band: {
        s += "<polygon fill=\"" + op.color + "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < op.a.size(); ++i) s += num(px(op.a[i])) + "," + num(py(op.c[i])) + " ";
        for (std::size_t i = op.a.size(); i-- > 0;) s += num(px(op.a[i])) + "," + num(py(op.b[i])) + " ";
        s += "\"/>\n";
        break;
      }
      case Op::Box: {
        const double x = op.a[0], hw = op.a[1];
        const double wl = op.b[0], q1 = op.b[1], med = op.b[2], q3 = op.b[3], wh = op.b[4];
        s += "<line x1=\"" + num(px(x)) + "\" y1=\"" + num(py(wl)) + "\" x2=\"" + num(px(x)) + "\" y2=\"" + num(py(wh)) +
             "\" stroke=\"" + op.color + "\"/>\n";
        s += "<rect x=\"" + num(px(x - hw)) + "\" y=\"" + num(py(q3)) + "\" width=\"" + num(px(x + hw) - px(x - hw)) +
             "\" height=\"" + num(std::max(0.0, py(q1) - py(q3))) + "\" fill=\"#fff\" stroke=\"" + op.color + "\"/>\n";
        s += "<line x1=\"" + num(px(x - hw)) + "\" y1=\"" + num(py(med)) + "\" x2=\"" + num(px(x + hw)) + "\" y2=\"" +
             num(py(med)) + "\" stroke=\"" + op.color + "\" stroke-width=\"2\"/>\n";
        break;
      }
      case Op::XTick:
        s += "<text x=\"" + num(px(op.a[0])) + "\" y=\"" + num(bottom + 28) + "\" text-anchor=\"middle\" font-size=\"10\">" +
             escape(op.label) + "</text>\n";
        break;
    }
  }
  double ny = top + 12;
  for (const auto& n : notes_) {
    s += "<text x=\"" + num(left + 6) + "\" y=\"" + num(ny) + "\" font-size=\"10\">" + escape(n) + "</text>\n";
    ny += 13;
  }
  s += "</g>\n";
  return s;
}

std::string svg_document(const std::vector<Plot>& panels) {
  double w = 0.0, h = 0.0;
  for (const auto& p : panels) {
    w += p.width();
    h = std::max(h, p.height());
  }
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) +
                  "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
  double x = 0.0;
  for (const auto& p : panels) {
    s += p.render(x, 0.0);
    x += p.width();
  }
  s += "</svg>\n";
  return s;
}

}  // namespace tmpfc::app
