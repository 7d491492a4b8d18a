/*
 * Copyright 2026 The Proprio Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "proprio/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "proprio/common.hpp"

namespace proprio {

namespace {

constexpr const char* kRed = "#d62728";
constexpr const char* kBlue = "#1f77b4";
constexpr const char* kGray = "#404040";
constexpr const char* kAxisColor = "#333333";
constexpr const char* kGridColor = "#dddddd";
constexpr const char* kFont =
    "font-family=\"Helvetica,Arial,sans-serif\" fill=\"#222222\"";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Round a tick step to a 1/2/5 decade value.
double nice_step(double span, int target_ticks) {
  if (span <= 0.0) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  if (norm <= 1.0) return mag;
  if (norm <= 2.0) return 2.0 * mag;
  if (norm <= 5.0) return 5.0 * mag;
  return 10.0 * mag;
}

struct Frame {
  double left, right, top, bottom;  // pixel edges of the plot area
  double x_min, x_max, y_min, y_max;

  double px(double x) const {
    return left + (x - x_min) / (x_max - x_min) * (right - left);
  }
  double py(double y) const {
    return bottom - (y - y_min) / (y_max - y_min) * (bottom - top);
  }
};

void draw_axes(SvgCanvas& canvas, const Frame& f, const std::string& x_label,
               const std::string& y_label) {
  for (double y = std::ceil(f.y_min / nice_step(f.y_max - f.y_min, 5)) *
                  nice_step(f.y_max - f.y_min, 5);
       y <= f.y_max + 1e-12; y += nice_step(f.y_max - f.y_min, 5)) {
    canvas.line(f.left, f.py(y), f.right, f.py(y), kGridColor, 0.7);
    canvas.text(f.left - 6, f.py(y) + 4, fmt(y), 10, "end");
  }
  for (double x = std::ceil(f.x_min / nice_step(f.x_max - f.x_min, 6)) *
                  nice_step(f.x_max - f.x_min, 6);
       x <= f.x_max + 1e-12; x += nice_step(f.x_max - f.x_min, 6)) {
    canvas.line(f.px(x), f.bottom, f.px(x), f.bottom + 4, kAxisColor, 1.0);
    canvas.text(f.px(x), f.bottom + 16, fmt(x), 10, "middle");
  }
  canvas.line(f.left, f.top, f.left, f.bottom, kAxisColor, 1.2);
  canvas.line(f.left, f.bottom, f.right, f.bottom, kAxisColor, 1.2);
  canvas.text((f.left + f.right) / 2, f.bottom + 32, x_label, 11, "middle");
  canvas.text(16, (f.top + f.bottom) / 2, y_label, 11, "middle",
              "transform=\"rotate(-90 16 " +
                  fmt((f.top + f.bottom) / 2) + ")\"");
}

}  // namespace

SvgCanvas::SvgCanvas(int width, int height) : width_(width), height_(height) {
  body_ += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width_) +
           "\" height=\"" + std::to_string(height_) + "\" fill=\"#ffffff\"/>\n";
}

void SvgCanvas::line(double x1, double y1, double x2, double y2,
                     const std::string& stroke, double stroke_width) {
  body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" +
           fmt(x2) + "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke +
           "\" stroke-width=\"" + fmt(stroke_width) + "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& points,
                         const std::string& stroke, double stroke_width) {
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke +
           "\" stroke-width=\"" + fmt(stroke_width) + "\" points=\"";
  for (const auto& [x, y] : points) {
    body_ += fmt(x) + "," + fmt(y) + " ";
  }
  body_ += "\"/>\n";
}

void SvgCanvas::rect(double x, double y, double w, double h,
                     const std::string& fill, double opacity) {
  body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" +
           fmt(w) + "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\"";
  if (opacity != 1.0) {
    body_ += " fill-opacity=\"" + fmt(opacity) + "\"";
  }
  body_ += "/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& content,
                     int font_size, const std::string& anchor,
                     const std::string& extra_attrs) {
  body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" +
           std::to_string(font_size) + "\" text-anchor=\"" + anchor + "\" " +
           kFont;
  if (!extra_attrs.empty()) {
    body_ += " " + extra_attrs;
  }
  body_ += ">" + svg_escape(content) + "</text>\n";
}

std::string SvgCanvas::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
         "\" viewBox=\"0 0 " + std::to_string(width_) + " " +
         std::to_string(height_) + "\">\n" + body_ + "</svg>\n";
}

void SvgCanvas::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot open for writing: " + path);
  }
  out << str();
  if (!out) {
    throw ConfigError("write failed: " + path);
  }
}

std::string svg_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

void write_ablation_svg(const std::string& path,
                        const std::vector<AblationCurve>& curves,
                        AblationAxis axis, double bar_magnification) {
  if (curves.empty() || curves.front().points.empty()) {
    throw ConfigError("ablation svg: no curves");
  }

  // Across-trial mean and std at each ratio, per metric.
  std::map<double, std::vector<double>> mean_vals;
  std::map<double, std::vector<double>> max_vals;
  for (const AblationCurve& c : curves) {
    for (const AblationPoint& p : c.points) {
      mean_vals[p.ratio].push_back(
          ablation_value(p, AblationMetric::kMean, axis));
      max_vals[p.ratio].push_back(
          ablation_value(p, AblationMetric::kMax, axis));
    }
  }
  auto summarize = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double sd =
        v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return std::pair<double, double>(m, sd);
  };

  double y_max = 0.0;
  for (const auto& [ratio, vals] : max_vals) {
    const auto [m, sd] = summarize(vals);
    y_max = std::max(y_max, m + sd * bar_magnification);
  }
  y_max = std::max(y_max, 1e-9);

  SvgCanvas canvas(640, 420);
  Frame f{60, 610, 46, 360, 0.0, 1.0, 0.0, y_max * 1.08};
  draw_axes(canvas, f, "sensor reduction ratio",
            std::string(ablation_axis_name(axis)) + " error (deg)");

  const char* colors[2] = {kBlue, kRed};
  const std::map<double, std::vector<double>>* tables[2] = {&mean_vals,
                                                            &max_vals};
  const char* names[2] = {"mean abs error", "max abs error"};
  for (int k = 0; k < 2; ++k) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [ratio, vals] : *tables[k]) {
      const auto [m, sd] = summarize(vals);
      pts.push_back({f.px(ratio), f.py(m)});
      const double half = sd * bar_magnification;
      canvas.line(f.px(ratio), f.py(std::max(0.0, m - half)), f.px(ratio),
                  f.py(std::min(f.y_max, m + half)), colors[k], 0.8);
    }
    canvas.polyline(pts, colors[k], 1.6);
    canvas.rect(f.left + 12, f.top + 8 + 16 * k, 14, 4, colors[k]);
    canvas.text(f.left + 30, f.top + 13 + 16 * k, names[k], 10);
  }

  std::string title = std::string(ablation_axis_name(axis)) +
                      " error vs sensor reduction (" +
                      std::to_string(curves.size()) + " trials)";
  if (bar_magnification != 1.0) {
    title += ", error bars x" + fmt(bar_magnification);
  }
  canvas.text(f.left, 24, title, 13);
  canvas.write(path);
}

void write_shap_svg(const std::string& path, const ShapReport& report,
                    int most_frequent, const std::string& title) {
  const auto n = static_cast<int>(report.aggregate.size());
  if (n == 0) {
    throw ConfigError("shap svg: empty report");
  }
  double y_max = 1e-12;
  for (double a : report.aggregate) y_max = std::max(y_max, a);

  SvgCanvas canvas(760, 380);
  Frame f{56, 730, 46, 320, -0.5, n - 0.5, 0.0, y_max * 1.08};
  // Horizontal grid only; the x axis is categorical.
  const double step = nice_step(f.y_max, 5);
  for (double y = 0.0; y <= f.y_max + 1e-12; y += step) {
    canvas.line(f.left, f.py(y), f.right, f.py(y), kGridColor, 0.7);
    canvas.text(f.left - 6, f.py(y) + 4, fmt(y), 10, "end");
  }

  const double slot = (f.right - f.left) / n;
  const double bar_w = slot * 0.8;
  for (int i = 0; i < n; ++i) {
    std::string fill = kGray;
    double opacity = 1.0;
    if (i == most_frequent) {
      fill = kRed;
    } else if (i == report.top3[0]) {
      fill = kRed;
      opacity = 0.65;
    } else if (i == report.top3[1]) {
      fill = kRed;
      opacity = 0.45;
    } else if (i == report.top3[2]) {
      fill = kRed;
      opacity = 0.30;
    }
    const double x = f.px(static_cast<double>(i)) - bar_w / 2;
    const double top = f.py(report.aggregate[static_cast<std::size_t>(i)]);
    canvas.rect(x, top, bar_w, f.bottom - top, fill, opacity);
  }
  for (int i = 0; i < n; i += 5) {
    canvas.text(f.px(static_cast<double>(i)), f.bottom + 14,
                std::to_string(i), 9, "middle");
  }
  canvas.line(f.left, f.bottom, f.right, f.bottom, kAxisColor, 1.2);
  canvas.line(f.left, f.top, f.left, f.bottom, kAxisColor, 1.2);
  canvas.text((f.left + f.right) / 2, f.bottom + 30, "sensor (flat index)",
              11, "middle");
  canvas.text(16, (f.top + f.bottom) / 2, "mean |attribution|", 11, "middle",
              "transform=\"rotate(-90 16 " + fmt((f.top + f.bottom) / 2) +
                  ")\"");
  canvas.text(f.left, 24, title, 13);
  canvas.write(path);
}

void write_loss_svg(const std::string& path,
                    const std::vector<double>& epoch_loss) {
  if (epoch_loss.empty()) {
    throw ConfigError("loss svg: empty curve");
  }
  double y_max = 1e-12;
  for (double v : epoch_loss) y_max = std::max(y_max, v);

  SvgCanvas canvas(640, 400);
  const double x_max = epoch_loss.size() > 1
                           ? static_cast<double>(epoch_loss.size())
                           : 2.0;
  Frame f{66, 610, 40, 350, 1.0, x_max, 0.0, y_max * 1.08};
  draw_axes(canvas, f, "epoch", "training loss (MSE)");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < epoch_loss.size(); ++i) {
    pts.push_back({f.px(static_cast<double>(i + 1)), f.py(epoch_loss[i])});
  }
  canvas.polyline(pts, kBlue, 1.6);
  canvas.text(f.left, 22, "training loss", 13);
  canvas.write(path);
}

}  // namespace proprio
