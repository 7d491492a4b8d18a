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

#ifndef PROPRIO_SVG_HPP_
#define PROPRIO_SVG_HPP_

#include <string>
#include <vector>

#include "proprio/ablation_curve.hpp"
#include "proprio/attribution.hpp"

namespace proprio {

// Minimal SVG writer: enough line/rect/text primitives for the charts
// emitted here, no plotting dependency. Coordinates are pixels.
class SvgCanvas {
 public:
  SvgCanvas(int width, int height);

  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke, double stroke_width = 1.0);
  void polyline(const std::vector<std::pair<double, double>>& points,
                const std::string& stroke, double stroke_width = 1.5);
  void rect(double x, double y, double w, double h, const std::string& fill,
            double opacity = 1.0);
  void text(double x, double y, const std::string& content, int font_size = 11,
            const std::string& anchor = "start",
            const std::string& extra_attrs = "");

  std::string str() const;
  void write(const std::string& path) const;

 private:
  int width_;
  int height_;
  std::string body_;
};

std::string svg_escape(const std::string& text);

// Error-vs-reduction-ratio chart for one axis: across-trial mean of the
// mean and max absolute errors, with +-1 std error bars. bar_magnification
// scales only the drawn bar length (the paper's display trick); values in
// the CSV twin are never scaled.
void write_ablation_svg(const std::string& path,
                        const std::vector<AblationCurve>& curves,
                        AblationAxis axis, double bar_magnification = 1.0);

// Per-trial attribution bar chart. most_frequent is drawn in red, the other
// top-3 in fading red, everything else dark gray.
void write_shap_svg(const std::string& path, const ShapReport& report,
                    int most_frequent, const std::string& title);

void write_loss_svg(const std::string& path,
                    const std::vector<double>& epoch_loss);

}  // namespace proprio

#endif  // PROPRIO_SVG_HPP_
