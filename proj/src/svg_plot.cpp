// Copyright (c) the snic authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "snic/eval/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace snic::eval {

void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& xlabel, const std::string& ylabel) {
  const int W = 640, H = 480, ML = 70, MR = 20, MT = 20, MB = 55;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
      << "' viewBox='0 0 " << W << " " << H << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR << "' y2='" << H - MB
      << "' stroke='black'/>\n";
  out << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='" << H - MB
      << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    double x = xmin + (xmax - xmin) * i / 5.0;
    double y = ymin + (ymax - ymin) * i / 5.0;
    out << "<line x1='" << px(x) << "' y1='" << H - MB << "' x2='" << px(x) << "' y2='"
        << H - MB + 5 << "' stroke='black'/>\n";
    out << "<text x='" << px(x) << "' y='" << H - MB + 20
        << "' font-size='11' text-anchor='middle'>" << std::round(x * 1000) / 1000
        << "</text>\n";
    out << "<line x1='" << ML - 5 << "' y1='" << py(y) << "' x2='" << ML << "' y2='" << py(y)
        << "' stroke='black'/>\n";
    out << "<text x='" << ML - 8 << "' y='" << py(y) + 4
        << "' font-size='11' text-anchor='end'>" << std::round(y * 1000) / 1000
        << "</text>\n";
  }
  out << "<text x='" << (ML + W - MR) / 2 << "' y='" << H - 12
      << "' font-size='13' text-anchor='middle'>" << xlabel << "</text>\n";
  out << "<text x='16' y='" << (MT + H - MB) / 2
      << "' font-size='13' text-anchor='middle' transform='rotate(-90 16 "
      << (MT + H - MB) / 2 << ")'>" << ylabel << "</text>\n";

  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  int ci = 0, ly = MT + 14;
  for (const auto& s : series) {
    const char* color = colors[ci++ % 6];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (auto [x, y] : s.points) out << px(x) << "," << py(y) << " ";
    out << "'/>\n";
    for (auto [x, y] : s.points)
      out << "<circle cx='" << px(x) << "' cy='" << py(y) << "' r='3' fill='" << color
          << "'/>\n";
    out << "<rect x='" << W - MR - 150 << "' y='" << ly - 9 << "' width='12' height='3' fill='"
        << color << "'/>\n";
    out << "<text x='" << W - MR - 132 << "' y='" << ly << "' font-size='12'>" << s.label
        << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
}

}  // namespace snic::eval
