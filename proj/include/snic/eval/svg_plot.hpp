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

#ifndef SNIC_EVAL_SVG_PLOT_HPP_
#define SNIC_EVAL_SVG_PLOT_HPP_

#include <string>
#include <utility>
#include <vector>

namespace snic::eval {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

// Minimal line chart with axes, ticks and a legend; vector output keeps the
// toolchain dependency-free.
void write_svg_plot(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& xlabel, const std::string& ylabel);

}  // namespace snic::eval

#endif  // SNIC_EVAL_SVG_PLOT_HPP_
