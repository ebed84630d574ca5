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

#ifndef SNIC_EVAL_RD_SWEEP_HPP_
#define SNIC_EVAL_RD_SWEEP_HPP_

#include <string>
#include <vector>

#include "snic/core/tensor.hpp"

namespace snic::eval {

struct RdPoint {
  std::string codec_id;   // "snic" or an external codec id
  double parameter = 0.0; // lambda or external quality knob
  double bpp = 0.0;
  double psnr = 0.0;
  double msssim_log = 0.0;
  double lpips = 0.0;
};

// Mean metrics per checkpoint over a corpus of level images; points come
// back sorted by bpp ascending. `jobs` parallelizes across images without
// changing results.
std::vector<RdPoint> rd_sweep(const std::vector<std::string>& checkpoint_paths,
                              const std::vector<Tensor<float>>& corpus, int jobs = 1);

void write_rd_csv(const std::string& path, const std::vector<RdPoint>& points);
std::vector<RdPoint> read_rd_csv(const std::string& path);

// One SVG per metric pair (bpp vs psnr / msssim_log / lpips), grouped by
// codec_id. Returns the written file paths.
std::vector<std::string> write_rd_plots(const std::string& dir,
                                        const std::vector<RdPoint>& points);

}  // namespace snic::eval

#endif  // SNIC_EVAL_RD_SWEEP_HPP_
