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

#ifndef SNIC_EVAL_METRICS_HPP_
#define SNIC_EVAL_METRICS_HPP_

#include <limits>

#include "snic/core/tensor.hpp"

namespace snic::eval {

// 10 log10(255^2 / MSE); identical inputs give the +inf sentinel.
double psnr(const Tensor<float>& a, const Tensor<float>& b);

struct MsssimResult {
  double value = 0.0;   // m in [0, 1]
  int scales_used = 5;  // < 5 when the image was too small (flagged fallback)
};

// 5-scale MS-SSIM, 11x11 Gaussian window sigma 1.5, standard scale weights
// (0.0448, 0.2856, 0.3001, 0.2363, 0.1333). Images smaller than the 5-scale
// minimum fall back to fewer scales with renormalized weights.
MsssimResult msssim(const Tensor<float>& a, const Tensor<float>& b);

// -10 log10(1 - m); m = 1 gives the +inf sentinel.
double msssim_log(const Tensor<float>& a, const Tensor<float>& b);
double msssim_log_from_m(double m);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace snic::eval

#endif  // SNIC_EVAL_METRICS_HPP_
