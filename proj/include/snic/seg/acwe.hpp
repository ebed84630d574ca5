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

#ifndef SNIC_SEG_ACWE_HPP_
#define SNIC_SEG_ACWE_HPP_

#include <vector>

#include "snic/data/image.hpp"

namespace snic::seg {

using data::DiskGeometry;
using snic::Tensor;

struct AcweConfig {
  double alpha = 0.3;       // seeding factor on the quiet-sun level
  double mu_len = 0.0;      // contour-length weight
  double lambda_i = 50.0;   // foreground homogeneity weight
  double lambda_o = 1.0;    // background homogeneity weight
  int max_iters = 500;
  double tol = 1e-4;        // stop when < 0.01% of pixels flip in a sweep
};

struct SegmentationMask {
  Tensor<uint8_t> mask;  // h x w x 1, members are on-disk by construction
  DiskGeometry geometry;

  size_t count() const {
    size_t n = 0;
    for (uint8_t v : mask.v) n += v ? 1 : 0;
    return n;
  }
};

// Divides each on-disk pixel by the median of its radial annulus (bins of
// width 1% of the radius, empty bins interpolated) and rescales by the
// global on-disk median. Off-disk pixels pass through.
Tensor<float> limb_correct(const Tensor<float>& img, const DiskGeometry& geom);

// Mean of the on-disk pixels between the 25th and 90th intensity
// percentiles; a constant disk degenerates to the plain mean.
double quiet_sun_mean(const Tensor<float>& img, const DiskGeometry& geom);

// On-disk pixels with intensity <= alpha * qs.
SegmentationMask seed_mask(const Tensor<float>& img, const DiskGeometry& geom, double alpha,
                           double qs);

struct AcweResult {
  SegmentationMask mask;
  int iterations = 0;
  bool converged = false;
  bool empty_seed = false;              // flagged: returned the (empty) seed untouched
  std::vector<double> energy_history;   // verified nonincreasing every sweep
};

// Region-competition sweep minimizing
//   lambda_i sum_in (I - c_in)^2 + lambda_o sum_out (I - c_out)^2
//   + mu_len * boundary_edges
// over on-disk pixels, where c_in/c_out are the current region means. With
// mu_len = 0 a sweep is the exact per-pixel minimizer given the means, so
// the energy is nonincreasing; with mu_len > 0 flips are accepted only when
// they lower the energy including the 4-neighborhood boundary term.
AcweResult acwe_evolve(const Tensor<float>& img, const SegmentationMask& seed,
                       const AcweConfig& cfg);

// 2|A n B| / (|A| + |B|); both-empty pairs count as identical (1).
double dice(const SegmentationMask& a, const SegmentationMask& b);
double dice(const Tensor<uint8_t>& a, const Tensor<uint8_t>& b);

}  // namespace snic::seg

#endif  // SNIC_SEG_ACWE_HPP_
