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

#ifndef SNIC_TRAIN_SCHEDULE_HPP_
#define SNIC_TRAIN_SCHEDULE_HPP_

#include <cmath>
#include <stdexcept>

namespace snic::train {

// Cosine decay from lr_start (step 0) to lr_end (step total): monotone
// nonincreasing over the run.
inline double anneal_lr(int64_t step, int64_t total_steps, double lr_start, double lr_end) {
  if (step < 0 || step > total_steps)
    throw std::out_of_range("anneal_lr: step outside [0, total_steps]");
  if (total_steps == 0) return lr_start;
  double t = double(step) / double(total_steps);
  return lr_end + 0.5 * (lr_start - lr_end) * (1.0 + std::cos(3.14159265358979323846 * t));
}

}  // namespace snic::train

#endif  // SNIC_TRAIN_SCHEDULE_HPP_
