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

#ifndef SNIC_MODEL_CHECKPOINT_HPP_
#define SNIC_MODEL_CHECKPOINT_HPP_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "snic/model/transforms.hpp"
#include "snic/objectives/discriminator.hpp"

namespace snic::model {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Self-describing parameter archive: a JSON manifest (architecture, lambda
// binding, layer-plan tensor list, optional training state) followed by raw
// f32 tensors keyed by layer name. Loading refuses manifests whose
// architecture or tensor inventory does not match.
struct CheckpointMeta {
  ModelConfig cfg;
  uint8_t lambda_index = 0xff;
  double lambda_value = 0.0;
  bool adversarial = false;
  int64_t step = 0;
  uint64_t seed = 0;
};

struct TrainingState {
  // optimizer moments keyed by parameter name
  std::map<std::string, std::vector<float>> adam_m, adam_v;
  int64_t adam_t = 0;
};

struct Checkpoint {
  CheckpointMeta meta;
  std::unique_ptr<CompressionModel<float>> model;
  std::unique_ptr<objectives::Discriminator<float>> disc;  // when adversarial
  std::optional<TrainingState> training;
};

void save_checkpoint(const std::string& path, CompressionModel<float>& model,
                     const CheckpointMeta& meta,
                     objectives::Discriminator<float>* disc = nullptr,
                     const TrainingState* training = nullptr);

Checkpoint load_checkpoint(const std::string& path);

}  // namespace snic::model

#endif  // SNIC_MODEL_CHECKPOINT_HPP_
