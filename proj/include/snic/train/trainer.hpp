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

#ifndef SNIC_TRAIN_TRAINER_HPP_
#define SNIC_TRAIN_TRAINER_HPP_

#include <memory>
#include <string>
#include <vector>

#include "snic/model/checkpoint.hpp"
#include "snic/objectives/lpips.hpp"
#include "snic/objectives/losses.hpp"
#include "snic/train/adam.hpp"

namespace snic::train {

struct TrainConfig {
  std::vector<double> lambdas = {0.0015, 0.0035, 0.0070, 0.0125, 0.0250, 0.0410, 0.0550};
  int epochs = 100;
  int batch = 16;
  int crop = 256;
  double lr_start = 1e-4;
  double lr_end = 1.2e-6;
  bool adversarial = false;
  uint64_t seed = 0;
  std::string arch = "paper";
  double w_recon = 1.0;
  double w_perceptual = 1.0;
  double w_adversarial = 0.01;
  int steps_per_epoch = 0;  // 0: derived as max(1, corpus/batch)
  std::string out_dir = "runs/run";
  double clip_norm = 1.0;

  void validate() const;
};

struct StepMetrics {
  int64_t step = 0;
  double loss = 0.0;
  double rate_bits = 0.0;  // mean total bits per image
  double mse = 0.0;
  double lpips = 0.0;
  double adv = 0.0;
  double lr = 0.0;
};

// One model's optimization loop at a fixed lambda. All randomness (crops,
// relaxation noise) derives from (seed, lambda_index, step), so a resumed
// run replays the exact step sequence of an uninterrupted one.
class Trainer {
 public:
  Trainer(const model::ModelConfig& mcfg, const TrainConfig& cfg, double lambda,
          uint8_t lambda_index);
  static Trainer resume(const std::string& checkpoint_path, const TrainConfig& cfg);

  StepMetrics train_step(const std::vector<Tensor<float>>& batch, int64_t total_steps);

  // Samples a batch of crops for the given step (deterministic).
  std::vector<Tensor<float>> sample_batch(const std::vector<Tensor<float>>& corpus) const;

  void save(const std::string& path, bool with_training_state = true);

  int64_t step() const { return step_; }
  double lambda() const { return lambda_; }
  uint8_t lambda_index() const { return lambda_index_; }
  model::CompressionModel<float>& model() { return *model_; }

 private:
  Trainer() = default;

  TrainConfig cfg_;
  double lambda_ = 0.0;
  uint8_t lambda_index_ = 0;
  int64_t step_ = 0;
  std::unique_ptr<model::CompressionModel<float>> model_;
  std::unique_ptr<objectives::Discriminator<float>> disc_;
  std::unique_ptr<objectives::LpipsExtractor<float>> lpips_;
  Adam opt_, disc_opt_;
};

struct TrainResult {
  std::vector<std::string> checkpoints;  // final checkpoint per lambda
};

// Full recipe: one model per lambda, cosine-annealed, metrics CSV per run,
// checkpoints under <out_dir>/lambda_<idx>/ckpt_<epoch>.snck.
TrainResult train(const TrainConfig& cfg, const std::vector<Tensor<float>>& corpus);

}  // namespace snic::train

#endif  // SNIC_TRAIN_TRAINER_HPP_
