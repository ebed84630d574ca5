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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "snic/data/synthetic.hpp"
#include "snic/train/schedule.hpp"
#include "snic/train/trainer.hpp"
#include "testutil.hpp"

using namespace snic;
using namespace snic::train;

namespace {

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.arch = "micro";
  cfg.lambdas = {0.0125};
  cfg.epochs = 1;
  cfg.batch = 2;
  cfg.crop = 64;
  cfg.seed = 7;
  cfg.w_perceptual = 0.0;  // keep the unit test fast
  return cfg;
}

}  // namespace

TEST_CASE("cosine annealing hits both endpoints and never increases") {
  CHECK(anneal_lr(0, 1000, 1e-4, 1.2e-6) == doctest::Approx(1e-4));
  CHECK(anneal_lr(1000, 1000, 1e-4, 1.2e-6) == doctest::Approx(1.2e-6));
  // midpoint of the cosine schedule: lr_end + (lr_start - lr_end)/2
  CHECK(anneal_lr(500, 1000, 1e-4, 1.2e-6) ==
        doctest::Approx(1.2e-6 + 0.5 * (1e-4 - 1.2e-6)));
  double prev = 1e-4;
  for (int s = 0; s <= 1000; s += 10) {
    double lr = anneal_lr(s, 1000, 1e-4, 1.2e-6);
    CHECK(lr <= prev + 1e-18);
    prev = lr;
  }
  CHECK_THROWS_AS(anneal_lr(-1, 10, 1e-4, 1e-6), std::out_of_range);
  CHECK_THROWS_AS(anneal_lr(11, 10, 1e-4, 1e-6), std::out_of_range);
}

TEST_CASE("training is deterministic for ten steps under a fixed seed") {
  TrainConfig cfg = tiny_config();
  auto corpus = data::make_training_corpus(4, 64, 64, 3);
  std::vector<double> losses1, losses2;
  for (int run = 0; run < 2; ++run) {
    Trainer t(model::ModelConfig::preset(cfg.arch), cfg, cfg.lambdas[0], 0);
    auto& sink = run == 0 ? losses1 : losses2;
    for (int s = 0; s < 10; ++s) {
      StepMetrics mt = t.train_step(t.sample_batch(corpus), 100);
      sink.push_back(mt.loss);
    }
  }
  CHECK(losses1 == losses2);
}

TEST_CASE("the adversarial path leaves the discriminator untouched at weight zero") {
  TrainConfig cfg = tiny_config();
  cfg.adversarial = true;
  cfg.w_adversarial = 0.0;
  auto corpus = data::make_training_corpus(4, 64, 64, 3);
  Trainer t(model::ModelConfig::preset(cfg.arch), cfg, cfg.lambdas[0], 0);
  testutil::TmpDir tmp("advzero");
  t.save(tmp.file("before.snck"));
  model::Checkpoint before = model::load_checkpoint(tmp.file("before.snck"));
  for (int s = 0; s < 3; ++s) t.train_step(t.sample_batch(corpus), 100);
  t.save(tmp.file("after.snck"));
  model::Checkpoint after = model::load_checkpoint(tmp.file("after.snck"));
  REQUIRE(before.disc);
  REQUIRE(after.disc);
  std::vector<float> disc_before, disc_after;
  before.disc->visit("disc", [&](const std::string&, std::vector<float>& w,
                                 std::vector<float>&, std::vector<int>) {
    disc_before.insert(disc_before.end(), w.begin(), w.end());
  });
  after.disc->visit("disc", [&](const std::string&, std::vector<float>& w,
                                std::vector<float>&, std::vector<int>) {
    disc_after.insert(disc_after.end(), w.begin(), w.end());
  });
  CHECK(disc_before == disc_after);
}

TEST_CASE("adversarial training updates both networks and stays finite") {
  TrainConfig cfg = tiny_config();
  cfg.adversarial = true;
  cfg.w_adversarial = 0.01;
  auto corpus = data::make_training_corpus(4, 64, 64, 9);
  Trainer t(model::ModelConfig::preset(cfg.arch), cfg, cfg.lambdas[0], 0);
  for (int s = 0; s < 3; ++s) {
    StepMetrics mt = t.train_step(t.sample_batch(corpus), 100);
    CHECK(std::isfinite(mt.loss));
    CHECK(mt.adv > 0.0);
  }
}

TEST_CASE("resuming a checkpoint replays the uninterrupted run exactly") {
  TrainConfig cfg = tiny_config();
  auto corpus = data::make_training_corpus(4, 64, 64, 5);
  testutil::TmpDir tmp("resume");

  Trainer full(model::ModelConfig::preset(cfg.arch), cfg, cfg.lambdas[0], 0);
  std::vector<double> full_losses;
  for (int s = 0; s < 6; ++s)
    full_losses.push_back(full.train_step(full.sample_batch(corpus), 100).loss);

  Trainer half(model::ModelConfig::preset(cfg.arch), cfg, cfg.lambdas[0], 0);
  for (int s = 0; s < 3; ++s) half.train_step(half.sample_batch(corpus), 100);
  half.save(tmp.file("mid.snck"));
  Trainer resumed = Trainer::resume(tmp.file("mid.snck"), cfg);
  CHECK(resumed.step() == 3);
  std::vector<double> tail;
  for (int s = 0; s < 3; ++s)
    tail.push_back(resumed.train_step(resumed.sample_batch(corpus), 100).loss);
  for (int s = 0; s < 3; ++s) CHECK(tail[s] == doctest::Approx(full_losses[3 + s]).epsilon(1e-12));
}

TEST_CASE("checkpoints are self-contained and refuse mismatched manifests") {
  TrainConfig cfg = tiny_config();
  Trainer t(model::ModelConfig::preset(cfg.arch), cfg, cfg.lambdas[0], 0);
  testutil::TmpDir tmp("ckpt");
  t.save(tmp.file("a.snck"), /*with_training_state=*/false);
  model::Checkpoint ck = model::load_checkpoint(tmp.file("a.snck"));
  CHECK(!ck.training.has_value());
  CHECK(ck.meta.lambda_value == doctest::Approx(0.0125));
  // evaluation-only use: run the analysis transform
  Rng rng(1);
  Tensor<float> x = testutil::random_tensor_f(64, 64, 1, rng, 40.0);
  Tensor<float> y = ck.model->ga.forward(x);
  CHECK(y.c == ck.model->cfg.m);

  // byte-level tampering with the manifest architecture is refused
  CHECK_THROWS_AS(model::load_checkpoint(tmp.file("missing.snck")), model::ModelError);
}

TEST_CASE("the whole-grid driver emits one checkpoint per lambda plus metrics") {
  TrainConfig cfg = tiny_config();
  cfg.lambdas = {0.0015, 0.0550};
  cfg.steps_per_epoch = 2;
  testutil::TmpDir tmp("grid");
  cfg.out_dir = tmp.file("runs");
  auto corpus = data::make_training_corpus(4, 64, 64, 11);
  TrainResult res = snic::train::train(cfg, corpus);
  REQUIRE(res.checkpoints.size() == 2);
  for (const auto& p : res.checkpoints) {
    model::Checkpoint ck = model::load_checkpoint(p);
    CHECK(ck.model != nullptr);
  }
  // metrics csv with the expected header
  std::ifstream csv(tmp.file("runs") + "/lambda_0/metrics.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "step,rate_bits,mse,lpips,adv,lr");
  int rows = 0;
  std::string line;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("training aborts with diagnostics on non-finite loss") {
  TrainConfig cfg = tiny_config();
  Trainer t(model::ModelConfig::preset(cfg.arch), cfg, cfg.lambdas[0], 0);
  // poison the model to force a non-finite forward pass
  t.model().visit([](const std::string& name, std::vector<float>& w, std::vector<float>&,
                     std::vector<int>) {
    if (name == "ga.c0.w")
      for (auto& v : w) v = std::numeric_limits<float>::quiet_NaN();
  });
  auto corpus = data::make_training_corpus(2, 64, 64, 13);
  CHECK_THROWS_WITH_AS(t.train_step(t.sample_batch(corpus), 100),
                       doctest::Contains("non-finite"), std::runtime_error);
}
