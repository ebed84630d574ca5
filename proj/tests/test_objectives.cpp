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

#include "snic/model/config.hpp"
#include "snic/objectives/generator.hpp"
#include "testutil.hpp"

using namespace snic;
using namespace snic::objectives;

TEST_CASE("rd loss arithmetic") {
  CHECK(rd_loss(1000.0, 1e4, 0.0035) == doctest::Approx(1035.0));
  CHECK(rd_loss(123.0, 456.0, 0.0) == doctest::Approx(123.0));
  // doubling lambda doubles the distortion contribution exactly
  double base = rd_loss(10.0, 7.0, 0.2) - 10.0;
  double twice = rd_loss(10.0, 7.0, 0.4) - 10.0;
  CHECK(twice == doctest::Approx(2.0 * base));
  CHECK_THROWS(rd_loss(std::numeric_limits<double>::infinity(), 1.0, 0.1));
}

TEST_CASE("mse anchors at the identity") {
  Rng rng(1);
  Tensor<double> x = testutil::random_tensor(8, 8, 1, rng, 20.0);
  CHECK(mse(x, x) == 0.0);
  Tensor<double> y = x;
  y.v[5] += 3.0;
  CHECK(mse(x, y) == doctest::Approx(9.0 / x.size()));
  // gradient of mse wrt second arg
  Tensor<double> g = mse_backward_second(x, y, 1.0);
  CHECK(g.v[5] == doctest::Approx(2.0 * 3.0 / x.size()));
  CHECK(g.v[6] == 0.0);
}

TEST_CASE("lpips is a symmetric nonnegative distance, zero at identity") {
  LpipsExtractor<double> ex;
  Rng rng(2);
  Tensor<double> a = testutil::random_tensor(32, 32, 1, rng, 40.0);
  Tensor<double> b = testutil::random_tensor(32, 32, 1, rng, 40.0);
  CHECK(lpips_distance(ex, a, a) == 0.0);
  double dab = lpips_distance(ex, a, b);
  double dba = lpips_distance(ex, b, a);
  CHECK(dab > 0.0);
  CHECK(dab == doctest::Approx(dba).epsilon(1e-12));
}

TEST_CASE("lpips grows with increasing noise amplitude (statistical)") {
  LpipsExtractor<float> ex;
  Rng rng(3);
  Tensor<float> x = testutil::random_tensor_f(48, 48, 1, rng, 30.0);
  int wins = 0, trials = 100;
  for (int t = 0; t < trials; ++t) {
    Tensor<float> small = x, large = x;
    for (size_t i = 0; i < x.size(); ++i) {
      float n = float(rng.normal());
      small.v[i] += 2.0f * n;
      large.v[i] += 12.0f * n;
    }
    if (lpips_distance(ex, x, large) > lpips_distance(ex, x, small)) ++wins;
  }
  CHECK(wins >= 95);  // monotone in amplitude, allowing statistical slack
}

TEST_CASE("lpips backward matches finite differences") {
  LpipsExtractor<double> ex;
  Rng rng(4);
  Tensor<double> a = testutil::random_tensor(16, 16, 1, rng, 30.0);
  Tensor<double> b = testutil::random_tensor(16, 16, 1, rng, 30.0);
  LpipsTrace<double> tr;
  lpips_forward(ex, a, b, tr);
  Tensor<double> g = lpips_backward_second(ex, tr, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    size_t i = size_t(rng.uniform_int(int(b.size())));
    double orig = b.v[i];
    double h = 1e-4 * std::max(1.0, std::abs(orig));
    b.v[i] = orig + h;
    double fp = lpips_distance(ex, a, b);
    b.v[i] = orig - h;
    double fm = lpips_distance(ex, a, b);
    b.v[i] = orig;
    worst = std::max(worst, testutil::rel_err((fp - fm) / (2 * h), g.v[i]));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("discriminator loss identities") {
  Tensor<double> p_real(2, 2, 1), p_fake(2, 2, 1);
  // perfect discrimination: D(real)=1, D(fake)=0 -> loss at the clip floor
  p_real.fill(1.0);
  p_fake.fill(0.0);
  CHECK(discriminator_loss(p_real, p_fake) ==
        doctest::Approx(2.0 * -std::log(1.0 - kProbEps)).epsilon(1e-9));
  // indifferent discriminator: D == 0.5 everywhere -> 2 log 2
  p_real.fill(0.5);
  p_fake.fill(0.5);
  CHECK(discriminator_loss(p_real, p_fake) == doctest::Approx(1.3863).epsilon(1e-4));
  // nonnegative on (0,1) outputs
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    for (auto& v : p_real.v) v = rng.uniform(0.01, 0.99);
    for (auto& v : p_fake.v) v = rng.uniform(0.01, 0.99);
    CHECK(discriminator_loss(p_real, p_fake) >= 0.0);
  }
  // the generator's adversarial term at D = 0.5 is -log 0.5
  Tensor<double> half(3, 3, 1);
  half.fill(0.5);
  CHECK(neg_log_mean(half) == doctest::Approx(0.6931).epsilon(1e-4));
}

TEST_CASE("generator distortion composes its terms") {
  model::ModelConfig cfg = model::ModelConfig::preset("micro");
  Rng rng(6);
  Tensor<double> x = testutil::random_tensor(64, 64, 1, rng, 30.0);
  Tensor<double> xp = x;
  for (auto& v : xp.v) v += rng.normal();
  Tensor<double> y = testutil::random_tensor(4, 4, cfg.m, rng);
  LpipsExtractor<double> lp;
  Discriminator<double> disc(cfg.m);
  disc.init(rng);

  LossWeights w;
  w.recon = 1.0;
  w.perceptual = 1.0;
  w.adversarial = 0.01;
  double full = generator_distortion(x, xp, y, &lp, &disc, w);

  // x' = x with a saturated-real discriminator: all terms vanish
  LossWeights w0 = w;
  w0.adversarial = 0.0;
  CHECK(generator_distortion<double>(x, x, y, &lp, nullptr, w0) == 0.0);

  // lambda_adv = 0 reduces to pure mse + perceptual (discriminator ignored)
  double no_adv = generator_distortion<double>(x, xp, y, &lp, nullptr, w0);
  CHECK(no_adv == doctest::Approx(mse(x, xp) + lpips_distance(lp, x, xp)).epsilon(1e-12));
  CHECK(full > no_adv);  // the -log D term is positive for D < 1

  // invariance to the discriminator parameters when adversarial weight is 0
  Rng rng2(7);
  Discriminator<double> disc2(cfg.m);
  disc2.init(rng2);
  double no_adv2 = generator_distortion(x, xp, y, &lp, &disc2, w0);
  CHECK(no_adv == doctest::Approx(no_adv2));
}

TEST_CASE("discriminator output is a probability map and grads check out") {
  model::ModelConfig cfg = model::ModelConfig::preset("micro");
  Rng rng(8);
  Discriminator<double> disc(cfg.m);
  disc.init(rng);
  Tensor<double> img = testutil::random_tensor(64, 64, 1, rng, 40.0);
  Tensor<double> lat = testutil::random_tensor(4, 4, cfg.m, rng);
  typename Discriminator<double>::Trace tr;
  Tensor<double> prob = disc.forward_cached(img, lat, tr);
  CHECK(prob.c == 1);
  for (double p : prob.v) {
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
  // gradient of the adversarial generator term w.r.t. the image
  double adv0 = neg_log_mean(prob);
  CHECK(adv0 > 0.0);
  disc.zero_grad();
  Tensor<double> gimg = disc.backward(tr, neg_log_mean_backward(prob, 1.0));
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    size_t i = size_t(rng.uniform_int(int(img.size())));
    double orig = img.v[i];
    double h = 1e-4 * std::max(1.0, std::abs(orig));
    typename Discriminator<double>::Trace tr2;
    img.v[i] = orig + h;
    double fp = neg_log_mean(disc.forward_cached(img, lat, tr2));
    img.v[i] = orig - h;
    double fm = neg_log_mean(disc.forward_cached(img, lat, tr2));
    img.v[i] = orig;
    worst = std::max(worst, testutil::rel_err((fp - fm) / (2 * h), gimg.v[i]));
  }
  CHECK(worst <= 1e-4);
}
