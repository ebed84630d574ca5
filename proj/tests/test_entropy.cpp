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

#include "snic/entropy/rate.hpp"
#include "testutil.hpp"

using namespace snic;
using entropy::FactorizedPrior;

TEST_CASE("factorized prior is a proper distribution per channel") {
  FactorizedPrior<double> prior(4);
  Rng rng(1);
  prior.init(rng);
  for (int ch = 0; ch < 4; ++ch) {
    // CDF strictly increasing, maps onto (0,1)
    double prev = prior.cdf(ch, -1000.5);
    CHECK(prev < 1e-6);
    prev = prior.cdf(ch, -10.25);
    for (double x = -10; x <= 10; x += 0.5) {
      double c = prior.cdf(ch, x);
      CHECK(c > prev);
      CHECK(c > 0.0);
      CHECK(c < 1.0);
      prev = c;
    }
    CHECK(prior.cdf(ch, 1000.5) > 1.0 - 1e-6);
    // pmf sums to one over a wide window
    double sum = 0.0;
    for (int n = -1000; n <= 1000; ++n) sum += prior.pmf(ch, n);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("factorized model joint log-probability adds elementwise") {
  FactorizedPrior<double> prior(2);
  Rng rng(2);
  prior.init(rng);
  // product structure: log P(vector) = sum of elementwise logs by definition
  std::vector<std::pair<int, int>> zs = {{0, 1}, {1, -2}, {0, 0}, {1, 3}};
  double joint = 0.0;
  for (auto [ch, n] : zs) joint += std::log2(prior.pmf(ch, n));
  double total = 0.0;
  for (auto [ch, n] : zs) total -= prior.bits(ch, n);
  CHECK(joint == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("prior bits gradients match finite differences") {
  FactorizedPrior<double> prior(3);
  Rng rng(3);
  prior.init(rng);
  int points = 0;
  for (int trial = 0; trial < 40; ++trial) {
    int ch = rng.uniform_int(3);
    double t = rng.uniform(-4, 4);
    prior.zero_grad();
    double gt = 0.0;
    prior.bits_backward(ch, t, 1.0, &gt);
    const double h = 1e-5;
    double fd = (prior.bits(ch, t + h) - prior.bits(ch, t - h)) / (2 * h);
    CHECK(testutil::rel_err(fd, gt) <= 1e-4);
    // a couple of parameter coordinates per trial
    std::vector<double*> coords;
    std::vector<double*> grads;
    prior.visit("prior", [&](const std::string&, std::vector<double>& w,
                             std::vector<double>& g, std::vector<int>) {
      for (size_t i = 0; i < w.size(); i += 7) {
        coords.push_back(&w[i]);
        grads.push_back(&g[i]);
      }
    });
    for (int k = 0; k < 3; ++k) {
      size_t i = size_t(rng.uniform_int(int(coords.size())));
      double orig = *coords[i];
      double hh = 1e-5 * std::max(1.0, std::abs(orig));
      *coords[i] = orig + hh;
      double fp = prior.bits(ch, t);
      *coords[i] = orig - hh;
      double fm = prior.bits(ch, t);
      *coords[i] = orig;
      CHECK(testutil::rel_err((fp - fm) / (2 * hh), *grads[i]) <= 1e-4);
      ++points;
    }
  }
  CHECK(points >= 100);
}

TEST_CASE("slice parameters depend only on earlier slices") {
  model::ModelConfig cfg = model::ModelConfig::preset("micro");
  model::CompressionModel<float> m(cfg);
  m.init(4);
  Rng rng(5);
  Tensor<float> y = testutil::random_tensor_f(4, 4, cfg.m, rng);
  Tensor<float> z = testutil::random_tensor_f(1, 1, cfg.cz, rng);
  Tensor<float> hf = m.hs.forward(z);

  std::vector<Tensor<float>> slices;
  for (int i = 0; i < cfg.num_slices; ++i)
    slices.push_back(slice_channels(y, m.scheme.begin(i), m.scheme.end(i)));

  for (int i = 0; i < cfg.num_slices; ++i) {
    std::vector<Tensor<float>> ctx(slices.begin(), slices.begin() + i);
    entropy::EntropyParams<float> base = m.predict_slice_params(hf, ctx, i);
    // repeated calls with the same context are bit-identical
    std::vector<Tensor<float>> later(slices.begin(), slices.begin() + i);
    entropy::EntropyParams<float> again = m.predict_slice_params(hf, later, i);
    CHECK(base.mu.v == again.mu.v);
    CHECK(base.sigma.v == again.sigma.v);
    for (float s : base.sigma.v) CHECK(s >= float(quant::kSigmaFloor));
  }

  // explicit causality probe: mutate slice j > i and re-predict slice i
  std::vector<Tensor<float>> ctx(slices.begin(), slices.begin() + 3);
  entropy::EntropyParams<float> before = m.predict_slice_params(hf, ctx, 3);
  Tensor<float> y2 = y;
  for (int c = m.scheme.begin(7); c < m.scheme.end(7); ++c)
    for (int yy = 0; yy < 4; ++yy)
      for (int xx = 0; xx < 4; ++xx) y2.at(yy, xx, c) += 123.0f;
  std::vector<Tensor<float>> ctx2;
  for (int j = 0; j < 3; ++j)
    ctx2.push_back(slice_channels(y2, m.scheme.begin(j), m.scheme.end(j)));
  entropy::EntropyParams<float> after = m.predict_slice_params(hf, ctx2, 3);
  CHECK(before.mu.v == after.mu.v);
  CHECK(before.sigma.v == after.sigma.v);

  CHECK_THROWS(m.predict_slice_params(hf, ctx, 5));  // wrong slice count
}

TEST_CASE("rate estimate reproduces elementary code lengths") {
  // an element with pmf 1/2 contributes exactly 1 bit
  double sigma_half = 0.0;
  // find sigma where pmf(0; 0, sigma) = 1/2 by bisection, then check bits
  double lo = 0.2, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (quant::discretized_gaussian_pmf(0, 0, mid) > 0.5 ? lo : hi) = mid;
  }
  sigma_half = 0.5 * (lo + hi);
  CHECK(entropy::gaussian_bits(0.0, sigma_half) == doctest::Approx(1.0).epsilon(1e-6));

  // uniform pmf over 256 symbols costs 8 bits per element
  CHECK(-std::log2(1.0 / 256.0) == doctest::Approx(8.0));
}

TEST_CASE("rate forward/backward on the full model matches finite differences") {
  model::ModelConfig cfg = model::ModelConfig::preset("micro");
  model::CompressionModel<double> m(cfg);
  m.init(6);
  Rng rng(7);
  Tensor<double> y = testutil::random_tensor(4, 4, cfg.m, rng);
  Tensor<double> z = testutil::random_tensor(1, 1, cfg.cz, rng);

  entropy::RateTrace<double> tr = entropy::rate_forward(m, y, z);
  CHECK(tr.bits() > 0.0);
  m.zero_grad();
  auto [gy, gz] = entropy::rate_backward(m, tr, 1.0);

  auto objective = [&]() { return entropy::rate_forward(m, y, z).bits(); };
  int checked = 0;
  double worst = 0.0;
  for (int t = 0; t < 60; ++t) {
    size_t i = size_t(rng.uniform_int(int(y.size())));
    double orig = y.v[i];
    double h = 1e-5;
    y.v[i] = orig + h;
    double fp = objective();
    y.v[i] = orig - h;
    double fm = objective();
    y.v[i] = orig;
    worst = std::max(worst, testutil::rel_err((fp - fm) / (2 * h), gy.v[i]));
    ++checked;
  }
  for (int t = 0; t < 40; ++t) {
    size_t i = size_t(rng.uniform_int(int(z.size())));
    double orig = z.v[i];
    double h = 1e-5;
    z.v[i] = orig + h;
    double fp = objective();
    z.v[i] = orig - h;
    double fm = objective();
    z.v[i] = orig;
    worst = std::max(worst, testutil::rel_err((fp - fm) / (2 * h), gz.v[i]));
    ++checked;
  }
  CHECK(checked >= 100);
  CHECK(worst <= 1e-4);
}

TEST_CASE("re-running the ascending slice order reproduces identical rates") {
  model::ModelConfig cfg = model::ModelConfig::preset("micro");
  model::CompressionModel<float> m(cfg);
  m.init(8);
  Rng rng(9);
  Tensor<float> y = testutil::random_tensor_f(4, 4, cfg.m, rng);
  Tensor<float> z = testutil::random_tensor_f(1, 1, cfg.cz, rng);
  double r1 = entropy::estimate_rate_bits(m, y, z);
  double r2 = entropy::estimate_rate_bits(m, y, z);
  CHECK(r1 == r2);
}
