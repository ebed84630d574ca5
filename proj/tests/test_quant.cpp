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

#include <boost/math/distributions/chi_squared.hpp>

#include "snic/quant/quantize.hpp"
#include "testutil.hpp"

using namespace snic;
using namespace snic::quant;

TEST_CASE("quantize_round basics and tie rule") {
  Tensor<float> y(1, 3, 1), mu(1, 3, 1);
  y.v = {2.3f, 2.5f, -2.5f};
  Tensor<float> q = quantize_round(y, mu);
  CHECK(q.v[0] == 2.0f);
  CHECK(q.v[1] == 3.0f);   // half away from zero
  CHECK(q.v[2] == -3.0f);  // symmetric tie rule

  // zero residual when mu equals the value
  mu.v = {2.3f, 0.0f, 0.0f};
  Tensor<float> q2 = quantize_round(y, mu);
  CHECK(q2.v[0] == 2.3f);

  // residuals are exact integers
  Rng rng(3);
  Tensor<float> yy = testutil::random_tensor_f(8, 8, 4, rng, 5.0);
  Tensor<float> mm = testutil::random_tensor_f(8, 8, 4, rng, 5.0);
  Tensor<float> qq = quantize_round(yy, mm);
  for (size_t i = 0; i < qq.size(); ++i) {
    float r = std::round(yy.v[i] - mm.v[i]);  // the coded residual, an exact integer
    CHECK(r == std::floor(r));
    CHECK(qq.v[i] == r + mm.v[i]);
  }

  // idempotent on already-quantized inputs at fixed mu
  Tensor<float> qqq = quantize_round(qq, mm);
  CHECK(qqq.v == qq.v);

  Tensor<float> bad(1, 1, 1);
  bad.v = {std::numeric_limits<float>::quiet_NaN()};
  Tensor<float> mu1(1, 1, 1);
  CHECK_THROWS(quantize_round(bad, mu1));
}

TEST_CASE("uniform noise support, mean and variance") {
  Rng rng(123);
  const int n = 1'000'000;
  Tensor<float> zeros(1000, 1000, 1);
  Tensor<float> noisy = add_uniform_noise(zeros, rng);
  double sum = 0.0, sum2 = 0.0;
  for (float v : noisy.v) {
    CHECK(std::abs(v) < 0.5f);
    sum += v;
    sum2 += double(v) * v;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  // CLT bound: 3 sigma of the sample mean of U(-1/2,1/2)
  CHECK(std::abs(mean) <= 3.0 * (1.0 / std::sqrt(12.0)) / 1000.0);
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.01));
}

TEST_CASE("discretized gaussian pmf values and properties") {
  CHECK(discretized_gaussian_pmf(0, 0, 1) == doctest::Approx(0.382925).epsilon(1e-5));
  // symmetry pmf(n; mu, sigma) = pmf(-n; -mu, sigma)
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    double n = rng.uniform_int(21) - 10;
    double mu = rng.uniform(-3, 3);
    double sigma = rng.uniform(0.2, 5.0);
    CHECK(discretized_gaussian_pmf(n, mu, sigma) ==
          doctest::Approx(discretized_gaussian_pmf(-n, -mu, sigma)).epsilon(1e-12));
  }
  // total probability over a wide window (Kahan-summed)
  double sum = 0.0, comp = 0.0;
  for (int n = -10000; n <= 10000; ++n) {
    double term = discretized_gaussian_pmf(n, 0, 1) - comp;
    double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  // unimodal and log-concave away from the mode
  double prev = discretized_gaussian_pmf(0, 0, 1.7);
  for (int n = 1; n < 40; ++n) {
    double cur = discretized_gaussian_pmf(n, 0, 1.7);
    CHECK(cur < prev);
    prev = cur;
  }
  // sigma below the floor is clamped and flagged
  PmfResult r = discretized_gaussian_pmf_ex(0, 0, 0.01);
  CHECK(r.sigma_clamped);
  CHECK(r.p == doctest::Approx(discretized_gaussian_pmf(0, 0, kSigmaFloor)));
  CHECK(!discretized_gaussian_pmf_ex(0, 0, 0.5).sigma_clamped);
  // strictly positive even far out
  CHECK(discretized_gaussian_pmf(200, 0, 0.2) > 0.0);
}

// The relaxation equivalence: a unit-uniform perturbation has, in integer-
// centered unit bins, exactly the mass the rounded variable puts on the
// integers. Verified per source density with a chi-square test at 0.01.
TEST_CASE("noise relaxation matches rounding distribution (chi-square)") {
  struct Source {
    const char* name;
    std::function<double(Rng&)> draw;
    std::function<double(double)> cdf;  // of the source density
  };
  auto normal_cdf_s = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  std::vector<Source> sources = {
      {"normal(0,1.3)",
       [](Rng& r) { return 1.3 * r.normal(); },
       [&](double x) { return normal_cdf_s(x / 1.3); }},
      {"laplace(0.8)",
       [](Rng& r) {
         double u = r.uniform() - 0.5;
         return -0.8 * (u < 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(u));
       },
       [](double x) {
         return x < 0 ? 0.5 * std::exp(x / 0.8) : 1.0 - 0.5 * std::exp(-x / 0.8);
       }},
      {"uniform(-2,3)",
       [](Rng& r) { return r.uniform(-2.0, 3.0); },
       [](double x) { return x < -2 ? 0.0 : (x > 3 ? 1.0 : (x + 2.0) / 5.0); }},
  };

  // The equality is pointwise: the relaxed density AT each integer equals
  // the rounding pmf there. Narrow bins centered on the integers estimate
  // that density; unit-wide bins would instead smear the density with a
  // triangle kernel and bias the comparison for curved sources.
  const int kSamples = 1'000'000;
  const int kLo = -12, kHi = 12;
  const double kBinW = 0.1;
  int src_index = 0;
  for (const auto& src : sources) {
    CAPTURE(src.name);
    Rng rng(Rng::mix(20240817, ++src_index));
    std::vector<long> counts(kHi - kLo + 1, 0);
    long other = 0;
    for (int i = 0; i < kSamples; ++i) {
      double y = src.draw(rng);
      double t = y + (rng.uniform() - 0.5);  // relaxed value
      int n = int(std::floor(t + 0.5));
      if (n >= kLo && n <= kHi && std::abs(t - n) < kBinW / 2)
        ++counts[n - kLo];
      else
        ++other;
    }
    // expected narrow-bin mass under the claim: binw * pmf(round(y) = n)
    std::vector<double> expected(counts.size());
    double expected_other = kSamples;
    for (int n = kLo; n <= kHi; ++n) {
      expected[n - kLo] = kSamples * kBinW * (src.cdf(n + 0.5) - src.cdf(n - 0.5));
      expected_other -= expected[n - kLo];
    }
    double chi2 = 0.0;
    int df = -1;
    double pool_obs = other, pool_exp = expected_other;
    for (size_t i = 0; i < counts.size(); ++i) {
      if (expected[i] < 5.0) {
        pool_obs += counts[i];
        pool_exp += expected[i];
        continue;
      }
      double d = counts[i] - expected[i];
      chi2 += d * d / expected[i];
      ++df;
    }
    if (pool_exp >= 5.0) {
      double d = pool_obs - pool_exp;
      chi2 += d * d / pool_exp;
      ++df;
    }
    REQUIRE(df > 1);
    boost::math::chi_squared dist(df);
    double crit = boost::math::quantile(dist, 0.99);
    CHECK(chi2 <= crit);
  }
}

TEST_CASE("pmf gradients match finite differences") {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    double t = rng.uniform(-3, 3);
    double mu = rng.uniform(-1, 1);
    double sigma = rng.uniform(0.2, 4.0);
    PmfGrad g = discretized_gaussian_pmf_grad(t, mu, sigma);
    const double h = 1e-6;
    double fd_n = (discretized_gaussian_pmf(t + h, mu, sigma) -
                   discretized_gaussian_pmf(t - h, mu, sigma)) / (2 * h);
    double fd_mu = (discretized_gaussian_pmf(t, mu + h, sigma) -
                    discretized_gaussian_pmf(t, mu - h, sigma)) / (2 * h);
    double fd_s = (discretized_gaussian_pmf(t, mu, sigma + h) -
                   discretized_gaussian_pmf(t, mu, sigma - h)) / (2 * h);
    CHECK(testutil::rel_err(fd_n, g.dn) <= 1e-4);
    CHECK(testutil::rel_err(fd_mu, g.dmu) <= 1e-4);
    CHECK(testutil::rel_err(fd_s, g.dsigma) <= 1e-4);
  }
}
