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

#ifndef SNIC_OBJECTIVES_LOSSES_HPP_
#define SNIC_OBJECTIVES_LOSSES_HPP_

#include <cmath>
#include <stdexcept>

#include "snic/core/tensor.hpp"

namespace snic::objectives {

// Probabilities are clipped to [kProbEps, 1-kProbEps] before any log.
inline constexpr double kProbEps = 1e-6;

struct LossWeights {
  double lambda = 0.0125;  // rate-distortion tradeoff
  double recon = 1.0;
  double perceptual = 1.0;
  double adversarial = 0.0;
};

// R + lambda * D_r
inline double rd_loss(double rate, double distortion, double lambda) {
  if (!std::isfinite(rate) || !std::isfinite(distortion))
    throw std::invalid_argument("rd_loss: non-finite inputs");
  return rate + lambda * distortion;
}

template <typename T>
double mse(const Tensor<T>& a, const Tensor<T>& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mse: shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = double(a.v[i]) - double(b.v[i]);
    acc += d * d;
  }
  return acc / double(a.size());
}

// d mse(a, b) / d b, scaled by gscale.
template <typename T>
Tensor<T> mse_backward_second(const Tensor<T>& a, const Tensor<T>& b, double gscale) {
  Tensor<T> g(b.h, b.w, b.c);
  const double k = 2.0 * gscale / double(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    g.v[i] = T(k * (double(b.v[i]) - double(a.v[i])));
  return g;
}

inline double clip_prob(double p) {
  if (p < kProbEps) return kProbEps;
  if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
  return p;
}

// Mean of -log D over a probability map (the adversarial generator term).
template <typename T>
double neg_log_mean(const Tensor<T>& prob) {
  double acc = 0.0;
  for (size_t i = 0; i < prob.size(); ++i) acc += -std::log(clip_prob(double(prob.v[i])));
  return acc / double(prob.size());
}

template <typename T>
Tensor<T> neg_log_mean_backward(const Tensor<T>& prob, double gscale) {
  Tensor<T> g(prob.h, prob.w, prob.c);
  const double k = gscale / double(prob.size());
  for (size_t i = 0; i < prob.size(); ++i) {
    double p = double(prob.v[i]);
    g.v[i] = (p <= kProbEps || p >= 1.0 - kProbEps) ? T(0) : T(-k / p);
  }
  return g;
}

// Mean of -log(1 - D) (the discriminator's fake term).
template <typename T>
double neg_log_one_minus_mean(const Tensor<T>& prob) {
  double acc = 0.0;
  for (size_t i = 0; i < prob.size(); ++i)
    acc += -std::log(clip_prob(1.0 - double(prob.v[i])));
  return acc / double(prob.size());
}

template <typename T>
Tensor<T> neg_log_one_minus_mean_backward(const Tensor<T>& prob, double gscale) {
  Tensor<T> g(prob.h, prob.w, prob.c);
  const double k = gscale / double(prob.size());
  for (size_t i = 0; i < prob.size(); ++i) {
    double q = 1.0 - double(prob.v[i]);
    g.v[i] = (q <= kProbEps || q >= 1.0 - kProbEps) ? T(0) : T(k / q);
  }
  return g;
}

// Eq.-style discriminator objective: E[-log D(real)] + E[-log(1 - D(fake))].
template <typename T>
double discriminator_loss(const Tensor<T>& prob_real, const Tensor<T>& prob_fake) {
  return neg_log_mean(prob_real) + neg_log_one_minus_mean(prob_fake);
}

}  // namespace snic::objectives

#endif  // SNIC_OBJECTIVES_LOSSES_HPP_
