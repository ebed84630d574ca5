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

#ifndef SNIC_OBJECTIVES_GENERATOR_HPP_
#define SNIC_OBJECTIVES_GENERATOR_HPP_

#include "snic/objectives/discriminator.hpp"
#include "snic/objectives/losses.hpp"
#include "snic/objectives/lpips.hpp"

namespace snic::objectives {

// Generator-side distortion:
//   w.recon * MSE(x, x') + w.perceptual * LPIPS(x, x') - w.adversarial * log D(x', y)
// The extractor/discriminator may be null when their weights are zero; the
// log D term averages over the discriminator's probability map with the
// usual probability clipping.
template <typename T>
double generator_distortion(const Tensor<T>& x, const Tensor<T>& x_prime,
                            const Tensor<T>& y_latent, const LpipsExtractor<T>* lpips,
                            Discriminator<T>* disc, const LossWeights& w) {
  double d = 0.0;
  if (w.recon != 0.0) d += w.recon * mse(x, x_prime);
  if (w.perceptual != 0.0) {
    if (!lpips) throw std::invalid_argument("generator_distortion: no feature backbone");
    d += w.perceptual * lpips_distance(*lpips, x, x_prime);
  }
  if (w.adversarial != 0.0) {
    if (!disc) throw std::invalid_argument("generator_distortion: no discriminator");
    typename Discriminator<T>::Trace tr;
    Tensor<T> prob = disc->forward_cached(x_prime, y_latent, tr);
    d += w.adversarial * neg_log_mean(prob);
  }
  return d;
}

// Eq.-style conditional discriminator objective on raw tensors.
template <typename T>
double discriminator_loss(const Tensor<T>& x, const Tensor<T>& x_prime,
                          const Tensor<T>& y_latent, Discriminator<T>& disc) {
  typename Discriminator<T>::Trace tr_real, tr_fake;
  Tensor<T> p_real = disc.forward_cached(x, y_latent, tr_real);
  Tensor<T> p_fake = disc.forward_cached(x_prime, y_latent, tr_fake);
  return discriminator_loss(p_real, p_fake);
}

}  // namespace snic::objectives

#endif  // SNIC_OBJECTIVES_GENERATOR_HPP_
