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

#ifndef SNIC_OBJECTIVES_DISCRIMINATOR_HPP_
#define SNIC_OBJECTIVES_DISCRIMINATOR_HPP_

#include <string>

#include "snic/nn/conv.hpp"
#include "snic/nn/linear.hpp"
#include "snic/nn/ops.hpp"

namespace snic::objectives {

// Conditional patch discriminator. The latent condition is projected to a
// few channels by a 1x1 conv, nearest-upsampled 16x to image resolution and
// concatenated with the (scaled) image; four stride-2 convs with leaky ReLU
// feed a 1-channel probability map.
template <typename T>
struct Discriminator {
  static constexpr int kCondC = 8;
  static constexpr T kSlope = T(0.2);
  nn::Linear<T> cond_proj;  // latent channels -> kCondC
  nn::Conv2d<T> c0, c1, c2, c3, head;

  Discriminator() = default;
  explicit Discriminator(int latent_c)
      : cond_proj(latent_c, kCondC),
        c0(1 + kCondC, 16, 4, 2, 1), c1(16, 32, 4, 2, 1), c2(32, 64, 4, 2, 1),
        c3(64, 64, 4, 2, 1), head(64, 1, 3, 1, 1) {}

  void init(Rng& rng) {
    cond_proj.init_he(rng);
    c0.init_he(rng);
    c1.init_he(rng);
    c2.init_he(rng);
    c3.init_he(rng);
    head.init_he(rng);
  }

  struct Trace {
    Tensor<T> cond_small, in;
    Tensor<T> z0, h0, z1, h1, z2, h2, z3, h3, logits, prob;
  };

  static Tensor<T> upsample_nearest(const Tensor<T>& x, int factor) {
    Tensor<T> out(x.h * factor, x.w * factor, x.c);
    for (int y = 0; y < out.h; ++y)
      for (int xx = 0; xx < out.w; ++xx) {
        const T* src = x.pos(y / factor, xx / factor);
        std::copy(src, src + x.c, out.pos(y, xx));
      }
    return out;
  }

  // image: pixel domain [0,255], dims must be 16x the latent dims.
  Tensor<T> forward_cached(const Tensor<T>& image, const Tensor<T>& latent, Trace& tr) {
    tr.cond_small = cond_proj.forward(latent);
    Tensor<T> cond = upsample_nearest(tr.cond_small, 16);
    if (cond.h != image.h || cond.w != image.w)
      throw std::invalid_argument("discriminator: image dims are not 16x the latent dims");
    Tensor<T> img = image;
    for (auto& v : img.v) v *= T(1.0 / 255.0);
    std::vector<const Tensor<T>*> parts{&img, &cond};
    tr.in = concat_channels(parts);
    tr.z0 = c0.forward(tr.in);
    tr.h0 = nn::leaky_relu(tr.z0, kSlope);
    tr.z1 = c1.forward(tr.h0);
    tr.h1 = nn::leaky_relu(tr.z1, kSlope);
    tr.z2 = c2.forward(tr.h1);
    tr.h2 = nn::leaky_relu(tr.z2, kSlope);
    tr.z3 = c3.forward(tr.h2);
    tr.h3 = nn::leaky_relu(tr.z3, kSlope);
    tr.logits = head.forward(tr.h3);
    tr.prob = nn::sigmoid(tr.logits);
    return tr.prob;
  }

  // Returns the gradient w.r.t. the input *image* (pixel domain). The
  // condition branch is treated as given (no gradient into the latent).
  Tensor<T> backward(Trace& tr, const Tensor<T>& gprob) {
    Tensor<T> g = nn::sigmoid_backward_from_output(tr.prob, gprob);
    g = head.backward(tr.h3, g);
    g = nn::leaky_relu_backward(tr.z3, g, kSlope);
    g = c3.backward(tr.h2, g);
    g = nn::leaky_relu_backward(tr.z2, g, kSlope);
    g = c2.backward(tr.h1, g);
    g = nn::leaky_relu_backward(tr.z1, g, kSlope);
    g = c1.backward(tr.h0, g);
    g = nn::leaky_relu_backward(tr.z0, g, kSlope);
    g = c0.backward(tr.in, g);
    Tensor<T> gimg(g.h, g.w, 1);
    for (int y = 0; y < g.h; ++y)
      for (int xx = 0; xx < g.w; ++xx) gimg.at(y, xx, 0) = g.at(y, xx, 0) * T(1.0 / 255.0);
    return gimg;
  }

  void zero_grad() {
    cond_proj.zero_grad();
    c0.zero_grad();
    c1.zero_grad();
    c2.zero_grad();
    c3.zero_grad();
    head.zero_grad();
  }

  template <typename F>
  void visit(const std::string& p, F&& f) {
    cond_proj.visit(p + ".cond", f);
    c0.visit(p + ".c0", f);
    c1.visit(p + ".c1", f);
    c2.visit(p + ".c2", f);
    c3.visit(p + ".c3", f);
    head.visit(p + ".head", f);
  }
};

}  // namespace snic::objectives

#endif  // SNIC_OBJECTIVES_DISCRIMINATOR_HPP_
