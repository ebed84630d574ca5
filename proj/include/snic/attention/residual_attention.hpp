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

#ifndef SNIC_ATTENTION_RESIDUAL_ATTENTION_HPP_
#define SNIC_ATTENTION_RESIDUAL_ATTENTION_HPP_

#include "snic/attention/wcbam.hpp"
#include "snic/attention/wnlam.hpp"
#include "snic/nn/conv.hpp"
#include "snic/nn/ops.hpp"

namespace snic::attention {

template <typename T>
struct ResidualBlock {
  nn::Conv2d<T> c1, c2;

  ResidualBlock() = default;
  explicit ResidualBlock(int c) : c1(c, c, 3, 1, 1), c2(c, c, 3, 1, 1) {}

  void init(Rng& rng) {
    c1.init_he(rng);
    c2.init_he(rng);
  }

  struct Trace {
    Tensor<T> x, z1, h1;
  };

  Tensor<T> forward_cached(const Tensor<T>& x, Trace& tr) const {
    tr.x = x;
    tr.z1 = c1.forward(x);
    tr.h1 = nn::relu(tr.z1);
    Tensor<T> out = c2.forward(tr.h1);
    for (size_t i = 0; i < out.size(); ++i) out.v[i] += x.v[i];
    return out;
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    Tensor<T> out = c2.forward(nn::relu(c1.forward(x)));
    for (size_t i = 0; i < out.size(); ++i) out.v[i] += x.v[i];
    return out;
  }

  Tensor<T> backward(const Trace& tr, const Tensor<T>& gout) {
    Tensor<T> gh1 = c2.backward(tr.h1, gout);
    Tensor<T> gz1 = nn::relu_backward(tr.z1, gh1);
    Tensor<T> gx = c1.backward(tr.x, gz1);
    for (size_t i = 0; i < gx.size(); ++i) gx.v[i] += gout.v[i];
    return gx;
  }

  void zero_grad() {
    c1.zero_grad();
    c2.zero_grad();
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    c1.visit(prefix + ".c1", f);
    c2.visit(prefix + ".c2", f);
  }
};

// Trunk/mask attention block:
//   out = x + T(x) .* sigmoid(M(x))
// T: two residual blocks. M: two residual blocks -> WNLAM -> WCBAM -> 1x1.
template <typename T>
struct ResidualAttention {
  int c = 0;
  ResidualBlock<T> t1, t2;
  ResidualBlock<T> m1, m2;
  Wnlam<T> nl;
  Wcbam<T> cb;
  nn::Linear<T> mix;  // 1x1 conv closing the mask branch

  ResidualAttention() = default;
  ResidualAttention(int c_, int win, int reduction)
      : c(c_), t1(c_), t2(c_), m1(c_), m2(c_), nl(c_, win), cb(c_, win, reduction),
        mix(c_, c_) {}

  void init(Rng& rng) {
    t1.init(rng);
    t2.init(rng);
    m1.init(rng);
    m2.init(rng);
    nl.init(rng);
    cb.init(rng);
    mix.init_he(rng);
  }

  struct Trace {
    typename ResidualBlock<T>::Trace t1, t2, m1, m2;
    typename Wnlam<T>::Trace nl;
    typename Wcbam<T>::Trace cb;
    Tensor<T> x, trunk, cb_out, gate;
  };

  Tensor<T> forward_cached(const Tensor<T>& x, Trace& tr) const {
    tr.x = x;
    tr.trunk = t2.forward_cached(t1.forward_cached(x, tr.t1), tr.t2);
    Tensor<T> m = m2.forward_cached(m1.forward_cached(x, tr.m1), tr.m2);
    m = nl.forward_cached(m, tr.nl);
    tr.cb_out = cb.forward_cached(m, tr.cb);
    tr.gate = nn::sigmoid(mix.forward(tr.cb_out));
    Tensor<T> out = x;
    for (size_t i = 0; i < out.size(); ++i) out.v[i] += tr.trunk.v[i] * tr.gate.v[i];
    return out;
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    Tensor<T> trunk = t2.forward(t1.forward(x));
    Tensor<T> gate = nn::sigmoid(mix.forward(cb.forward(nl.forward(m2.forward(m1.forward(x))))));
    Tensor<T> out = x;
    for (size_t i = 0; i < out.size(); ++i) out.v[i] += trunk.v[i] * gate.v[i];
    return out;
  }

  Tensor<T> backward(const Trace& tr, const Tensor<T>& gout) {
    Tensor<T> gtrunk(gout.h, gout.w, gout.c), ggate(gout.h, gout.w, gout.c);
    for (size_t i = 0; i < gout.size(); ++i) {
      gtrunk.v[i] = gout.v[i] * tr.gate.v[i];
      ggate.v[i] = gout.v[i] * tr.trunk.v[i];
    }
    Tensor<T> gmix_out = nn::sigmoid_backward_from_output(tr.gate, ggate);
    Tensor<T> gcb(gout.h, gout.w, c);
    mix.backward_rows(tr.cb_out.v.data(), gmix_out.v.data(), gout.h * gout.w, gcb.v.data());
    Tensor<T> gm = cb.backward(tr.cb, gcb);
    gm = nl.backward(tr.nl, gm);
    gm = m2.backward(tr.m2, gm);
    Tensor<T> gx = m1.backward(tr.m1, gm);
    Tensor<T> gt = t2.backward(tr.t2, gtrunk);
    gt = t1.backward(tr.t1, gt);
    for (size_t i = 0; i < gx.size(); ++i) gx.v[i] += gt.v[i] + gout.v[i];
    return gx;
  }

  void zero_grad() {
    t1.zero_grad();
    t2.zero_grad();
    m1.zero_grad();
    m2.zero_grad();
    nl.zero_grad();
    cb.zero_grad();
    mix.zero_grad();
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    t1.visit(prefix + ".t1", f);
    t2.visit(prefix + ".t2", f);
    m1.visit(prefix + ".m1", f);
    m2.visit(prefix + ".m2", f);
    nl.visit(prefix + ".nl", f);
    cb.visit(prefix + ".cb", f);
    mix.visit(prefix + ".mix", f);
  }
};

}  // namespace snic::attention

#endif  // SNIC_ATTENTION_RESIDUAL_ATTENTION_HPP_
