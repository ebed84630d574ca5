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

#ifndef SNIC_ENTROPY_RATE_HPP_
#define SNIC_ENTROPY_RATE_HPP_

#include <utility>
#include <vector>

#include "snic/model/transforms.hpp"
#include "snic/quant/quantize.hpp"

namespace snic::entropy {

// Code length of one latent residual t under N(0, sigma) discretized to the
// unit grid, with derivatives. t = y - mu, so dt feeds both y and (negated)
// mu gradients.
struct BitsGrad {
  double bits = 0.0, dt = 0.0, dsigma = 0.0;
};

inline BitsGrad gaussian_bits_grad(double t, double sigma) {
  quant::PmfGrad g = quant::discretized_gaussian_pmf_grad(t, 0.0, sigma);
  BitsGrad out;
  const double kInvLn2 = 1.4426950408889634074;
  out.bits = -std::log2(g.p);
  out.dt = -g.dn / g.p * kInvLn2;
  out.dsigma = -g.dsigma / g.p * kInvLn2;
  return out;
}

inline double gaussian_bits(double t, double sigma) {
  return -std::log2(quant::discretized_gaussian_pmf(t, 0.0, sigma));
}

// Total model code length of a latent/hyper-latent pair:
//   -sum log2 P(y_i | z, y_slices<i) - sum log2 P(z)
// Differentiable in the relaxed values: gradients flow into y (directly and
// through the slice conditioning), into z through the hyper synthesis, and
// into all entropy-model parameters.
template <typename T>
struct RateTrace {
  double bits_y = 0.0, bits_z = 0.0;
  double bits() const { return bits_y + bits_z; }

  Tensor<T> y, z;
  Tensor<T> hf;
  typename model::HyperSynthesis<T>::Trace hs_tr;
  std::vector<typename SlicePredictor<T>::Trace> slice_tr;
  std::vector<EntropyParams<T>> params;
  std::vector<Tensor<T>> y_slices;
};

template <typename T>
RateTrace<T> rate_forward(model::CompressionModel<T>& m, const Tensor<T>& y_tilde,
                          const Tensor<T>& z_tilde) {
  RateTrace<T> tr;
  tr.y = y_tilde;
  tr.z = z_tilde;
  tr.hf = m.hs.forward_cached(z_tilde, tr.hs_tr);
  const int ns = m.cfg.num_slices;
  tr.slice_tr.resize(ns);
  tr.params.resize(ns);
  tr.y_slices.reserve(ns);
  for (int i = 0; i < ns; ++i)
    tr.y_slices.push_back(slice_channels(y_tilde, m.scheme.begin(i), m.scheme.end(i)));
  for (int i = 0; i < ns; ++i) {
    std::vector<const Tensor<T>*> parts{&tr.hf};
    for (int j = 0; j < i; ++j) parts.push_back(&tr.y_slices[j]);
    Tensor<T> in = concat_channels(parts);
    tr.params[i] = m.slices[i].forward_cached(in, tr.slice_tr[i]);
    const auto& p = tr.params[i];
    const Tensor<T>& ys = tr.y_slices[i];
    for (size_t e = 0; e < ys.size(); ++e)
      tr.bits_y += gaussian_bits(double(ys.v[e]) - double(p.mu.v[e]), double(p.sigma.v[e]));
  }
  for (int ch = 0; ch < tr.z.c; ++ch)
    for (int y = 0; y < tr.z.h; ++y)
      for (int x = 0; x < tr.z.w; ++x)
        tr.bits_z += m.prior.bits(ch, double(tr.z.at(y, x, ch)));
  return tr;
}

// gbits = d loss / d bits. Returns (gy, gz) and accumulates parameter grads.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> rate_backward(model::CompressionModel<T>& m,
                                              RateTrace<T>& tr, double gbits) {
  const int ns = m.cfg.num_slices;
  const int sc = m.scheme.slice_channels;
  Tensor<T> gy(tr.y.h, tr.y.w, tr.y.c);
  Tensor<T> ghf(tr.hf.h, tr.hf.w, tr.hf.c);
  // Later slices feed gradients into earlier ones through the conditioning,
  // so walk backwards accumulating per-slice input grads.
  std::vector<Tensor<T>> gy_slices(ns);
  for (int i = 0; i < ns; ++i) gy_slices[i] = Tensor<T>(tr.y.h, tr.y.w, sc);
  for (int i = ns - 1; i >= 0; --i) {
    const auto& p = tr.params[i];
    const Tensor<T>& ys = tr.y_slices[i];
    Tensor<T> gmu(ys.h, ys.w, sc), gsigma(ys.h, ys.w, sc);
    for (size_t e = 0; e < ys.size(); ++e) {
      BitsGrad bg = gaussian_bits_grad(double(ys.v[e]) - double(p.mu.v[e]), double(p.sigma.v[e]));
      T gt = T(gbits * bg.dt);
      gy_slices[i].v[e] += gt;
      gmu.v[e] = -gt;
      gsigma.v[e] = T(gbits * bg.dsigma);
    }
    Tensor<T> gin = m.slices[i].backward(tr.slice_tr[i], gmu, gsigma);
    // split the input grad back into hyper features + earlier slices
    for (int y = 0; y < gin.h; ++y)
      for (int x = 0; x < gin.w; ++x) {
        const T* src = gin.pos(y, x);
        T* dhf = ghf.pos(y, x);
        for (int ch = 0; ch < tr.hf.c; ++ch) dhf[ch] += src[ch];
        for (int j = 0; j < i; ++j) {
          T* dys = gy_slices[j].pos(y, x);
          const T* s = src + tr.hf.c + j * sc;
          for (int ch = 0; ch < sc; ++ch) dys[ch] += s[ch];
        }
      }
  }
  for (int i = 0; i < ns; ++i) {
    const int c0 = m.scheme.begin(i);
    for (int y = 0; y < gy.h; ++y)
      for (int x = 0; x < gy.w; ++x) {
        const T* src = gy_slices[i].pos(y, x);
        T* dst = gy.pos(y, x) + c0;
        for (int ch = 0; ch < sc; ++ch) dst[ch] += src[ch];
      }
  }
  Tensor<T> gz = m.hs.backward(tr.hs_tr, ghf);
  for (int ch = 0; ch < tr.z.c; ++ch)
    for (int y = 0; y < tr.z.h; ++y)
      for (int x = 0; x < tr.z.w; ++x) {
        double gt = 0.0;
        m.prior.bits_backward(ch, double(tr.z.at(y, x, ch)), gbits, &gt);
        gz.at(y, x, ch) += T(gt);
      }
  return {std::move(gy), std::move(gz)};
}

// Convenience wrapper for evaluation on already-quantized values.
template <typename T>
double estimate_rate_bits(model::CompressionModel<T>& m, const Tensor<T>& y_hat,
                          const Tensor<T>& z_hat) {
  RateTrace<T> tr = rate_forward(m, y_hat, z_hat);
  return tr.bits();
}

}  // namespace snic::entropy

#endif  // SNIC_ENTROPY_RATE_HPP_
