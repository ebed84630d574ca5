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

#ifndef SNIC_NN_GDN_HPP_
#define SNIC_NN_GDN_HPP_

#include <stdexcept>
#include <vector>

#include "snic/nn/conv.hpp"

namespace snic::nn {

// Divisive normalization, absolute-value exponent-1 form:
//   gdn:  y_i = x_i / (beta_i + sum_j gamma_ij |x_j|)
//   igdn: y_i = x_i * (beta_i + sum_j gamma_ij |x_j|)
// beta: length-C, strictly positive. gamma: C x C (row i weighs |x_j| in the
// denominator of channel i), nonnegative.
template <typename T>
Tensor<T> gdn_forward(const Tensor<T>& x, const std::vector<T>& beta,
                      const std::vector<T>& gamma, bool inverse) {
  const int C = x.c;
  if (static_cast<int>(beta.size()) != C || static_cast<int>(gamma.size()) != C * C)
    throw std::invalid_argument("gdn: parameter size mismatch");
  for (T b : beta)
    if (!(b > T(0))) throw std::invalid_argument("gdn: beta must be positive");
  const int P = x.h * x.w;
  Tensor<T> absx(x.h, x.w, C);
  for (size_t i = 0; i < x.size(); ++i) absx.v[i] = std::abs(x.v[i]);
  Tensor<T> denom(x.h, x.w, C);
  CMapRM<T> A(absx.v.data(), P, C);
  CMapRM<T> G(gamma.data(), C, C);
  MapRM<T> D(denom.v.data(), P, C);
  D.noalias() = A * G.transpose();
  Tensor<T> y(x.h, x.w, C);
  for (int p = 0; p < P; ++p) {
    const T* xv = x.v.data() + size_t(p) * C;
    T* dv = denom.v.data() + size_t(p) * C;
    T* yv = y.v.data() + size_t(p) * C;
    for (int i = 0; i < C; ++i) {
      T d = dv[i] + beta[i];
      dv[i] = d;
      yv[i] = inverse ? xv[i] * d : xv[i] / d;
    }
  }
  return y;
}

template <typename T>
struct GdnGrads {
  Tensor<T> gx;
  std::vector<T> gbeta;
  std::vector<T> ggamma;
};

template <typename T>
GdnGrads<T> gdn_backward(const Tensor<T>& x, const std::vector<T>& beta,
                         const std::vector<T>& gamma, const Tensor<T>& gout,
                         bool inverse) {
  const int C = x.c;
  const int P = x.h * x.w;
  Tensor<T> absx(x.h, x.w, C);
  for (size_t i = 0; i < x.size(); ++i) absx.v[i] = std::abs(x.v[i]);
  Tensor<T> denom(x.h, x.w, C);
  {
    CMapRM<T> A(absx.v.data(), P, C);
    CMapRM<T> G(gamma.data(), C, C);
    MapRM<T> D(denom.v.data(), P, C);
    D.noalias() = A * G.transpose();
    for (int p = 0; p < P; ++p)
      for (int i = 0; i < C; ++i) denom.v[size_t(p) * C + i] += beta[i];
  }

  GdnGrads<T> out;
  out.gx = Tensor<T>(x.h, x.w, C);
  out.gbeta.assign(C, T(0));
  out.ggamma.assign(size_t(C) * C, T(0));

  // u_i = g_i * x_i / d_i^2 (gdn)  or  v_i = g_i * x_i (igdn); the cross-
  // channel term of gx and the gamma grads are GEMMs over these.
  Tensor<T> u(x.h, x.w, C);
  for (int p = 0; p < P; ++p) {
    const T* xv = x.v.data() + size_t(p) * C;
    const T* gv = gout.v.data() + size_t(p) * C;
    const T* dv = denom.v.data() + size_t(p) * C;
    T* uv = u.v.data() + size_t(p) * C;
    T* gxv = out.gx.v.data() + size_t(p) * C;
    for (int i = 0; i < C; ++i) {
      if (inverse) {
        uv[i] = gv[i] * xv[i];
        gxv[i] = gv[i] * dv[i];
        out.gbeta[i] += uv[i];
      } else {
        uv[i] = gv[i] * xv[i] / (dv[i] * dv[i]);
        gxv[i] = gv[i] / dv[i];
        out.gbeta[i] -= uv[i];
      }
    }
  }
  // ggamma_ij = +/- sum_p u_i |x_j|
  {
    CMapRM<T> U(u.v.data(), P, C);
    CMapRM<T> A(absx.v.data(), P, C);
    MapRM<T> GG(out.ggamma.data(), C, C);
    GG.noalias() = U.transpose() * A;
    if (!inverse) GG = -GG;
  }
  // cross term of gx: (U * Gamma) .* sign(x), sign +1 for igdn, -1 for gdn
  {
    Tensor<T> cross(x.h, x.w, C);
    CMapRM<T> U(u.v.data(), P, C);
    CMapRM<T> G(gamma.data(), C, C);
    MapRM<T> X2(cross.v.data(), P, C);
    X2.noalias() = U * G;
    for (size_t i = 0; i < x.size(); ++i) {
      T s = x.v[i] > T(0) ? T(1) : (x.v[i] < T(0) ? T(-1) : T(0));
      out.gx.v[i] += (inverse ? s : -s) * cross.v[i];
    }
  }
  return out;
}

// Trainable GDN/IGDN layer. Effective parameters are squares of the raw ones
// (plus a floor on beta) so gradient steps cannot leave the valid region.
template <typename T>
struct GdnLayer {
  static constexpr double kBetaFloor = 1e-6;
  int c = 0;
  bool inverse = false;
  std::vector<T> braw, graw;
  std::vector<T> gbraw, ggraw;

  GdnLayer() = default;
  GdnLayer(int c_, bool inverse_)
      : c(c_), inverse(inverse_), braw(c_, T(1)), graw(size_t(c_) * c_, T(0)),
        gbraw(c_, T(0)), ggraw(size_t(c_) * c_, T(0)) {
    // gamma starts near 0.1 on the diagonal, the usual stable init.
    for (int i = 0; i < c_; ++i) graw[size_t(i) * c_ + i] = T(0.31622776601683794);
  }

  std::vector<T> beta() const {
    std::vector<T> b(c);
    for (int i = 0; i < c; ++i) b[i] = T(kBetaFloor) + braw[i] * braw[i];
    return b;
  }
  std::vector<T> gamma() const {
    std::vector<T> g(graw.size());
    for (size_t i = 0; i < graw.size(); ++i) g[i] = graw[i] * graw[i];
    return g;
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    return gdn_forward(x, beta(), gamma(), inverse);
  }

  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& gout) {
    GdnGrads<T> g = gdn_backward(x, beta(), gamma(), gout, inverse);
    for (int i = 0; i < c; ++i) gbraw[i] += g.gbeta[i] * T(2) * braw[i];
    for (size_t i = 0; i < graw.size(); ++i) ggraw[i] += g.ggamma[i] * T(2) * graw[i];
    return std::move(g.gx);
  }

  void zero_grad() {
    std::fill(gbraw.begin(), gbraw.end(), T(0));
    std::fill(ggraw.begin(), ggraw.end(), T(0));
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".beta_raw", braw, gbraw, std::vector<int>{c});
    f(prefix + ".gamma_raw", graw, ggraw, std::vector<int>{c, c});
  }
};

}  // namespace snic::nn

#endif  // SNIC_NN_GDN_HPP_
