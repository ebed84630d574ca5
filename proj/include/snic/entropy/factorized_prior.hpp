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

#ifndef SNIC_ENTROPY_FACTORIZED_PRIOR_HPP_
#define SNIC_ENTROPY_FACTORIZED_PRIOR_HPP_

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "snic/core/rng.hpp"
#include "snic/core/tensor.hpp"
#include "snic/nn/ops.hpp"

namespace snic::entropy {

// Learned per-channel univariate CDF: a stack of monotone affine+gated-tanh
// maps ending in a sigmoid. Positivity of the affine weights is enforced via
// softplus and the tanh gates stay in (-1, 1), so the CDF is strictly
// increasing and maps the real line onto (0, 1). P(n) = CDF(n+1/2)-CDF(n-1/2).
template <typename T>
struct FactorizedPrior {
  static constexpr int kLayers = 4;
  // widths 1 -> 3 -> 3 -> 3 -> 1
  static constexpr std::array<int, kLayers + 1> kDims = {1, 3, 3, 3, 1};

  int channels = 0;
  // Flattened per-channel parameters; w[k] is (dout x din) row-major.
  std::array<std::vector<T>, kLayers> w, b;
  std::array<std::vector<T>, kLayers - 1> a;
  std::array<std::vector<T>, kLayers> gw, gb;
  std::array<std::vector<T>, kLayers - 1> ga;

  FactorizedPrior() = default;
  explicit FactorizedPrior(int channels_) : channels(channels_) {
    for (int k = 0; k < kLayers; ++k) {
      w[k].assign(size_t(channels) * kDims[k + 1] * kDims[k], T(0));
      b[k].assign(size_t(channels) * kDims[k + 1], T(0));
      gw[k].assign(w[k].size(), T(0));
      gb[k].assign(b[k].size(), T(0));
      if (k + 1 < kLayers) {
        a[k].assign(size_t(channels) * kDims[k + 1], T(0));
        ga[k].assign(a[k].size(), T(0));
      }
    }
  }

  void init(Rng& rng) {
    // per-layer gain ~ 1 (softplus(raw) ~ 1/fan_in), jittered offsets so
    // hidden units decorrelate; keeps the default CDF spread over a few
    // integers instead of a near-step
    for (int k = 0; k < kLayers; ++k) {
      double target = 1.0 / kDims[k];
      double raw = std::log(std::expm1(target));
      for (auto& x : w[k]) x = T(raw + 0.05 * rng.normal());
      for (auto& x : b[k]) x = T(0.2 * rng.normal());
      if (k + 1 < kLayers)
        for (auto& x : a[k]) x = T(0.05 * rng.normal());
    }
  }

  struct EvalTrace {
    // pre-activation z and unit input u per layer; widths are tiny so fixed
    // arrays suffice.
    std::array<std::array<double, 3>, kLayers> z;
    std::array<std::array<double, 3>, kLayers + 1> u;
    double out = 0.0;  // sigmoid output
  };

  double cdf_traced(int ch, double x, EvalTrace& tr) const {
    tr.u[0][0] = x;
    for (int k = 0; k < kLayers; ++k) {
      const int din = kDims[k], dout = kDims[k + 1];
      const T* wk = w[k].data() + size_t(ch) * dout * din;
      const T* bk = b[k].data() + size_t(ch) * dout;
      for (int o = 0; o < dout; ++o) {
        double acc = bk[o];
        for (int i = 0; i < din; ++i)
          acc += nn::softplus_scalar(double(wk[o * din + i])) * tr.u[k][i];
        tr.z[k][o] = acc;
        if (k + 1 < kLayers) {
          const T* ak = a[k].data() + size_t(ch) * dout;
          tr.u[k + 1][o] = acc + std::tanh(double(ak[o])) * std::tanh(acc);
        } else {
          tr.u[k + 1][o] = acc;
        }
      }
    }
    tr.out = 1.0 / (1.0 + std::exp(-tr.u[kLayers][0]));
    return tr.out;
  }

  double cdf(int ch, double x) const {
    EvalTrace tr;
    return cdf_traced(ch, x, tr);
  }

  double pmf(int ch, double t) const { return pmf_clamped(cdf(ch, t + 0.5) - cdf(ch, t - 0.5)); }

  static double pmf_clamped(double p) { return p > 1e-300 ? p : 1e-300; }

  // Backprop `gout` (d loss / d cdf) through one traced evaluation; returns
  // d cdf / d x and accumulates parameter gradients.
  double backward_traced(int ch, const EvalTrace& tr, double gout) {
    std::array<double, 3> gu{};
    gu[0] = gout * tr.out * (1.0 - tr.out);
    for (int k = kLayers - 1; k >= 0; --k) {
      const int din = kDims[k], dout = kDims[k + 1];
      const T* wk = w[k].data() + size_t(ch) * dout * din;
      T* gwk = gw[k].data() + size_t(ch) * dout * din;
      T* gbk = gb[k].data() + size_t(ch) * dout;
      std::array<double, 3> gz{};
      for (int o = 0; o < dout; ++o) {
        double gzo = gu[o];
        if (k + 1 < kLayers) {
          const T* ak = a[k].data() + size_t(ch) * dout;
          T* gak = ga[k].data() + size_t(ch) * dout;
          double tz = std::tanh(tr.z[k][o]);
          double ta = std::tanh(double(ak[o]));
          // u = z + tanh(a) tanh(z)
          gak[o] += T(gu[o] * tz * (1.0 - ta * ta));
          gzo = gu[o] * (1.0 + ta * (1.0 - tz * tz));
        }
        gz[o] = gzo;
        gbk[o] += T(gzo);
      }
      std::array<double, 3> gnext{};
      for (int o = 0; o < dout; ++o) {
        for (int i = 0; i < din; ++i) {
          double sp = nn::softplus_scalar(double(wk[o * din + i]));
          double dsp = 1.0 / (1.0 + std::exp(-double(wk[o * din + i])));
          gwk[o * din + i] += T(gz[o] * tr.u[k][i] * dsp);
          gnext[i] += gz[o] * sp;
        }
      }
      gu = gnext;
    }
    return gu[0];
  }

  // -log2 P evaluated at relaxed value t for channel ch, with gradient wrt t
  // and accumulated parameter gradients (scaled by gbits).
  double bits_backward(int ch, double t, double gbits, double* gt) {
    EvalTrace hi, lo;
    double chi = cdf_traced(ch, t + 0.5, hi);
    double clo = cdf_traced(ch, t - 0.5, lo);
    double p = pmf_clamped(chi - clo);
    double bits = -std::log2(p);
    if (gbits != 0.0 && chi - clo > 1e-300) {
      const double kInvLn2 = 1.4426950408889634074;
      double gp = -gbits * kInvLn2 / p;
      double g1 = backward_traced(ch, hi, gp);
      double g2 = backward_traced(ch, lo, -gp);
      if (gt) *gt += g1 + g2;
    }
    return bits;
  }

  double bits(int ch, double t) const { return -std::log2(pmf(ch, t)); }

  void zero_grad() {
    for (int k = 0; k < kLayers; ++k) {
      std::fill(gw[k].begin(), gw[k].end(), T(0));
      std::fill(gb[k].begin(), gb[k].end(), T(0));
      if (k + 1 < kLayers) std::fill(ga[k].begin(), ga[k].end(), T(0));
    }
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    for (int k = 0; k < kLayers; ++k) {
      std::string base = prefix + ".l" + std::to_string(k);
      f(base + ".w", w[k], gw[k], std::vector<int>{channels, kDims[k + 1], kDims[k]});
      f(base + ".b", b[k], gb[k], std::vector<int>{channels, kDims[k + 1]});
      if (k + 1 < kLayers)
        f(base + ".a", a[k], ga[k], std::vector<int>{channels, kDims[k + 1]});
    }
  }
};

}  // namespace snic::entropy

#endif  // SNIC_ENTROPY_FACTORIZED_PRIOR_HPP_
