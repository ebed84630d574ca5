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

#ifndef SNIC_QUANT_QUANTIZE_HPP_
#define SNIC_QUANT_QUANTIZE_HPP_

#include <cmath>
#include <stdexcept>

#include "snic/core/rng.hpp"
#include "snic/core/tensor.hpp"

namespace snic::quant {

// Scale floor for the conditional Gaussian; keeps every symbol codable and
// the CDF tables non-degenerate.
inline constexpr double kSigmaFloor = 0.11;

// Ties round away from zero (std::round semantics), the rule used everywhere
// in the artifact.
template <typename T>
T round_half_away(T x) {
  return std::round(x);
}

// Mean-centered rounding: round(y - mu) + mu. The coded residual
// round(y - mu) is an exact integer.
template <typename T>
Tensor<T> quantize_round(const Tensor<T>& y, const Tensor<T>& mu) {
  if (!y.same_shape(mu)) throw std::invalid_argument("quantize_round: shape mismatch");
  Tensor<T> out(y.h, y.w, y.c);
  for (size_t i = 0; i < y.size(); ++i) {
    T d = y.v[i] - mu.v[i];
    if (!std::isfinite(static_cast<double>(d)))
      throw std::invalid_argument("quantize_round: non-finite input");
    out.v[i] = std::round(d) + mu.v[i];
  }
  return out;
}

template <typename T>
Tensor<T> quantize_round(const Tensor<T>& y) {
  Tensor<T> mu(y.h, y.w, y.c);
  return quantize_round(y, mu);
}

// Training relaxation: y + U(-1/2, 1/2), elementwise i.i.d.
template <typename T>
Tensor<T> add_uniform_noise(const Tensor<T>& y, Rng& rng) {
  Tensor<T> out = y;
  for (auto& v : out.v) v += static_cast<T>(rng.uniform() - 0.5);
  return out;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

struct PmfResult {
  double p = 0.0;
  bool sigma_clamped = false;
};

// P(round-quantized value == n) under N(mu, sigma^2):
//   Phi((n + 1/2 - mu)/sigma) - Phi((n - 1/2 - mu)/sigma)
// i.e. the density convolved with a unit rect, evaluated at n. Evaluating at
// non-integer n gives the continuous interpolation used on relaxed values.
// Sigma below the floor is clamped and flagged.
inline PmfResult discretized_gaussian_pmf_ex(double n, double mu, double sigma) {
  PmfResult r;
  if (sigma < kSigmaFloor) {
    sigma = kSigmaFloor;
    r.sigma_clamped = true;
  }
  const double a = (n - 0.5 - mu) / sigma;
  const double b = (n + 0.5 - mu) / sigma;
  const double inv_sqrt2 = 0.7071067811865475244;
  double p;
  if (a >= 0.0) {
    p = 0.5 * (std::erfc(a * inv_sqrt2) - std::erfc(b * inv_sqrt2));
  } else if (b <= 0.0) {
    p = 0.5 * (std::erfc(-b * inv_sqrt2) - std::erfc(-a * inv_sqrt2));
  } else {
    p = normal_cdf(b) - normal_cdf(a);
  }
  // Strictly positive by construction; guard the subtractive underflow.
  r.p = p > 1e-300 ? p : 1e-300;
  return r;
}

inline double discretized_gaussian_pmf(double n, double mu, double sigma) {
  return discretized_gaussian_pmf_ex(n, mu, sigma).p;
}

inline double normal_pdf(double x) {
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

// d pmf / d n, d pmf / d mu, d pmf / d sigma for the interval formula above.
struct PmfGrad {
  double p = 0.0;
  double dn = 0.0, dmu = 0.0, dsigma = 0.0;
};

inline PmfGrad discretized_gaussian_pmf_grad(double n, double mu, double sigma) {
  PmfGrad g;
  double s = sigma < kSigmaFloor ? kSigmaFloor : sigma;
  const double a = (n - 0.5 - mu) / s;
  const double b = (n + 0.5 - mu) / s;
  g.p = discretized_gaussian_pmf(n, mu, s);
  const double fa = normal_pdf(a), fb = normal_pdf(b);
  g.dn = (fb - fa) / s;
  g.dmu = -(fb - fa) / s;
  g.dsigma = sigma < kSigmaFloor ? 0.0 : -(fb * b - fa * a) / s;
  return g;
}

}  // namespace snic::quant

#endif  // SNIC_QUANT_QUANTIZE_HPP_
