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

#include "snic/eval/metrics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace snic::eval {

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
constexpr std::array<double, 5> kScaleWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

std::array<double, kWin> gaussian_window() {
  std::array<double, kWin> w{};
  double sum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    double d = i - (kWin - 1) / 2.0;
    w[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

// Separable valid-mode Gaussian filter on a single-channel double image.
struct Plane {
  int h = 0, w = 0;
  std::vector<double> v;
  Plane(int h_, int w_) : h(h_), w(w_), v(size_t(h_) * w_, 0.0) {}
  double& at(int y, int x) { return v[size_t(y) * w + x]; }
  double at(int y, int x) const { return v[size_t(y) * w + x]; }
};

Plane filter_valid(const Plane& in, const std::array<double, kWin>& k) {
  Plane tmp(in.h, in.w - kWin + 1);
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < tmp.w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWin; ++i) acc += k[i] * in.at(y, x + i);
      tmp.at(y, x) = acc;
    }
  Plane out(in.h - kWin + 1, tmp.w);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWin; ++i) acc += k[i] * tmp.at(y + i, x);
      out.at(y, x) = acc;
    }
  return out;
}

Plane to_plane(const Tensor<float>& t) {
  Plane p(t.h, t.w);
  for (int y = 0; y < t.h; ++y)
    for (int x = 0; x < t.w; ++x) p.at(y, x) = double(t.at(y, x, 0));
  return p;
}

Plane mul(const Plane& a, const Plane& b) {
  Plane out(a.h, a.w);
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

// 2x2 mean pooling with ceil semantics: edge cells average the available
// pixels, so odd dims shrink to ceil(n/2).
Plane downsample2(const Plane& in) {
  Plane out((in.h + 1) / 2, (in.w + 1) / 2);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) {
      double acc = 0.0;
      int n = 0;
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          int yy = 2 * y + dy, xx = 2 * x + dx;
          if (yy < in.h && xx < in.w) {
            acc += in.at(yy, xx);
            ++n;
          }
        }
      out.at(y, x) = acc / n;
    }
  return out;
}

// Mean luminance and contrast-structure terms of SSIM at one scale.
std::pair<double, double> ssim_l_cs(const Plane& x, const Plane& y) {
  auto k = gaussian_window();
  Plane mx = filter_valid(x, k), my = filter_valid(y, k);
  Plane mxx = filter_valid(mul(x, x), k), myy = filter_valid(mul(y, y), k);
  Plane mxy = filter_valid(mul(x, y), k);
  double l_acc = 0.0, cs_acc = 0.0;
  for (size_t i = 0; i < mx.v.size(); ++i) {
    double ux = mx.v[i], uy = my.v[i];
    double vx = mxx.v[i] - ux * ux;
    double vy = myy.v[i] - uy * uy;
    double vxy = mxy.v[i] - ux * uy;
    l_acc += (2.0 * ux * uy + kC1) / (ux * ux + uy * uy + kC1);
    cs_acc += (2.0 * vxy + kC2) / (vx + vy + kC2);
  }
  return {l_acc / mx.v.size(), cs_acc / mx.v.size()};
}

}  // namespace

double psnr(const Tensor<float>& a, const Tensor<float>& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("psnr: shape mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = double(a.v[i]) - double(b.v[i]);
    acc += d * d;
  }
  double mse = acc / double(a.size());
  if (mse == 0.0) return kInf;
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

MsssimResult msssim(const Tensor<float>& a, const Tensor<float>& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("msssim: shape mismatch");
  // how many dyadic scales keep the map >= the window size
  int scales = 0;
  for (int h = a.h, w = a.w; scales < 5 && h >= kWin && w >= kWin;
       h = (h + 1) / 2, w = (w + 1) / 2)
    ++scales;
  if (scales == 0) throw std::invalid_argument("msssim: image smaller than the filter window");

  std::array<double, 5> weights = kScaleWeights;
  if (scales < 5) {
    double sum = 0.0;
    for (int i = 0; i < scales; ++i) sum += weights[i];
    for (int i = 0; i < scales; ++i) weights[i] /= sum;
  }

  Plane x = to_plane(a), y = to_plane(b);
  double m = 1.0;
  MsssimResult out;
  out.scales_used = scales;
  for (int s = 0; s < scales; ++s) {
    auto [l, cs] = ssim_l_cs(x, y);
    if (cs < 0.0) cs = 0.0;
    if (s + 1 < scales) {
      m *= std::pow(cs, weights[s]);
      x = downsample2(x);
      y = downsample2(y);
    } else {
      if (l < 0.0) l = 0.0;
      m *= std::pow(l * cs, weights[s]);
    }
  }
  out.value = m;
  return out;
}

double msssim_log_from_m(double m) {
  if (m >= 1.0) return kInf;
  return -10.0 * std::log10(1.0 - m);
}

double msssim_log(const Tensor<float>& a, const Tensor<float>& b) {
  return msssim_log_from_m(msssim(a, b).value);
}

}  // namespace snic::eval
