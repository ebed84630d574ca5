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

#include "snic/seg/acwe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snic::seg {

namespace {

constexpr int kRadialBins = 100;

inline double radial_frac(int y, int x, const DiskGeometry& g) {
  double dy = y - g.center_row, dx = x - g.center_col;
  return std::sqrt(dy * dy + dx * dx) / g.radius;
}

inline bool on_disk(int y, int x, const DiskGeometry& g) {
  return radial_frac(y, x, g) <= 1.0;
}

double median_of(std::vector<float>& v) {
  if (v.empty()) return 0.0;
  size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (hi + v[mid - 1]);
}

}  // namespace

Tensor<float> limb_correct(const Tensor<float>& img, const DiskGeometry& geom) {
  if (!(geom.radius > 0.0)) throw std::invalid_argument("limb_correct: invalid geometry");
  std::vector<std::vector<float>> bins(kRadialBins);
  std::vector<float> all_disk;
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) {
      double f = radial_frac(y, x, geom);
      if (f > 1.0) continue;
      int b = std::min(kRadialBins - 1, int(f * kRadialBins));
      bins[b].push_back(img.at(y, x, 0));
      all_disk.push_back(img.at(y, x, 0));
    }
  if (all_disk.empty()) throw std::invalid_argument("limb_correct: disk outside image");
  double global_median = median_of(all_disk);

  std::vector<double> profile(kRadialBins, 0.0);
  std::vector<bool> have(kRadialBins, false);
  for (int b = 0; b < kRadialBins; ++b)
    if (!bins[b].empty()) {
      profile[b] = median_of(bins[b]);
      have[b] = true;
    }
  // interpolate empty annuli from the nearest filled neighbors
  for (int b = 0; b < kRadialBins; ++b) {
    if (have[b]) continue;
    int lo = b - 1, hi = b + 1;
    while (lo >= 0 && !have[lo]) --lo;
    while (hi < kRadialBins && !have[hi]) ++hi;
    if (lo >= 0 && hi < kRadialBins)
      profile[b] = profile[lo] + (profile[hi] - profile[lo]) * double(b - lo) / double(hi - lo);
    else if (lo >= 0)
      profile[b] = profile[lo];
    else if (hi < kRadialBins)
      profile[b] = profile[hi];
    else
      profile[b] = global_median;
  }

  Tensor<float> out = img;
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) {
      double f = radial_frac(y, x, geom);
      if (f > 1.0) continue;
      int b = std::min(kRadialBins - 1, int(f * kRadialBins));
      double denom = profile[b] != 0.0 ? profile[b] : 1.0;
      out.at(y, x, 0) = static_cast<float>(double(img.at(y, x, 0)) / denom * global_median);
    }
  return out;
}

double quiet_sun_mean(const Tensor<float>& img, const DiskGeometry& geom) {
  std::vector<float> disk;
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x)
      if (on_disk(y, x, geom)) disk.push_back(img.at(y, x, 0));
  if (disk.empty()) throw std::invalid_argument("quiet_sun_mean: disk outside image");
  std::vector<float> sorted = disk;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    return sorted[size_t(q * (sorted.size() - 1))];
  };
  float p25 = quantile(0.25), p90 = quantile(0.90);
  double acc = 0.0;
  size_t n = 0;
  for (float v : disk)
    if (v >= p25 && v <= p90) {
      acc += v;
      ++n;
    }
  if (n == 0) {  // degenerate (constant) disk
    for (float v : disk) acc += v;
    n = disk.size();
  }
  return acc / double(n);
}

SegmentationMask seed_mask(const Tensor<float>& img, const DiskGeometry& geom, double alpha,
                           double qs) {
  if (!(qs > 0.0)) throw std::invalid_argument("seed_mask: qs must be positive");
  SegmentationMask m;
  m.mask = Tensor<uint8_t>(img.h, img.w, 1);
  m.geometry = geom;
  const double thr = alpha * qs;
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x)
      m.mask.at(y, x, 0) = (on_disk(y, x, geom) && img.at(y, x, 0) <= thr) ? 1 : 0;
  return m;
}

namespace {

struct RegionSums {
  double sum_in = 0, sum_out = 0;
  size_t n_in = 0, n_out = 0;
  double c_in() const { return n_in ? sum_in / n_in : 0.0; }
  double c_out() const { return n_out ? sum_out / n_out : 0.0; }
};

// boundary edges: 4-adjacent on-disk pairs with differing labels
size_t boundary_edges(const Tensor<uint8_t>& lab, const std::vector<uint8_t>& disk, int h,
                      int w) {
  size_t edges = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!disk[size_t(y) * w + x]) continue;
      if (x + 1 < w && disk[size_t(y) * w + x + 1] &&
          lab.at(y, x, 0) != lab.at(y, x + 1, 0))
        ++edges;
      if (y + 1 < h && disk[size_t(y + 1) * w + x] &&
          lab.at(y, x, 0) != lab.at(y + 1, x, 0))
        ++edges;
    }
  return edges;
}

double region_energy(const Tensor<float>& img, const Tensor<uint8_t>& lab,
                     const std::vector<uint8_t>& disk, const AcweConfig& cfg, double c_in,
                     double c_out) {
  double e = 0.0;
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) {
      if (!disk[size_t(y) * img.w + x]) continue;
      double v = img.at(y, x, 0);
      if (lab.at(y, x, 0))
        e += cfg.lambda_i * (v - c_in) * (v - c_in);
      else
        e += cfg.lambda_o * (v - c_out) * (v - c_out);
    }
  if (cfg.mu_len > 0.0)
    e += cfg.mu_len * double(boundary_edges(lab, disk, img.h, img.w));
  return e;
}

}  // namespace

AcweResult acwe_evolve(const Tensor<float>& img, const SegmentationMask& seed,
                       const AcweConfig& cfg) {
  if (img.c != 1 || seed.mask.h != img.h || seed.mask.w != img.w || seed.mask.c != 1)
    throw std::invalid_argument("acwe: image/seed shape mismatch");
  AcweResult res;
  res.mask = seed;
  if (seed.count() == 0) {
    res.empty_seed = true;
    res.converged = true;
    return res;
  }
  const int h = img.h, w = img.w;
  const DiskGeometry& geom = seed.geometry;
  std::vector<uint8_t> disk(size_t(h) * w, 0);
  size_t n_disk = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (on_disk(y, x, geom)) {
        disk[size_t(y) * w + x] = 1;
        ++n_disk;
      }

  Tensor<uint8_t>& lab = res.mask.mask;
  // membership outside the disk is forced off
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (!disk[size_t(y) * w + x]) lab.at(y, x, 0) = 0;

  RegionSums rs;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!disk[size_t(y) * w + x]) continue;
      double v = img.at(y, x, 0);
      if (lab.at(y, x, 0)) {
        rs.sum_in += v;
        ++rs.n_in;
      } else {
        rs.sum_out += v;
        ++rs.n_out;
      }
    }

  double prev_energy = region_energy(img, lab, disk, cfg, rs.c_in(), rs.c_out());
  res.energy_history.push_back(prev_energy);

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const double c_in = rs.c_in(), c_out = rs.c_out();
    size_t flips = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!disk[size_t(y) * w + x]) continue;
        double v = img.at(y, x, 0);
        double e_in = cfg.lambda_i * (v - c_in) * (v - c_in);
        double e_out = cfg.lambda_o * (v - c_out) * (v - c_out);
        double delta_len = 0.0;
        if (cfg.mu_len > 0.0) {
          // boundary-edge change if this pixel joined the foreground
          int nb_in = 0, nb_all = 0;
          auto look = [&](int yy, int xx) {
            if (yy < 0 || yy >= h || xx < 0 || xx >= w) return;
            if (!disk[size_t(yy) * w + xx]) return;
            ++nb_all;
            nb_in += lab.at(yy, xx, 0) ? 1 : 0;
          };
          look(y - 1, x);
          look(y + 1, x);
          look(y, x - 1);
          look(y, x + 1);
          delta_len = cfg.mu_len * double(nb_all - 2 * nb_in);
        }
        bool want_in = e_in + delta_len < e_out;
        bool is_in = lab.at(y, x, 0) != 0;
        if (want_in != is_in) {
          lab.at(y, x, 0) = want_in ? 1 : 0;
          if (want_in) {
            rs.sum_in += v;
            ++rs.n_in;
            rs.sum_out -= v;
            --rs.n_out;
          } else {
            rs.sum_in -= v;
            --rs.n_in;
            rs.sum_out += v;
            ++rs.n_out;
          }
          ++flips;
        }
      }
    res.iterations = iter + 1;
    double energy = region_energy(img, lab, disk, cfg, rs.c_in(), rs.c_out());
    if (energy > prev_energy * (1.0 + 1e-12) + 1e-9)
      throw std::logic_error("acwe: energy increased across a sweep");
    prev_energy = energy;
    res.energy_history.push_back(energy);
    if (double(flips) / double(n_disk) < cfg.tol) {
      res.converged = true;
      break;
    }
    if (rs.n_in == 0) break;  // region vanished; best-so-far with warning
  }
  return res;
}

double dice(const Tensor<uint8_t>& a, const Tensor<uint8_t>& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("dice: shape mismatch");
  size_t na = 0, nb = 0, inter = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    bool xa = a.v[i] != 0, xb = b.v[i] != 0;
    na += xa;
    nb += xb;
    inter += (xa && xb);
  }
  if (na + nb == 0) return 1.0;  // identical empty segmentations
  return 2.0 * double(inter) / double(na + nb);
}

double dice(const SegmentationMask& a, const SegmentationMask& b) {
  return dice(a.mask, b.mask);
}

}  // namespace snic::seg
