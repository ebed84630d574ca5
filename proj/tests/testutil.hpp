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

#ifndef SNIC_TESTS_TESTUTIL_HPP_
#define SNIC_TESTS_TESTUTIL_HPP_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "snic/core/rng.hpp"
#include "snic/core/tensor.hpp"

namespace snic::testutil {

// Central-difference gradient check in double precision. Structural zeros
// (e.g. softmax shift invariance) make pure relative error ill-defined, so
// the denominator is floored at a small absolute scale.
struct GradCheck {
  double worst_rel = 0.0;
  int points = 0;
  bool ok(double tol = 1e-4) const { return worst_rel <= tol; }
};

inline double rel_err(double fd, double an) {
  double denom = std::max({std::abs(fd), std::abs(an), 1e-3});
  return std::abs(fd - an) / denom;
}

// objective: scalar function of an externally-owned parameter vector;
// analytic: matching gradient values for the same coordinates.
inline GradCheck check_gradient(const std::function<double()>& objective,
                                const std::vector<double*>& coords,
                                const std::vector<double>& analytic, Rng& rng,
                                int npoints) {
  GradCheck out;
  for (int t = 0; t < npoints; ++t) {
    size_t i = coords.size() == 1 ? 0 : size_t(rng.uniform_int(int(coords.size())));
    double* p = coords[i];
    const double orig = *p;
    const double h = 1e-5 * std::max(1.0, std::abs(orig));
    *p = orig + h;
    double fp = objective();
    *p = orig - h;
    double fm = objective();
    *p = orig;
    double fd = (fp - fm) / (2.0 * h);
    out.worst_rel = std::max(out.worst_rel, rel_err(fd, analytic[i]));
    ++out.points;
  }
  return out;
}

// Collects pointers to every visit()-exposed parameter of a double-typed
// layer, optionally strided to keep FD checks affordable.
template <typename Layer>
void collect_params(Layer& layer, std::vector<double*>& values,
                    std::vector<double*>& grads, size_t stride = 1) {
  layer.visit("p", [&](const std::string&, std::vector<double>& w, std::vector<double>& g,
                       std::vector<int>) {
    for (size_t i = 0; i < w.size(); i += stride) {
      values.push_back(&w[i]);
      grads.push_back(&g[i]);
    }
  });
}

inline Tensor<double> random_tensor(int h, int w, int c, Rng& rng, double scale = 1.0) {
  Tensor<double> t(h, w, c);
  for (auto& v : t.v) v = scale * rng.normal();
  return t;
}

inline Tensor<float> random_tensor_f(int h, int w, int c, Rng& rng, double scale = 1.0) {
  Tensor<float> t(h, w, c);
  for (auto& v : t.v) v = float(scale * rng.normal());
  return t;
}

// Reference convolution for oracle comparisons: direct accumulation loops.
inline Tensor<double> naive_conv2d(const Tensor<double>& x, const std::vector<double>& w,
                                   const std::vector<double>& b, int in_c, int out_c, int k,
                                   int stride, int pad) {
  const int oh = (x.h + 2 * pad - k) / stride + 1;
  const int ow = (x.w + 2 * pad - k) / stride + 1;
  Tensor<double> out(oh, ow, out_c);
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox)
      for (int oc = 0; oc < out_c; ++oc) {
        double acc = b[oc];
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx) {
            int iy = oy * stride + ky - pad, ix = ox * stride + kx - pad;
            if (iy < 0 || iy >= x.h || ix < 0 || ix >= x.w) continue;
            for (int ic = 0; ic < in_c; ++ic)
              acc += x.at(iy, ix, ic) * w[((size_t(ky) * k + kx) * in_c + ic) * out_c + oc];
          }
        out.at(oy, ox, oc) = acc;
      }
  return out;
}

struct TmpDir {
  std::filesystem::path path;
  explicit TmpDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("snic_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TmpDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace snic::testutil

#endif  // SNIC_TESTS_TESTUTIL_HPP_
