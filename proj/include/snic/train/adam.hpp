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

#ifndef SNIC_TRAIN_ADAM_HPP_
#define SNIC_TRAIN_ADAM_HPP_

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace snic::train {

// Adaptive-moment optimizer over any visit()-able parameter owner.
// State is keyed by parameter name so it round-trips through checkpoints.
class Adam {
 public:
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  int64_t t = 0;
  std::map<std::string, std::vector<float>> m, v;

  template <typename Owner>
  double grad_norm(Owner& owner) {
    double acc = 0.0;
    owner.visit([&](const std::string&, std::vector<float>&, std::vector<float>& g,
                    std::vector<int>) {
      for (float x : g) acc += double(x) * x;
    });
    return std::sqrt(acc);
  }

  template <typename Owner>
  void clip_global_norm(Owner& owner, double max_norm) {
    double n = grad_norm(owner);
    if (n <= max_norm || n == 0.0) return;
    float s = float(max_norm / n);
    owner.visit([&](const std::string&, std::vector<float>&, std::vector<float>& g,
                    std::vector<int>) {
      for (float& x : g) x *= s;
    });
  }

  template <typename Owner>
  void step(Owner& owner, double lr) {
    ++t;
    const double bc1 = 1.0 - std::pow(beta1, double(t));
    const double bc2 = 1.0 - std::pow(beta2, double(t));
    owner.visit([&](const std::string& name, std::vector<float>& w, std::vector<float>& g,
                    std::vector<int>) {
      auto& mm = m[name];
      auto& vv = v[name];
      if (mm.size() != w.size()) mm.assign(w.size(), 0.0f);
      if (vv.size() != w.size()) vv.assign(w.size(), 0.0f);
      for (size_t i = 0; i < w.size(); ++i) {
        double gi = g[i];
        double mi = beta1 * mm[i] + (1.0 - beta1) * gi;
        double vi = beta2 * vv[i] + (1.0 - beta2) * gi * gi;
        mm[i] = float(mi);
        vv[i] = float(vi);
        w[i] -= float(lr * (mi / bc1) / (std::sqrt(vi / bc2) + eps));
      }
    });
  }
};

}  // namespace snic::train

#endif  // SNIC_TRAIN_ADAM_HPP_
