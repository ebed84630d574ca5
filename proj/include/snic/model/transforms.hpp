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

#ifndef SNIC_MODEL_TRANSFORMS_HPP_
#define SNIC_MODEL_TRANSFORMS_HPP_

#include <string>
#include <vector>

#include "snic/attention/residual_attention.hpp"
#include "snic/entropy/factorized_prior.hpp"
#include "snic/entropy/slice_model.hpp"
#include "snic/model/config.hpp"
#include "snic/nn/conv.hpp"
#include "snic/nn/gdn.hpp"
#include "snic/nn/ops.hpp"

namespace snic::model {

using snic::Tensor;

// Analysis transform: four stride-2 stages with divisive normalization,
// attention after stages 2 and 4. Input pixels in [0, 255] are scaled to
// [0, 1] on entry. Output is the (h/16, w/16, m) latent.
template <typename T>
struct AnalysisTransform {
  nn::Conv2d<T> c0, c1, c2, c3;
  nn::GdnLayer<T> g0, g1, g2;
  attention::ResidualAttention<T> attn_a, attn_b;

  AnalysisTransform() = default;
  explicit AnalysisTransform(const ModelConfig& cfg)
      : c0(1, cfg.n, 5, 2, 2), c1(cfg.n, cfg.n, 5, 2, 2), c2(cfg.n, cfg.n, 5, 2, 2),
        c3(cfg.n, cfg.m, 5, 2, 2),
        g0(cfg.n, false), g1(cfg.n, false), g2(cfg.n, false),
        attn_a(cfg.n, cfg.window, cfg.ca_reduction),
        attn_b(cfg.m, cfg.window, cfg.ca_reduction) {}

  void init(Rng& rng) {
    c0.init_he(rng);
    c1.init_he(rng);
    c2.init_he(rng);
    c3.init_he(rng);
    attn_a.init(rng);
    attn_b.init(rng);
  }

  struct Trace {
    Tensor<T> xs, a0, n0, a1, n1, at_a, a2, n2, a3;
    typename attention::ResidualAttention<T>::Trace ta, tb;
  };

  static Tensor<T> scale_in(const Tensor<T>& x) {
    Tensor<T> xs = x;
    for (auto& v : xs.v) v *= T(1.0 / 255.0);
    return xs;
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    Tensor<T> t = g0.forward(c0.forward(scale_in(x)));
    t = attn_a.forward(g1.forward(c1.forward(t)));
    t = g2.forward(c2.forward(t));
    return attn_b.forward(c3.forward(t));
  }

  Tensor<T> forward_cached(const Tensor<T>& x, Trace& tr) {
    tr.xs = scale_in(x);
    tr.a0 = c0.forward(tr.xs);
    tr.n0 = g0.forward(tr.a0);
    tr.a1 = c1.forward(tr.n0);
    tr.n1 = g1.forward(tr.a1);
    tr.at_a = attn_a.forward_cached(tr.n1, tr.ta);
    tr.a2 = c2.forward(tr.at_a);
    tr.n2 = g2.forward(tr.a2);
    tr.a3 = c3.forward(tr.n2);
    return attn_b.forward_cached(tr.a3, tr.tb);
  }

  Tensor<T> backward(const Trace& tr, const Tensor<T>& gout) {
    Tensor<T> g = attn_b.backward(tr.tb, gout);
    g = c3.backward(tr.n2, g);
    g = g2.backward(tr.a2, g);
    g = c2.backward(tr.at_a, g);
    g = attn_a.backward(tr.ta, g);
    g = g1.backward(tr.a1, g);
    g = c1.backward(tr.n0, g);
    g = g0.backward(tr.a0, g);
    g = c0.backward(tr.xs, g);
    for (auto& v : g.v) v *= T(1.0 / 255.0);
    return g;
  }

  void zero_grad() {
    c0.zero_grad(); c1.zero_grad(); c2.zero_grad(); c3.zero_grad();
    g0.zero_grad(); g1.zero_grad(); g2.zero_grad();
    attn_a.zero_grad(); attn_b.zero_grad();
  }

  template <typename F>
  void visit(const std::string& p, F&& f) {
    c0.visit(p + ".c0", f); g0.visit(p + ".g0", f);
    c1.visit(p + ".c1", f); g1.visit(p + ".g1", f);
    attn_a.visit(p + ".attn_a", f);
    c2.visit(p + ".c2", f); g2.visit(p + ".g2", f);
    c3.visit(p + ".c3", f);
    attn_b.visit(p + ".attn_b", f);
  }
};

// Synthesis transform mirroring the analysis stages with transposed
// convolutions and inverse normalization; final activation clamps the
// pixel-domain output to [0, 255].
template <typename T>
struct SynthesisTransform {
  attention::ResidualAttention<T> attn_b, attn_a;
  nn::ConvTranspose2d<T> t0, t1, t2, t3;
  nn::GdnLayer<T> ig0, ig1, ig2;

  SynthesisTransform() = default;
  explicit SynthesisTransform(const ModelConfig& cfg)
      : attn_b(cfg.m, cfg.window, cfg.ca_reduction),
        attn_a(cfg.n, cfg.window, cfg.ca_reduction),
        t0(cfg.m, cfg.n, 5, 2, 2, 1), t1(cfg.n, cfg.n, 5, 2, 2, 1),
        t2(cfg.n, cfg.n, 5, 2, 2, 1), t3(cfg.n, 1, 5, 2, 2, 1),
        ig0(cfg.n, true), ig1(cfg.n, true), ig2(cfg.n, true) {}

  void init(Rng& rng) {
    attn_b.init(rng);
    attn_a.init(rng);
    t0.init_he(rng);
    t1.init_he(rng);
    t2.init_he(rng);
    t3.init_he(rng);
  }

  struct Trace {
    Tensor<T> at_b, a0, n0, a1, n1, at_a, a2, n2, raw;
    typename attention::ResidualAttention<T>::Trace tb, ta;
    Tensor<T> y_in;
  };

  static Tensor<T> scale_out(const Tensor<T>& v) {
    Tensor<T> out = v;
    for (auto& x : out.v) {
      T p = x * T(255);
      x = p < T(0) ? T(0) : (p > T(255) ? T(255) : p);
    }
    return out;
  }

  Tensor<T> forward(const Tensor<T>& y) const {
    Tensor<T> t = ig0.forward(t0.forward(attn_b.forward(y)));
    t = attn_a.forward(ig1.forward(t1.forward(t)));
    t = ig2.forward(t2.forward(t));
    return scale_out(t3.forward(t));
  }

  Tensor<T> forward_cached(const Tensor<T>& y, Trace& tr) {
    tr.y_in = y;
    tr.at_b = attn_b.forward_cached(y, tr.tb);
    tr.a0 = t0.forward(tr.at_b);
    tr.n0 = ig0.forward(tr.a0);
    tr.a1 = t1.forward(tr.n0);
    tr.n1 = ig1.forward(tr.a1);
    tr.at_a = attn_a.forward_cached(tr.n1, tr.ta);
    tr.a2 = t2.forward(tr.at_a);
    tr.n2 = ig2.forward(tr.a2);
    tr.raw = t3.forward(tr.n2);
    return scale_out(tr.raw);
  }

  Tensor<T> backward(const Trace& tr, const Tensor<T>& gout) {
    Tensor<T> g = gout;
    for (size_t i = 0; i < g.size(); ++i) {
      T p = tr.raw.v[i] * T(255);
      g.v[i] = (p >= T(0) && p <= T(255)) ? g.v[i] * T(255) : T(0);
    }
    g = t3.backward(tr.n2, g);
    g = ig2.backward(tr.a2, g);
    g = t2.backward(tr.at_a, g);
    g = attn_a.backward(tr.ta, g);
    g = ig1.backward(tr.a1, g);
    g = t1.backward(tr.n0, g);
    g = ig0.backward(tr.a0, g);
    g = t0.backward(tr.at_b, g);
    return attn_b.backward(tr.tb, g);
  }

  void zero_grad() {
    attn_b.zero_grad(); attn_a.zero_grad();
    t0.zero_grad(); t1.zero_grad(); t2.zero_grad(); t3.zero_grad();
    ig0.zero_grad(); ig1.zero_grad(); ig2.zero_grad();
  }

  template <typename F>
  void visit(const std::string& p, F&& f) {
    attn_b.visit(p + ".attn_b", f);
    t0.visit(p + ".t0", f); ig0.visit(p + ".ig0", f);
    t1.visit(p + ".t1", f); ig1.visit(p + ".ig1", f);
    attn_a.visit(p + ".attn_a", f);
    t2.visit(p + ".t2", f); ig2.visit(p + ".ig2", f);
    t3.visit(p + ".t3", f);
  }
};

// Hyper analysis: 4x spatial reduction of the latent into the hyper-latent.
template <typename T>
struct HyperAnalysis {
  nn::Conv2d<T> c0, c1, c2;

  HyperAnalysis() = default;
  explicit HyperAnalysis(const ModelConfig& cfg)
      : c0(cfg.m, cfg.cz, 3, 1, 1), c1(cfg.cz, cfg.cz, 5, 2, 2), c2(cfg.cz, cfg.cz, 5, 2, 2) {}

  void init(Rng& rng) {
    c0.init_he(rng);
    c1.init_he(rng);
    c2.init_he(rng);
  }

  struct Trace {
    Tensor<T> y, z0, h0, z1, h1;
  };

  Tensor<T> forward(const Tensor<T>& y) const {
    return c2.forward(nn::relu(c1.forward(nn::relu(c0.forward(y)))));
  }

  Tensor<T> forward_cached(const Tensor<T>& y, Trace& tr) {
    tr.y = y;
    tr.z0 = c0.forward(y);
    tr.h0 = nn::relu(tr.z0);
    tr.z1 = c1.forward(tr.h0);
    tr.h1 = nn::relu(tr.z1);
    return c2.forward(tr.h1);
  }

  Tensor<T> backward(const Trace& tr, const Tensor<T>& gout) {
    Tensor<T> g = c2.backward(tr.h1, gout);
    g = nn::relu_backward(tr.z1, g);
    g = c1.backward(tr.h0, g);
    g = nn::relu_backward(tr.z0, g);
    return c0.backward(tr.y, g);
  }

  void zero_grad() {
    c0.zero_grad();
    c1.zero_grad();
    c2.zero_grad();
  }

  template <typename F>
  void visit(const std::string& p, F&& f) {
    c0.visit(p + ".c0", f);
    c1.visit(p + ".c1", f);
    c2.visit(p + ".c2", f);
  }
};

// Hyper synthesis: upsamples the (decoded) hyper-latent back to latent
// resolution and emits the feature stack the slice predictors consume.
template <typename T>
struct HyperSynthesis {
  nn::ConvTranspose2d<T> t0, t1;
  nn::Conv2d<T> c2;

  HyperSynthesis() = default;
  explicit HyperSynthesis(const ModelConfig& cfg)
      : t0(cfg.cz, cfg.cz, 5, 2, 2, 1), t1(cfg.cz, cfg.hyper_mid_c(), 5, 2, 2, 1),
        c2(cfg.hyper_mid_c(), cfg.hyper_feature_c(), 3, 1, 1) {}

  void init(Rng& rng) {
    t0.init_he(rng);
    t1.init_he(rng);
    c2.init_he(rng);
  }

  struct Trace {
    Tensor<T> z, z0, h0, z1, h1;
  };

  Tensor<T> forward(const Tensor<T>& z) const {
    return c2.forward(nn::relu(t1.forward(nn::relu(t0.forward(z)))));
  }

  Tensor<T> forward_cached(const Tensor<T>& z, Trace& tr) {
    tr.z = z;
    tr.z0 = t0.forward(z);
    tr.h0 = nn::relu(tr.z0);
    tr.z1 = t1.forward(tr.h0);
    tr.h1 = nn::relu(tr.z1);
    return c2.forward(tr.h1);
  }

  Tensor<T> backward(const Trace& tr, const Tensor<T>& gout) {
    Tensor<T> g = c2.backward(tr.h1, gout);
    g = nn::relu_backward(tr.z1, g);
    g = t1.backward(tr.h0, g);
    g = nn::relu_backward(tr.z0, g);
    return t0.backward(tr.z, g);
  }

  void zero_grad() {
    t0.zero_grad();
    t1.zero_grad();
    c2.zero_grad();
  }

  template <typename F>
  void visit(const std::string& p, F&& f) {
    t0.visit(p + ".t0", f);
    t1.visit(p + ".t1", f);
    c2.visit(p + ".c2", f);
  }
};

// The complete trainable codec model.
template <typename T>
struct CompressionModel {
  ModelConfig cfg;
  entropy::SliceScheme scheme;
  AnalysisTransform<T> ga;
  SynthesisTransform<T> gs;
  HyperAnalysis<T> ha;
  HyperSynthesis<T> hs;
  entropy::FactorizedPrior<T> prior;
  std::vector<entropy::SlicePredictor<T>> slices;

  CompressionModel() = default;
  explicit CompressionModel(const ModelConfig& cfg_)
      : cfg(cfg_), scheme(entropy::SliceScheme::equal_partition(cfg_.m, cfg_.num_slices)),
        ga(cfg_), gs(cfg_), ha(cfg_), hs(cfg_), prior(cfg_.cz) {
    cfg.validate();
    slices.reserve(cfg.num_slices);
    for (int i = 0; i < cfg.num_slices; ++i)
      slices.emplace_back(i, cfg.hyper_feature_c(), scheme.slice_channels);
  }

  void init(uint64_t seed) {
    Rng rng(Rng::mix(seed, 0x5eedfacec0dec0deull));
    ga.init(rng);
    gs.init(rng);
    ha.init(rng);
    hs.init(rng);
    prior.init(rng);
    for (auto& s : slices) s.init(rng);
  }

  // Entropy parameters for slice `i` from hyper features and the decoded
  // slices 0..i-1 only; later slices cannot influence the result.
  entropy::EntropyParams<T> predict_slice_params(const Tensor<T>& hyper_features,
                                                 const std::vector<Tensor<T>>& decoded,
                                                 int i) const {
    if (static_cast<int>(decoded.size()) < i)
      throw std::invalid_argument("predict_slice_params: missing earlier slices");
    std::vector<const Tensor<T>*> parts{&hyper_features};
    for (int j = 0; j < i; ++j) parts.push_back(&decoded[j]);
    Tensor<T> in = concat_channels(parts);
    return slices[i].forward(in);
  }

  void zero_grad() {
    ga.zero_grad();
    gs.zero_grad();
    ha.zero_grad();
    hs.zero_grad();
    prior.zero_grad();
    for (auto& s : slices) s.zero_grad();
  }

  template <typename F>
  void visit(F&& f) {
    ga.visit("ga", f);
    gs.visit("gs", f);
    ha.visit("ha", f);
    hs.visit("hs", f);
    prior.visit("prior", f);
    for (size_t i = 0; i < slices.size(); ++i)
      slices[i].visit("slice" + std::to_string(i), f);
  }
};

}  // namespace snic::model

#endif  // SNIC_MODEL_TRANSFORMS_HPP_
