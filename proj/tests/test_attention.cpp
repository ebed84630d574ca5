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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snic/attention/residual_attention.hpp"
#include "testutil.hpp"

using namespace snic;
using attention::ResidualAttention;
using attention::Wcbam;
using attention::Wnlam;

namespace {

template <typename Module, typename Trace>
double attn_grad_check(Module& mod, Tensor<double>& x, Rng& rng, int npoints) {
  Trace tr;
  Tensor<double> probe = mod.forward_cached(x, tr);
  Tensor<double> gout(probe.h, probe.w, probe.c);
  for (auto& v : gout.v) v = rng.uniform(-1, 1);
  auto objective = [&]() {
    Tensor<double> y = mod.forward(x);
    double s = 0;
    for (size_t i = 0; i < y.size(); ++i) s += y.v[i] * gout.v[i];
    return s;
  };
  mod.zero_grad();
  Trace tr2;
  mod.forward_cached(x, tr2);
  Tensor<double> gx = mod.backward(tr2, gout);
  std::vector<double*> coords;
  std::vector<double> analytic;
  for (size_t i = 0; i < x.size(); ++i) {
    coords.push_back(&x.v[i]);
    analytic.push_back(gx.v[i]);
  }
  mod.visit("p", [&](const std::string&, std::vector<double>& w, std::vector<double>& g,
                     std::vector<int>) {
    for (size_t i = 0; i < w.size(); i += 5) {
      coords.push_back(&w[i]);
      analytic.push_back(g[i]);
    }
  });
  return testutil::check_gradient(objective, coords, analytic, rng, npoints).worst_rel;
}

}  // namespace

TEST_CASE("wnlam with identical window content averages to g(p)") {
  // all positions in a window identical -> softmax uniform -> q = g(p)
  Wnlam<double> nl(3, 4);
  Rng rng(1);
  nl.init(rng);
  Tensor<double> x(4, 4, 3);
  for (int y = 0; y < 4; ++y)
    for (int xx = 0; xx < 4; ++xx)
      for (int c = 0; c < 3; ++c) x.at(y, xx, c) = 0.3 * (c + 1);
  Tensor<double> out = nl.forward(x);
  // manual: r = W_r g(p) + p with g = x W_g + b_g
  Tensor<double> g = nl.g.forward(x);
  Tensor<double> rq = nl.r.forward(g);
  for (size_t i = 0; i < out.size(); ++i)
    CHECK(out.v[i] == doctest::Approx(rq.v[i] + x.v[i]).epsilon(1e-10));
}

TEST_CASE("wnlam window of one is self-only attention") {
  Wnlam<double> nl(2, 1);
  Rng rng(2);
  nl.init(rng);
  Tensor<double> x = testutil::random_tensor(3, 5, 2, rng);
  Tensor<double> out = nl.forward(x);
  Tensor<double> g = nl.g.forward(x);
  Tensor<double> rq = nl.r.forward(g);
  for (size_t i = 0; i < out.size(); ++i)
    CHECK(out.v[i] == doctest::Approx(rq.v[i] + x.v[i]).epsilon(1e-10));
}

TEST_CASE("wnlam hand example: two positions, identity embeddings") {
  // 1 channel, identity theta/phi/g, window covering values (1, 0):
  // weights for the '1' query are softmax(1, 0); q = e/(e+1)
  Wnlam<double> nl(1, 2);
  nl.theta.init_identity();
  nl.phi.init_identity();
  nl.g.init_identity();
  nl.r.init_identity();
  Tensor<double> x(2, 2, 1);
  x.v = {1.0, 0.0, 0.0, 0.0};
  typename Wnlam<double>::Trace tr;
  nl.forward_cached(x, tr);
  const int N = 4;
  // row of the query at (0,0): scores are x0*xj = (1,0,0,0)
  double w0 = tr.attn[0];  // weight on itself
  double expect = std::exp(1.0) / (std::exp(1.0) + 3.0);
  CHECK(w0 == doctest::Approx(expect).epsilon(1e-12));
  // two-position check from the stated example: softmax(1,0) ~= (0.731, 0.269)
  double pair = std::exp(1.0) / (std::exp(1.0) + 1.0);
  CHECK(pair == doctest::Approx(0.731).epsilon(1e-3));
  // attention rows are normalized
  for (int i = 0; i < N; ++i) {
    double sum = 0;
    for (int j = 0; j < N; ++j) {
      CHECK(tr.attn[i * N + j] >= 0.0);
      sum += tr.attn[i * N + j];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("wnlam attention weights are normalized on random inputs") {
  Wnlam<double> nl(4, 4);
  Rng rng(3);
  nl.init(rng);
  Tensor<double> x = testutil::random_tensor(8, 8, 4, rng);
  typename Wnlam<double>::Trace tr;
  nl.forward_cached(x, tr);
  const int N = 16;
  const int windows = 4;
  for (int w = 0; w < windows; ++w)
    for (int i = 0; i < N; ++i) {
      double sum = 0;
      for (int j = 0; j < N; ++j) sum += tr.attn[(size_t(w) * N + i) * N + j];
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("wnlam windows are independent") {
  Wnlam<float> nl(3, 4);
  Rng rng(4);
  nl.init(rng);
  Tensor<float> x = testutil::random_tensor_f(8, 8, 3, rng);
  Tensor<float> base = nl.forward(x);
  // perturb one window; all other windows' outputs must be bit-identical
  Tensor<float> x2 = x;
  for (int y = 0; y < 4; ++y)
    for (int xx = 0; xx < 4; ++xx)
      for (int c = 0; c < 3; ++c) x2.at(y, xx, c) += 0.37f * (1 + c);
  Tensor<float> out2 = nl.forward(x2);
  for (int y = 0; y < 8; ++y)
    for (int xx = 0; xx < 8; ++xx) {
      if (y < 4 && xx < 4) continue;
      for (int c = 0; c < 3; ++c) CHECK(out2.at(y, xx, c) == base.at(y, xx, c));
    }
}

TEST_CASE("wnlam and wcbam preserve shape") {
  Rng rng(5);
  for (auto [h, w] : {std::pair{6, 7}, std::pair{8, 8}, std::pair{9, 13}}) {
    Wnlam<float> nl(5, 4);
    nl.init(rng);
    Wcbam<float> cb(5, 4, 4);
    cb.init(rng);
    Tensor<float> x = testutil::random_tensor_f(h, w, 5, rng);
    Tensor<float> a = nl.forward(x);
    Tensor<float> b = cb.forward(x);
    CHECK(a.same_shape(x));
    CHECK(b.same_shape(x));
  }
}

TEST_CASE("wcbam zero nets gate everything at one quarter") {
  // F == 0 and SA conv == 0 -> sigmoid(0) = 0.5 twice -> X/4
  Wcbam<double> cb(4, 4, 2);
  Rng rng(6);
  Tensor<double> x = testutil::random_tensor(8, 8, 4, rng);
  Tensor<double> out = cb.forward(x);
  for (size_t i = 0; i < x.size(); ++i)
    CHECK(out.v[i] == doctest::Approx(x.v[i] / 4.0).epsilon(1e-12));
}

TEST_CASE("wcbam output magnitude never exceeds the input") {
  Wcbam<double> cb(6, 4, 4);
  Rng rng(7);
  cb.init(rng);
  Tensor<double> x = testutil::random_tensor(8, 12, 6, rng, 2.0);
  Tensor<double> out = cb.forward(x);
  for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(out.v[i]) <= std::abs(x.v[i]) + 1e-15);
}

TEST_CASE("residual attention composition: x + trunk .* gate") {
  Rng rng(8);
  ResidualAttention<double> ra(3, 4, 2);
  ra.init(rng);
  Tensor<double> x = testutil::random_tensor(8, 8, 3, rng);
  typename ResidualAttention<double>::Trace tr;
  Tensor<double> out = ra.forward_cached(x, tr);
  for (size_t i = 0; i < x.size(); ++i) {
    CHECK(out.v[i] ==
          doctest::Approx(x.v[i] + tr.trunk.v[i] * tr.gate.v[i]).epsilon(1e-12));
    CHECK(tr.gate.v[i] > 0.0);
    CHECK(tr.gate.v[i] < 1.0);
  }
}

TEST_CASE("residual attention degenerates to a pure skip when the gate saturates") {
  Rng rng(18);
  ResidualAttention<double> ra(3, 4, 2);
  ra.init(rng);
  // drive the mask's closing 1x1 conv to "-inf": sigmoid gate -> 0
  ra.mix.w.assign(ra.mix.w.size(), 0.0);
  ra.mix.b.assign(ra.mix.b.size(), -40.0);
  Tensor<double> x = testutil::random_tensor(8, 8, 3, rng);
  Tensor<double> out = ra.forward(x);
  for (size_t i = 0; i < x.size(); ++i)
    CHECK(out.v[i] == doctest::Approx(x.v[i]).epsilon(1e-12));
}

TEST_CASE("attention gradients match finite differences") {
  Rng rng(9);
  {
    Wnlam<double> nl(4, 4);
    nl.init(rng);
    Tensor<double> x = testutil::random_tensor(6, 7, 4, rng);  // exercises padding
    CHECK((attn_grad_check<Wnlam<double>, typename Wnlam<double>::Trace>(nl, x, rng, 120)) <=
          1e-4);
  }
  {
    Wcbam<double> cb(6, 4, 4);
    cb.init(rng);
    Tensor<double> x = testutil::random_tensor(6, 7, 6, rng);
    CHECK((attn_grad_check<Wcbam<double>, typename Wcbam<double>::Trace>(cb, x, rng, 120)) <=
          1e-4);
  }
  {
    ResidualAttention<double> ra(4, 4, 2);
    ra.init(rng);
    Tensor<double> x = testutil::random_tensor(8, 8, 4, rng);
    CHECK((attn_grad_check<ResidualAttention<double>,
                           typename ResidualAttention<double>::Trace>(ra, x, rng, 120)) <=
          1e-4);
  }
}
