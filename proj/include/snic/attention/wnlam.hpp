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

#ifndef SNIC_ATTENTION_WNLAM_HPP_
#define SNIC_ATTENTION_WNLAM_HPP_

#include <vector>

#include "snic/nn/linear.hpp"
#include "snic/nn/ops.hpp"

namespace snic::attention {

using snic::Tensor;

// Window-based non-local attention. The feature map is partitioned into
// non-overlapping win x win windows (replicate-padded when not divisible);
// within each window, every position attends to every other:
//   q_i = sum_j softmax_j(theta(p_i) . phi(p_j)) g(p_j)
//   out_i = W_r q_i + p_i
// No interaction crosses a window boundary.
template <typename T>
struct Wnlam {
  int c = 0, win = 8;
  nn::Linear<T> theta, phi, g, r;

  Wnlam() = default;
  Wnlam(int c_, int win_) : c(c_), win(win_), theta(c_, c_), phi(c_, c_), g(c_, c_), r(c_, c_) {}

  void init(Rng& rng) {
    theta.init_he(rng);
    phi.init_he(rng);
    g.init_he(rng);
    r.init_he(rng);
  }

  struct Trace {
    Tensor<T> xp;                   // padded input
    Tensor<T> th, ph, gp, q;        // projections and attended values (padded dims)
    std::vector<T> attn;            // per window: n x n softmax weights
    int orig_h = 0, orig_w = 0;
  };

  int windows_y(int ph) const { return ph / win; }
  int n() const { return win * win; }

  void gather_window(const Tensor<T>& t, int wy, int wx, T* out) const {
    for (int y = 0; y < win; ++y) {
      const T* src = t.pos(wy * win + y, wx * win);
      std::copy(src, src + size_t(win) * c, out + size_t(y) * win * c);
    }
  }
  void scatter_window(const T* in, int wy, int wx, Tensor<T>& t) const {
    for (int y = 0; y < win; ++y) {
      T* dst = t.pos(wy * win + y, wx * win);
      std::copy(in + size_t(y) * win * c, in + size_t(y + 1) * win * c, dst);
    }
  }

  Tensor<T> forward_cached(const Tensor<T>& x, Trace& tr) const {
    tr.orig_h = x.h;
    tr.orig_w = x.w;
    tr.xp = nn::pad_replicate_to_multiple(x, win);
    const int ph = tr.xp.h, pw = tr.xp.w;
    tr.th = theta.forward(tr.xp);
    tr.ph = phi.forward(tr.xp);
    tr.gp = g.forward(tr.xp);
    tr.q = Tensor<T>(ph, pw, c);
    const int wy_n = ph / win, wx_n = pw / win, N = n();
    tr.attn.assign(size_t(wy_n) * wx_n * N * N, T(0));
    std::vector<T> tw(size_t(N) * c), pw_buf(size_t(N) * c), gw(size_t(N) * c), qw(size_t(N) * c);
    std::vector<T> s(size_t(N) * N);
    for (int wy = 0; wy < wy_n; ++wy)
      for (int wx = 0; wx < wx_n; ++wx) {
        gather_window(tr.th, wy, wx, tw.data());
        gather_window(tr.ph, wy, wx, pw_buf.data());
        gather_window(tr.gp, wy, wx, gw.data());
        nn::CMapRM<T> TH(tw.data(), N, c), PH(pw_buf.data(), N, c), G(gw.data(), N, c);
        nn::MapRM<T> S(s.data(), N, N);
        S.noalias() = TH * PH.transpose();
        // row softmax, max-subtracted
        for (int i = 0; i < N; ++i) {
          T m = S(i, 0);
          for (int j = 1; j < N; ++j) m = std::max(m, S(i, j));
          T sum = T(0);
          for (int j = 0; j < N; ++j) {
            T e = std::exp(S(i, j) - m);
            S(i, j) = e;
            sum += e;
          }
          for (int j = 0; j < N; ++j) S(i, j) /= sum;
        }
        std::copy(s.begin(), s.end(),
                  tr.attn.begin() + (size_t(wy) * wx_n + wx) * N * N);
        nn::MapRM<T> Q(qw.data(), N, c);
        Q.noalias() = S * G;
        scatter_window(qw.data(), wy, wx, tr.q);
      }
    Tensor<T> out(ph, pw, c);
    r.forward_rows(tr.q.v.data(), ph * pw, out.v.data());
    for (size_t i = 0; i < out.size(); ++i) out.v[i] += tr.xp.v[i];
    return nn::crop(out, x.h, x.w);
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    Trace tmp;
    return forward_cached(x, tmp);
  }

  Tensor<T> backward(const Trace& tr, const Tensor<T>& gout) {
    const int ph = tr.xp.h, pw = tr.xp.w, N = n();
    Tensor<T> gr = nn::zero_pad_to(gout, ph, pw);
    Tensor<T> gxp = gr;  // skip connection
    Tensor<T> gq(ph, pw, c);
    r.backward_rows(tr.q.v.data(), gr.v.data(), ph * pw, gq.v.data());
    Tensor<T> gth(ph, pw, c), gph(ph, pw, c), ggp(ph, pw, c);
    const int wy_n = ph / win, wx_n = pw / win;
    std::vector<T> tw(size_t(N) * c), pwb(size_t(N) * c), gw(size_t(N) * c);
    std::vector<T> gqw(size_t(N) * c), gs(size_t(N) * N);
    std::vector<T> gtw(size_t(N) * c), gpw(size_t(N) * c), ggw(size_t(N) * c);
    for (int wy = 0; wy < wy_n; ++wy)
      for (int wx = 0; wx < wx_n; ++wx) {
        gather_window(tr.th, wy, wx, tw.data());
        gather_window(tr.ph, wy, wx, pwb.data());
        gather_window(tr.gp, wy, wx, gw.data());
        gather_window(gq, wy, wx, gqw.data());
        const T* a = tr.attn.data() + (size_t(wy) * wx_n + wx) * N * N;
        nn::CMapRM<T> A(a, N, N), GQ(gqw.data(), N, c), G(gw.data(), N, c);
        nn::CMapRM<T> TH(tw.data(), N, c), PH(pwb.data(), N, c);
        // dA = GQ G^T ; dG = A^T GQ
        nn::MapRM<T> GS(gs.data(), N, N);
        GS.noalias() = GQ * G.transpose();
        nn::MapRM<T> GGW(ggw.data(), N, c);
        GGW.noalias() = A.transpose() * GQ;
        // softmax backward row-wise: gs_ij = a_ij (dA_ij - sum_k dA_ik a_ik)
        for (int i = 0; i < N; ++i) {
          T dot = T(0);
          for (int j = 0; j < N; ++j) dot += GS(i, j) * A(i, j);
          for (int j = 0; j < N; ++j) GS(i, j) = A(i, j) * (GS(i, j) - dot);
        }
        nn::MapRM<T> GTW(gtw.data(), N, c), GPW(gpw.data(), N, c);
        GTW.noalias() = GS * PH;
        GPW.noalias() = GS.transpose() * TH;
        scatter_window(gtw.data(), wy, wx, gth);
        scatter_window(gpw.data(), wy, wx, gph);
        scatter_window(ggw.data(), wy, wx, ggp);
      }
    theta.backward_rows(tr.xp.v.data(), gth.v.data(), ph * pw, gxp.v.data());
    phi.backward_rows(tr.xp.v.data(), gph.v.data(), ph * pw, gxp.v.data());
    g.backward_rows(tr.xp.v.data(), ggp.v.data(), ph * pw, gxp.v.data());
    return nn::pad_replicate_backward(gxp, tr.orig_h, tr.orig_w);
  }

  void zero_grad() {
    theta.zero_grad();
    phi.zero_grad();
    g.zero_grad();
    r.zero_grad();
  }

  template <typename F>
  void visit(const std::string& prefix, F&& f) {
    theta.visit(prefix + ".theta", f);
    phi.visit(prefix + ".phi", f);
    g.visit(prefix + ".g", f);
    r.visit(prefix + ".r", f);
  }
};

}  // namespace snic::attention

#endif  // SNIC_ATTENTION_WNLAM_HPP_
