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

#include "snic/codec/codec.hpp"

#include <cmath>

#include "snic/codec/rans.hpp"
#include "snic/entropy/rate.hpp"
#include "snic/quant/quantize.hpp"

namespace snic::codec {

namespace {

void check_input(const Tensor<float>& padded, const model::CompressionModel<float>& m) {
  if (padded.c != 1) throw std::invalid_argument("codec: expected single-channel input");
  if (padded.h % 64 != 0 || padded.w % 64 != 0)
    throw std::invalid_argument("codec: input dims must be multiples of 64");
  if (m.cfg.num_slices != kNumSlicePayloads)
    throw std::invalid_argument("codec: container carries exactly 10 slice payloads");
}

// Per-channel tables for the hyper-latent under the factorized prior.
std::vector<CdfTable> build_prior_tables(const model::CompressionModel<float>& m) {
  std::vector<CdfTable> tables;
  tables.reserve(m.cfg.cz);
  for (int ch = 0; ch < m.cfg.cz; ++ch)
    tables.push_back(build_cdf_table(
        [&, ch](int n) { return m.prior.pmf(ch, double(n)); }, kSymbolMin, kSymbolMax));
  return tables;
}

// Quantizes one slice against its predicted mean: residuals are the coded
// symbols, y_hat = residual + mu is the decoded slice fed forward as
// conditioning context.
struct QuantizedSlice {
  std::vector<int> residuals;
  Tensor<float> y_hat;
};

QuantizedSlice quantize_slice(const Tensor<float>& y_slice,
                              const entropy::EntropyParams<float>& p) {
  QuantizedSlice q;
  q.residuals.reserve(y_slice.size());
  q.y_hat = Tensor<float>(y_slice.h, y_slice.w, y_slice.c);
  for (size_t e = 0; e < y_slice.size(); ++e) {
    float r = std::round(y_slice.v[e] - p.mu.v[e]);
    if (!std::isfinite(r)) throw std::invalid_argument("codec: non-finite latent");
    q.residuals.push_back(static_cast<int>(r));
    q.y_hat.v[e] = r + p.mu.v[e];
  }
  return q;
}

}  // namespace

CompressResult compress_image(const Tensor<float>& padded, int orig_w, int orig_h,
                              const model::CompressionModel<float>& m,
                              uint8_t lambda_index) {
  check_input(padded, m);
  if (orig_w <= 0 || orig_h <= 0 || orig_w > padded.w || orig_h > padded.h)
    throw std::invalid_argument("codec: original dims out of range");

  Tensor<float> y = m.ga.forward(padded);
  Tensor<float> z = m.ha.forward(y);
  Tensor<float> z_hat = quant::quantize_round(z);
  Tensor<float> hf = m.hs.forward(z_hat);

  Container c;
  c.model_id = m.cfg.model_id();
  c.lambda_index = lambda_index;
  c.orig_w = static_cast<uint32_t>(orig_w);
  c.orig_h = static_cast<uint32_t>(orig_h);

  double est_bits = 0.0;

  std::vector<CdfTable> prior_tables = build_prior_tables(m);
  {
    RansEncoder enc;
    for (int yy = 0; yy < z_hat.h; ++yy)
      for (int xx = 0; xx < z_hat.w; ++xx)
        for (int ch = 0; ch < z_hat.c; ++ch) {
          int s = static_cast<int>(z_hat.at(yy, xx, ch));
          enc.put_symbol(s, prior_tables[ch]);
          est_bits += -std::log2(m.prior.pmf(ch, double(s)));
        }
    c.z_payload = enc.finish();
  }

  GaussianTableCache cache;
  std::vector<Tensor<float>> decoded;
  decoded.reserve(m.cfg.num_slices);
  for (int i = 0; i < m.cfg.num_slices; ++i) {
    entropy::EntropyParams<float> p = m.predict_slice_params(hf, decoded, i);
    Tensor<float> ys = slice_channels(y, m.scheme.begin(i), m.scheme.end(i));
    QuantizedSlice q = quantize_slice(ys, p);
    RansEncoder enc;
    for (size_t e = 0; e < q.residuals.size(); ++e) {
      double sigma = double(p.sigma.v[e]);
      enc.put_symbol(q.residuals[e], cache.get(sigma_bin_index(sigma)));
      est_bits += entropy::gaussian_bits(double(q.residuals[e]), sigma);
    }
    c.slice_payloads[i] = enc.finish();
    decoded.push_back(std::move(q.y_hat));
  }

  CompressResult out;
  out.bytes = serialize_container(c);
  out.bpp = 8.0 * double(out.bytes.size()) / (double(orig_w) * double(orig_h));
  out.est_bits = est_bits;
  return out;
}

Tensor<float> decompress_image(const std::vector<uint8_t>& bytes,
                               const model::CompressionModel<float>& m) {
  Container c = parse_container(bytes);
  if (c.model_id != m.cfg.model_id())
    throw ModelMismatchError("container model_id does not match checkpoint");
  if (m.cfg.num_slices != kNumSlicePayloads)
    throw std::invalid_argument("codec: container carries exactly 10 slice payloads");
  const int pw = (int(c.orig_w) + 63) / 64 * 64;
  const int ph = (int(c.orig_h) + 63) / 64 * 64;
  const int lh = ph / 16, lw = pw / 16;
  const int zh = ph / 64, zw = pw / 64;

  std::vector<CdfTable> prior_tables = build_prior_tables(m);
  Tensor<float> z_hat(zh, zw, m.cfg.cz);
  {
    RansDecoder dec(c.z_payload);
    for (int yy = 0; yy < zh; ++yy)
      for (int xx = 0; xx < zw; ++xx)
        for (int ch = 0; ch < m.cfg.cz; ++ch)
          z_hat.at(yy, xx, ch) = static_cast<float>(dec.get_symbol(prior_tables[ch]));
  }
  Tensor<float> hf = m.hs.forward(z_hat);

  GaussianTableCache cache;
  std::vector<Tensor<float>> decoded;
  decoded.reserve(m.cfg.num_slices);
  const int sc = m.scheme.slice_channels;
  for (int i = 0; i < m.cfg.num_slices; ++i) {
    entropy::EntropyParams<float> p = m.predict_slice_params(hf, decoded, i);
    Tensor<float> y_hat(lh, lw, sc);
    RansDecoder dec(c.slice_payloads[i]);
    for (size_t e = 0; e < y_hat.size(); ++e) {
      double sigma = double(p.sigma.v[e]);
      int r = dec.get_symbol(cache.get(sigma_bin_index(sigma)));
      y_hat.v[e] = static_cast<float>(r) + p.mu.v[e];
    }
    decoded.push_back(std::move(y_hat));
  }

  std::vector<const Tensor<float>*> parts;
  for (const auto& d : decoded) parts.push_back(&d);
  Tensor<float> y_full = concat_channels(parts);
  Tensor<float> recon = m.gs.forward(y_full);
  return nn::crop(recon, int(c.orig_h), int(c.orig_w));
}

Tensor<float> simulate_roundtrip(const Tensor<float>& padded,
                                 const model::CompressionModel<float>& m) {
  check_input(padded, m);
  Tensor<float> y = m.ga.forward(padded);
  Tensor<float> z_hat = quant::quantize_round(m.ha.forward(y));
  Tensor<float> hf = m.hs.forward(z_hat);
  std::vector<Tensor<float>> decoded;
  for (int i = 0; i < m.cfg.num_slices; ++i) {
    entropy::EntropyParams<float> p = m.predict_slice_params(hf, decoded, i);
    Tensor<float> ys = slice_channels(y, m.scheme.begin(i), m.scheme.end(i));
    decoded.push_back(quantize_slice(ys, p).y_hat);
  }
  std::vector<const Tensor<float>*> parts;
  for (const auto& d : decoded) parts.push_back(&d);
  return m.gs.forward(concat_channels(parts));
}

ContainerInfo peek_container(const std::vector<uint8_t>& bytes) {
  Container c = parse_container(bytes);
  return ContainerInfo{c.version, c.model_id, c.lambda_index, c.orig_w, c.orig_h};
}

}  // namespace snic::codec
