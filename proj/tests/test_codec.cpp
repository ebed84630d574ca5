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

#include "snic/codec/codec.hpp"
#include "snic/data/synthetic.hpp"
#include "snic/nn/ops.hpp"
#include "testutil.hpp"

using namespace snic;
using namespace snic::codec;

namespace {

model::CompressionModel<float>& shared_model() {
  static model::CompressionModel<float> m(model::ModelConfig::preset("micro"));
  static bool done = false;
  if (!done) {
    m.init(42);
    done = true;
  }
  return m;
}

Tensor<float> test_image(int h, int w, uint64_t seed) {
  return data::make_training_patch(h, w, seed);
}

}  // namespace

TEST_CASE("container serialization round trips and self-validates") {
  Container c;
  c.model_id = 77;
  c.lambda_index = 3;
  c.orig_w = 321;
  c.orig_h = 123;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) c.z_payload.push_back(uint8_t(rng.uniform_int(256)));
  for (int s = 0; s < kNumSlicePayloads; ++s)
    for (int i = 0; i <= s; ++i) c.slice_payloads[s].push_back(uint8_t(rng.uniform_int(256)));
  std::vector<uint8_t> bytes = serialize_container(c);
  CHECK(bytes.size() == c.total_bytes());
  CHECK(bytes.size() == kHeaderBytes + 100 + 55);

  Container back = parse_container(bytes);
  CHECK(back.model_id == 77);
  CHECK(back.lambda_index == 3);
  CHECK(back.orig_w == 321);
  CHECK(back.orig_h == 123);
  CHECK(back.z_payload == c.z_payload);
  for (int s = 0; s < kNumSlicePayloads; ++s)
    CHECK(back.slice_payloads[s] == c.slice_payloads[s]);

  SUBCASE("single-bit payload corruption is caught by the CRC") {
    for (size_t pos : {size_t(kHeaderBytes), size_t(kHeaderBytes + 57), bytes.size() - 1}) {
      std::vector<uint8_t> bad = bytes;
      bad[pos] ^= 0x10;
      CHECK_THROWS_AS(parse_container(bad), IntegrityError);
    }
  }
  SUBCASE("bad magic and version are refused") {
    std::vector<uint8_t> bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(parse_container(bad), IntegrityError);
    bad = bytes;
    bad[4] = 9;
    CHECK_THROWS_AS(parse_container(bad), IntegrityError);
  }
  SUBCASE("truncated container is refused") {
    std::vector<uint8_t> bad(bytes.begin(), bytes.end() - 3);
    CHECK_THROWS_AS(parse_container(bad), IntegrityError);
  }
}

TEST_CASE("compress/decompress equals the local quantized reconstruction bit-exactly") {
  auto& m = shared_model();
  Tensor<float> img = test_image(70, 90, 7);
  Tensor<float> padded = nn::pad_replicate_to_multiple(img, 64);
  CompressResult cr = compress_image(padded, img.w, img.h, m, 2);
  CHECK(cr.bpp == doctest::Approx(8.0 * cr.bytes.size() / (70.0 * 90.0)));

  Tensor<float> recon = decompress_image(cr.bytes, m);
  CHECK(recon.h == 70);
  CHECK(recon.w == 90);
  Tensor<float> sim = nn::crop(simulate_roundtrip(padded, m), 70, 90);
  REQUIRE(recon.size() == sim.size());
  for (size_t i = 0; i < recon.size(); ++i) CHECK(recon.v[i] == sim.v[i]);

  ContainerInfo info = peek_container(cr.bytes);
  CHECK(info.lambda_index == 2);
  CHECK(info.model_id == m.cfg.model_id());
  CHECK(info.orig_w == 90);
  CHECK(info.orig_h == 70);
}

TEST_CASE("identical inputs give byte-identical bitstreams and reconstructions") {
  auto& m = shared_model();
  Tensor<float> img = test_image(64, 64, 9);
  CompressResult a = compress_image(img, 64, 64, m, 0);
  CompressResult b = compress_image(img, 64, 64, m, 0);
  CHECK(a.bytes == b.bytes);
  Tensor<float> ra = decompress_image(a.bytes, m);
  Tensor<float> rb = decompress_image(b.bytes, m);
  CHECK(ra.v == rb.v);
}

TEST_CASE("decoder refuses foreign checkpoints and corrupt payloads") {
  auto& m = shared_model();
  Tensor<float> img = test_image(64, 64, 11);
  CompressResult cr = compress_image(img, 64, 64, m, 0);

  model::CompressionModel<float> other(model::ModelConfig::preset("desk"));
  other.init(1);
  CHECK_THROWS_AS(decompress_image(cr.bytes, other), ModelMismatchError);

  std::vector<uint8_t> bad = cr.bytes;
  bad[bad.size() - 1] ^= 0x01;
  CHECK_THROWS_AS(decompress_image(bad, m), IntegrityError);
}

TEST_CASE("actual payload never exceeds the model estimate by more than overhead") {
  // the min-frequency floor can only make out-of-model symbols cheaper than
  // the model says, so the estimate upper-bounds the payload up to container
  // and renormalization overhead; the two-sided trained-model tolerance is
  // enforced in the acceptance suite
  auto& m = shared_model();
  Tensor<float> img = test_image(128, 128, 13);
  CompressResult cr = compress_image(img, 128, 128, m, 0);
  double actual_bits = 8.0 * double(cr.bytes.size());
  CHECK(cr.est_bits > 0.0);
  const double overhead_bits = 8.0 * (kHeaderBytes + 11 * 4) + 0.03 * (8 * 8 * 40 + 2 * 2 * 16);
  CHECK(actual_bits < cr.est_bits * 1.03 + overhead_bits);
  CHECK(actual_bits >= 8.0 * kHeaderBytes);
}

TEST_CASE("codec rejects bad input shapes") {
  auto& m = shared_model();
  Tensor<float> not_padded(100, 100, 1);
  CHECK_THROWS(compress_image(not_padded, 100, 100, m, 0));
  Tensor<float> padded(128, 128, 1);
  CHECK_THROWS(compress_image(padded, 200, 10, m, 0));  // orig dims out of range
}
