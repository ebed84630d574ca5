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

#include <fstream>

#include "snic/data/dataset.hpp"
#include "snic/data/image_io.hpp"
#include "snic/data/preprocess.hpp"
#include "snic/data/synthetic.hpp"
#include "testutil.hpp"

using namespace snic;
using namespace snic::data;

namespace {

RawEuvImage raw_from_values(std::vector<float> vals, int h, int w) {
  RawEuvImage raw;
  raw.intensity = Tensor<float>(h, w, 1);
  raw.intensity.v = std::move(vals);
  return raw;
}

}  // namespace

TEST_CASE("preprocess maps the clip endpoints to the level endpoints") {
  RawEuvImage raw = raw_from_values({20.0f, 2500.0f, 10.0f, 9999.0f}, 2, 2);
  ImageTensor t = preprocess_euv(raw, 20, 2500);
  CHECK(t.t.v[0] == 0.0f);
  CHECK(t.t.v[1] == 255.0f);
  CHECK(t.t.v[2] == 0.0f);    // clipped up to 20
  CHECK(t.t.v[3] == 255.0f);  // clipped down to 2500
  CHECK(t.orig_h == 2);
  CHECK(t.orig_w == 2);
}

TEST_CASE("preprocess log midpoint lands on the mid level") {
  float geo_mid = std::sqrt(20.0f * 2500.0f);
  RawEuvImage raw = raw_from_values({geo_mid}, 1, 1);
  ImageTensor t = preprocess_euv(raw, 20, 2500);
  // exactly 127.5 before rounding; either neighbor is acceptable
  CHECK((t.t.v[0] == 127.0f || t.t.v[0] == 128.0f));
}

TEST_CASE("preprocess rejects nonpositive clip_lo and empty images") {
  RawEuvImage raw = raw_from_values({50.0f}, 1, 1);
  CHECK_THROWS_AS(preprocess_euv(raw, 0.0, 2500), InputError);
  CHECK_THROWS_AS(preprocess_euv(raw, -5.0, 2500), InputError);
  CHECK_THROWS_AS(preprocess_euv(raw, 100.0, 50.0), InputError);
  RawEuvImage empty;
  CHECK_THROWS_AS(preprocess_euv(empty, 20, 2500), InputError);
}

TEST_CASE("preprocess is monotone in intensity") {
  Rng rng(11);
  std::vector<float> vals(256);
  for (auto& v : vals) v = float(rng.uniform(1.0, 4000.0));
  std::sort(vals.begin(), vals.end());
  RawEuvImage raw = raw_from_values(vals, 16, 16);
  ImageTensor t = preprocess_euv(raw, 20, 2500);
  for (size_t i = 1; i < t.t.size(); ++i) CHECK(t.t.v[i] >= t.t.v[i - 1]);
  for (float v : t.t.v) {
    CHECK(v >= 0.0f);
    CHECK(v <= 255.0f);
  }
}

TEST_CASE("inverse_preprocess restores the endpoints and bounds the round trip") {
  ImageTensor t;
  t.t = Tensor<float>(1, 2, 1);
  t.t.v = {0.0f, 255.0f};
  t.orig_h = 1;
  t.orig_w = 2;
  Tensor<float> intensity = inverse_preprocess(t, 20, 2500);
  CHECK(intensity.v[0] == doctest::Approx(20.0).epsilon(1e-6));
  CHECK(intensity.v[1] == doctest::Approx(2500.0).epsilon(1e-6));

  // per-level quantization bound: |rt - clip| / clip <= 10^(step/2) - 1
  const double step = (std::log10(2500.0) - std::log10(20.0)) / 255.0;
  const double bound = std::pow(10.0, step / 2.0) - 1.0 + 1e-12;
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    double x = rng.uniform(20.0, 2500.0);
    RawEuvImage raw = raw_from_values({float(x)}, 1, 1);
    ImageTensor lvl = preprocess_euv(raw, 20, 2500);
    Tensor<float> rt = inverse_preprocess(lvl, 20, 2500);
    CHECK(std::abs(double(rt.v[0]) - x) / x <= bound);
  }

  ImageTensor bad;
  bad.t = Tensor<float>(1, 1, 1);
  bad.t.v = {256.0f};
  CHECK_THROWS_AS(inverse_preprocess(bad, 20, 2500), InputError);
}

TEST_CASE("pad_to_multiple geometry and interior preservation") {
  ImageTensor a;
  a.t = Tensor<float>(256, 256, 1);
  a.orig_h = 256;
  a.orig_w = 256;
  ImageTensor pa = pad_to_multiple(a, 64);
  CHECK(pa.t.h == 256);
  CHECK(pa.t.w == 256);

  Rng rng(3);
  ImageTensor b;
  b.t = testutil::random_tensor_f(100, 130, 1, rng, 40.0);
  b.orig_h = 100;
  b.orig_w = 130;
  ImageTensor pb = pad_to_multiple(b, 64);
  CHECK(pb.t.h == 128);
  CHECK(pb.t.w == 192);
  CHECK(pb.orig_h == 100);
  CHECK(pb.orig_w == 130);
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 130; ++x) CHECK(pb.t.at(y, x, 0) == b.t.at(y, x, 0));
  // replicated border
  CHECK(pb.t.at(120, 10, 0) == b.t.at(99, 10, 0));
  CHECK(pb.t.at(10, 150, 0) == b.t.at(10, 129, 0));

  ImageTensor c;
  c.t = Tensor<float>(4096, 4096, 1);
  c.orig_h = c.orig_w = 4096;
  ImageTensor pc = pad_to_multiple(c, 64);
  CHECK(pc.t.h == 4096);
  CHECK(pc.t.w == 4096);
}

TEST_CASE("split_by_month partitions deterministically") {
  std::vector<ManifestEntry> recs = {
      {"a.png", "2015-03-01T00:00:00"}, {"b.png", "2017-11-30T12:00:00"},
      {"c.png", "2016-08-31T23:59:59"}, {"d.png", "2018-09-01T00:00:00"},
      {"e.png", "2015-12-25T06:00:00"}, {"f.png", "2018-01-01T00:00:00"},
  };
  DatasetSplit s = split_by_month(recs);
  REQUIRE(s.train.size() == 3);
  REQUIRE(s.test.size() == 3);
  CHECK(s.train[0].path == "a.png");
  CHECK(s.test[0].path == "b.png");
  // disjoint and exhaustive
  CHECK(s.train.size() + s.test.size() == recs.size());

  CHECK(split_by_month({}).train.empty());
  CHECK(split_by_month({}).test.empty());

  std::vector<ManifestEntry> missing = {{"x.png", ""}};
  CHECK_THROWS_AS(split_by_month(missing), InputError);
}

TEST_CASE("sample_crops shapes, bounds and determinism") {
  Rng rng(5);
  std::vector<Tensor<float>> images;
  images.push_back(testutil::random_tensor_f(300, 280, 1, rng, 20.0));
  images.push_back(testutil::random_tensor_f(256, 256, 1, rng, 20.0));
  auto b1 = sample_crops(images, 256, 16, 42);
  REQUIRE(b1.size() == 16);
  for (const auto& t : b1) {
    CHECK(t.h == 256);
    CHECK(t.w == 256);
  }
  auto b2 = sample_crops(images, 256, 16, 42);
  for (size_t i = 0; i < b1.size(); ++i) CHECK(b1[i].v == b2[i].v);

  // crop = full image size returns the image itself
  std::vector<Tensor<float>> one{images[1]};
  auto full = sample_crops(one, 256, 2, 9);
  CHECK(full[0].v == images[1].v);

  CHECK_THROWS_AS(sample_crops(one, 512, 1, 0), InputError);
}

TEST_CASE("manifest parsing and image io round trips") {
  testutil::TmpDir tmp("data_io");
  Rng rng(17);
  Tensor<float> img = testutil::random_tensor_f(37, 53, 1, rng, 1.0);
  for (auto& v : img.v) v = float(int(std::abs(v) * 97) % 256);

  data::save_png_gray(tmp.file("a.png"), img);
  ImageTensor back = load_levels(tmp.file("a.png"));
  CHECK(back.t.v == img.v);

  data::save_pgm(tmp.file("a.pgm"), img);
  ImageTensor back2 = load_levels(tmp.file("a.pgm"));
  CHECK(back2.t.v == img.v);

  // FITS float round trip with default geometry
  data::save_fits_float(tmp.file("a.fits"), img);
  RawEuvImage raw = load_fits(tmp.file("a.fits"));
  CHECK(raw.intensity.v == img.v);
  CHECK(!raw.has_geometry);
  CHECK(raw.geometry.radius == doctest::Approx(0.45 * 37.0));

  // 1-bit mask round trip
  Tensor<uint8_t> mask(19, 23, 1);
  for (size_t i = 0; i < mask.size(); ++i) mask.v[i] = (i * 7) % 3 == 0 ? 1 : 0;
  data::save_mask_png(tmp.file("m.png"), mask);
  Tensor<uint8_t> mback = load_mask_png(tmp.file("m.png"));
  CHECK(mback.v == mask.v);

  std::ofstream mf(tmp.file("manifest.txt"));
  mf << "# comment\n";
  mf << tmp.file("a.png") << ",2015-01-02T03:04:05\n";
  mf << tmp.file("a.pgm") << "\n";
  mf.close();
  auto entries = load_manifest(tmp.file("manifest.txt"));
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].month() == 1);
  CHECK(!entries[1].has_timestamp());

  CHECK_THROWS_AS(load_levels(tmp.file("missing.png")), InputError);
}

TEST_CASE("synthetic disk carries consistent geometry and mask") {
  SyntheticDiskSpec spec;
  spec.noise_sigma = 2.0;
  SyntheticDisk d = make_synthetic_disk(spec, 99);
  CHECK(d.levels.h == spec.h);
  CHECK(d.ch_mask.size() == d.levels.size());
  size_t hole = 0;
  for (auto v : d.ch_mask.v) hole += v;
  CHECK(hole > 100);  // the default hole is a sizable region
  for (float v : d.levels.v) {
    CHECK(v >= 0.0f);
    CHECK(v <= 255.0f);
  }
}
