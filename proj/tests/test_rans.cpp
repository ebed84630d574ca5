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

#include "snic/codec/rans.hpp"
#include "testutil.hpp"

using namespace snic;
using namespace snic::codec;

TEST_CASE("cdf tables are normalized with every slot codable") {
  for (double sigma : {0.11, 0.5, 1.0, 7.3, 120.0}) {
    CdfTable t = build_cdf_table(0.0, sigma);
    CHECK(t.cum.front() == 0);
    CHECK(t.cum.back() == kFreqTotal);
    for (int s = 0; s < t.slot_count(); ++s) CHECK(t.freq(s) >= 1);
    // mode at zero for a centered gaussian (near-flat tables may tie
    // within a rounding unit)
    uint32_t f0 = t.freq(t.slot_of(0));
    for (int s = t.s_min; s <= t.s_max; ++s) CHECK(t.freq(t.slot_of(s)) <= f0 + 1);
    if (sigma <= 10.0)
      for (int s = t.s_min; s <= t.s_max; ++s)
        if (s != 0) CHECK(t.freq(t.slot_of(s)) <= f0);
  }
  // frequency of the central symbol approximates the true pmf
  CdfTable t = build_cdf_table(0.0, 1.0);
  double p0 = double(t.freq(t.slot_of(0))) / kFreqTotal;
  CHECK(std::abs(p0 - 0.382925) <= 2.0 / 65536.0);
}

TEST_CASE("sigma bins are monotone and self-consistent") {
  double prev = 0.0;
  for (int b = 0; b < kSigmaBins; ++b) {
    double s = sigma_bin_value(b);
    CHECK(s > prev);
    CHECK(sigma_bin_index(s) == b);
    prev = s;
  }
  CHECK(sigma_bin_index(0.0001) == 0);
  CHECK(sigma_bin_index(1e9) == kSigmaBins - 1);
}

TEST_CASE("empty sequence round trips through the state flush") {
  CdfTable t = build_cdf_table(0.0, 1.0);
  std::vector<int> symbols;
  std::vector<const CdfTable*> tables;
  std::vector<uint8_t> bytes = rans_encode(symbols, tables);
  CHECK(bytes.size() == 4);  // just the flushed state
  std::vector<int> back = rans_decode(bytes, tables);
  CHECK(back.empty());
}

TEST_CASE("random symbol streams round trip exactly") {
  Rng rng(0xbeef);
  std::vector<CdfTable> tables;
  for (int i = 0; i < 16; ++i)
    tables.push_back(build_cdf_table(rng.uniform(-4, 4), rng.uniform(0.12, 40.0)));
  for (int rep = 0; rep < 300; ++rep) {
    int n = rng.uniform_int(400);
    std::vector<int> symbols(n);
    std::vector<const CdfTable*> per_symbol(n);
    for (int i = 0; i < n; ++i) {
      const CdfTable& t = tables[rng.uniform_int(int(tables.size()))];
      per_symbol[i] = &t;
      // mostly in-range symbols, occasionally far outside to force escapes
      if (rng.uniform() < 0.02)
        symbols[i] = rng.uniform_int(200000) - 100000;
      else
        symbols[i] = t.s_min + rng.uniform_int(t.symbol_count());
    }
    std::vector<uint8_t> bytes = rans_encode(symbols, per_symbol);
    std::vector<int> back = rans_decode(bytes, per_symbol);
    REQUIRE(back == symbols);
  }
}

TEST_CASE("coded size approaches the source entropy") {
  // i.i.d. symbols with pmf (1/2, 1/4, 1/4) -> 1.5 bits each
  CdfTable t;
  t.s_min = 0;
  t.s_max = 2;
  t.cum = {0, 32768, 49152, 65535, 65536};  // 3 symbols + escape slot of 1
  Rng rng(77);
  const int n = 100000;
  std::vector<int> symbols(n);
  std::vector<const CdfTable*> tables(n, &t);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    symbols[i] = u < 0.5 ? 0 : (u < 0.75 ? 1 : 2);
  }
  std::vector<uint8_t> bytes = rans_encode(symbols, tables);
  double bits = 8.0 * double(bytes.size());
  double entropy = 1.5 * n;
  CHECK(bits <= entropy * 1.01 + 64.0);
  CHECK(bits >= entropy * 0.99);
  std::vector<int> back = rans_decode(bytes, tables);
  CHECK(back == symbols);
}

TEST_CASE("encoding is deterministic and truncation is detected") {
  Rng rng(5);
  CdfTable t = build_cdf_table(0.0, 2.0);
  std::vector<int> symbols(500);
  std::vector<const CdfTable*> tables(500, &t);
  for (auto& s : symbols) s = t.s_min + rng.uniform_int(t.symbol_count());
  std::vector<uint8_t> b1 = rans_encode(symbols, tables);
  std::vector<uint8_t> b2 = rans_encode(symbols, tables);
  CHECK(b1 == b2);
  std::vector<uint8_t> trunc(b1.begin(), b1.begin() + b1.size() / 3);
  CHECK_THROWS_AS(rans_decode(trunc, tables), std::runtime_error);
  std::vector<uint8_t> tiny = {1, 2};
  CHECK_THROWS_AS(rans_decode(tiny, tables), std::runtime_error);
}

TEST_CASE("zigzag mapping is a bijection on both signs") {
  for (int v : {0, 1, -1, 2, -2, 100000, -100000, 2147483647, -2147483647}) {
    CHECK(RansEncoder::unzigzag(RansEncoder::zigzag(v)) == v);
  }
}
