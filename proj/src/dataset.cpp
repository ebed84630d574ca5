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

#include "snic/data/dataset.hpp"

#include <fstream>

namespace snic::data {

int ManifestEntry::month() const {
  // Accepts ISO-like stamps: YYYY-MM... anywhere sensible.
  if (timestamp.size() < 7 || timestamp[4] != '-')
    throw InputError("record has no parsable timestamp: '" + timestamp + "' (" + path + ")");
  int m = (timestamp[5] - '0') * 10 + (timestamp[6] - '0');
  if (m < 1 || m > 12)
    throw InputError("record month out of range: '" + timestamp + "' (" + path + ")");
  return m;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest " + path);
  std::vector<ManifestEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    ManifestEntry e;
    if (comma == std::string::npos) {
      e.path = line;
    } else {
      e.path = line.substr(0, comma);
      e.timestamp = line.substr(comma + 1);
    }
    out.push_back(std::move(e));
  }
  return out;
}

DatasetSplit split_by_month(const std::vector<ManifestEntry>& records) {
  DatasetSplit split;
  for (const auto& r : records) {
    if (!r.has_timestamp())
      throw InputError("record missing timestamp: " + r.path);
    (r.month() <= 8 ? split.train : split.test).push_back(r);
  }
  return split;
}

std::vector<Tensor<float>> sample_crops(const std::vector<Tensor<float>>& images, int crop,
                                        int batch, uint64_t seed) {
  if (images.empty()) throw InputError("sample_crops: empty image list");
  for (const auto& img : images)
    if (img.h < crop || img.w < crop)
      throw InputError("sample_crops: crop " + std::to_string(crop) +
                       " larger than image " + img.shape_str());
  Rng rng(Rng::mix(seed, 0xc407LL));
  std::vector<Tensor<float>> out;
  out.reserve(batch);
  for (int b = 0; b < batch; ++b) {
    const Tensor<float>& img = images[rng.uniform_int(int(images.size()))];
    int y0 = rng.uniform_int(img.h - crop + 1);
    int x0 = rng.uniform_int(img.w - crop + 1);
    Tensor<float> t(crop, crop, 1);
    for (int y = 0; y < crop; ++y)
      for (int x = 0; x < crop; ++x) t.at(y, x, 0) = img.at(y0 + y, x0 + x, 0);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace snic::data
