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

#ifndef SNIC_DATA_DATASET_HPP_
#define SNIC_DATA_DATASET_HPP_

#include <string>
#include <vector>

#include "snic/core/rng.hpp"
#include "snic/data/image.hpp"

namespace snic::data {

// One `path,timestamp` manifest line. The timestamp is optional for
// operations that only need pixels.
struct ManifestEntry {
  std::string path;
  std::string timestamp;

  bool has_timestamp() const { return !timestamp.empty(); }
  // 1..12; throws when the record has no parsable timestamp.
  int month() const;
};

std::vector<ManifestEntry> load_manifest(const std::string& path);

struct DatasetSplit {
  std::vector<ManifestEntry> train;  // months 1..8
  std::vector<ManifestEntry> test;   // months 9..12
};

// Deterministic month partition; every record must carry a timestamp.
DatasetSplit split_by_month(const std::vector<ManifestEntry>& records);

// `batch` crops of crop x crop, images and positions uniform under the seed.
std::vector<Tensor<float>> sample_crops(const std::vector<Tensor<float>>& images, int crop,
                                        int batch, uint64_t seed);

}  // namespace snic::data

#endif  // SNIC_DATA_DATASET_HPP_
