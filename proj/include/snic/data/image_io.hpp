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

#ifndef SNIC_DATA_IMAGE_IO_HPP_
#define SNIC_DATA_IMAGE_IO_HPP_

#include <string>
#include <vector>

#include "snic/data/image.hpp"

namespace snic::data {

// Grayscale ingestion. PNG and PGM load as 8-bit levels; FITS loads physical
// intensities with whatever disk metadata the header carries, falling back
// to a centered disk of radius 0.45*min(h, w).
bool is_fits_path(const std::string& path);

RawEuvImage load_raw_image(const std::string& path);

// Levels in [0,255] from an 8-bit grayscale PNG or PGM file.
ImageTensor load_levels(const std::string& path);

void save_png_gray(const std::string& path, const Tensor<float>& levels);
void save_pgm(const std::string& path, const Tensor<float>& levels);

// 1-bit grayscale PNG for masks (nonzero = member).
void save_mask_png(const std::string& path, const Tensor<uint8_t>& mask);
Tensor<uint8_t> load_mask_png(const std::string& path);

// Minimal single-HDU FITS with 32-bit float data.
void save_fits_float(const std::string& path, const Tensor<float>& data);
RawEuvImage load_fits(const std::string& path);

}  // namespace snic::data

#endif  // SNIC_DATA_IMAGE_IO_HPP_
