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

#include "snic/data/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace snic::data {

namespace {

std::string lower_ext(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  return ext;
}

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

Tensor<float> load_png_gray(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw InputError("cannot open " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw InputError("png: allocation failure");
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("png: failed to read " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_packing(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);
  const int h = png_get_image_height(png, info);
  const int w = png_get_image_width(png, info);
  std::vector<uint8_t> row(png_get_rowbytes(png, info));
  Tensor<float> out(h, w, 1);
  for (int y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < w; ++x) out.at(y, x, 0) = static_cast<float>(row[x]);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

Tensor<float> load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw InputError("pgm: only binary P5 supported: " + path);
  auto next_int = [&in, &path]() {
    // skip whitespace and # comments
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v = -1;
    in >> v;
    if (v < 0) throw InputError("pgm: bad header in " + path);
    return v;
  };
  long w = next_int(), h = next_int(), maxv = next_int();
  if (maxv != 255) throw InputError("pgm: only 8-bit images supported: " + path);
  in.get();  // single whitespace after maxval
  std::vector<uint8_t> buf(size_t(w) * h);
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!in) throw InputError("pgm: truncated data in " + path);
  Tensor<float> out(int(h), int(w), 1);
  for (size_t i = 0; i < buf.size(); ++i) out.v[i] = static_cast<float>(buf[i]);
  return out;
}

uint8_t to_u8(float v) {
  float r = std::round(v);
  if (r < 0.0f) r = 0.0f;
  if (r > 255.0f) r = 255.0f;
  return static_cast<uint8_t>(r);
}

// ---- FITS (minimal single-HDU subset) ----

constexpr size_t kFitsBlock = 2880;

double card_value(const std::string& header, const std::string& key, bool* found) {
  // cards are 80 chars: "KEY     = value / comment"
  for (size_t off = 0; off + 80 <= header.size(); off += 80) {
    std::string card = header.substr(off, 80);
    std::string name = card.substr(0, 8);
    name.erase(name.find_last_not_of(' ') + 1);
    if (name != key) continue;
    auto eq = card.find('=');
    if (eq == std::string::npos) break;
    std::string val = card.substr(eq + 1);
    auto slash = val.find('/');
    if (slash != std::string::npos) val = val.substr(0, slash);
    if (found) *found = true;
    return std::strtod(val.c_str(), nullptr);
  }
  if (found) *found = false;
  return 0.0;
}

std::string card_string(const std::string& header, const std::string& key) {
  for (size_t off = 0; off + 80 <= header.size(); off += 80) {
    std::string card = header.substr(off, 80);
    std::string name = card.substr(0, 8);
    name.erase(name.find_last_not_of(' ') + 1);
    if (name != key) continue;
    auto q1 = card.find('\'');
    if (q1 == std::string::npos) return "";
    auto q2 = card.find('\'', q1 + 1);
    if (q2 == std::string::npos) return "";
    std::string s = card.substr(q1 + 1, q2 - q1 - 1);
    s.erase(s.find_last_not_of(' ') + 1);
    return s;
  }
  return "";
}

}  // namespace

bool is_fits_path(const std::string& path) {
  std::string ext = lower_ext(path);
  return ext == "fits" || ext == "fit" || ext == "fts";
}

RawEuvImage load_fits(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::string header;
  bool ended = false;
  char block[kFitsBlock];
  while (!ended) {
    in.read(block, kFitsBlock);
    if (!in) throw InputError("fits: truncated header in " + path);
    header.append(block, kFitsBlock);
    for (size_t off = header.size() - kFitsBlock; off + 80 <= header.size(); off += 80)
      if (header.compare(off, 3, "END") == 0 &&
          (header.size() <= off + 3 || header[off + 3] == ' ')) {
        ended = true;
        break;
      }
  }
  bool found = false;
  int bitpix = static_cast<int>(card_value(header, "BITPIX", &found));
  if (!found) throw InputError("fits: missing BITPIX in " + path);
  int naxis = static_cast<int>(card_value(header, "NAXIS", &found));
  if (!found || naxis != 2) throw InputError("fits: only NAXIS=2 supported: " + path);
  int w = static_cast<int>(card_value(header, "NAXIS1", &found));
  int h = static_cast<int>(card_value(header, "NAXIS2", &found));
  if (w <= 0 || h <= 0) throw InputError("fits: bad dimensions in " + path);
  bool has_bzero = false, has_bscale = false;
  double bzero = card_value(header, "BZERO", &has_bzero);
  double bscale = card_value(header, "BSCALE", &has_bscale);
  if (!has_bzero) bzero = 0.0;
  if (!has_bscale) bscale = 1.0;

  RawEuvImage raw;
  raw.intensity = Tensor<float>(h, w, 1);
  const size_t npix = size_t(h) * w;
  auto read_all = [&](auto make_value, int bytes_per) {
    std::vector<uint8_t> buf(npix * bytes_per);
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (!in) throw InputError("fits: truncated data in " + path);
    for (size_t i = 0; i < npix; ++i)
      raw.intensity.v[i] = static_cast<float>(bzero + bscale * make_value(buf.data() + i * bytes_per));
  };
  if (bitpix == 8) {
    read_all([](const uint8_t* p) { return double(*p); }, 1);
  } else if (bitpix == 16) {
    read_all([](const uint8_t* p) {
      return double(int16_t((uint16_t(p[0]) << 8) | p[1]));
    }, 2);
  } else if (bitpix == -32) {
    read_all([](const uint8_t* p) {
      uint32_t u = (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | p[3];
      float f;
      std::memcpy(&f, &u, 4);
      return double(f);
    }, 4);
  } else {
    throw InputError("fits: unsupported BITPIX in " + path);
  }

  raw.record_time = card_string(header, "T_REC");
  if (raw.record_time.empty()) raw.record_time = card_string(header, "DATE-OBS");
  raw.wavelength = card_value(header, "WAVELNTH", &found);

  bool has_cr1 = false, has_cr2 = false, has_rsun = false;
  double crpix1 = card_value(header, "CRPIX1", &has_cr1);  // column, 1-based
  double crpix2 = card_value(header, "CRPIX2", &has_cr2);  // row, 1-based
  double rsun_pix = card_value(header, "R_SUN", &has_rsun);
  if (!has_rsun) {
    bool has_obs = false, has_cd = false;
    double rsun_obs = card_value(header, "RSUN_OBS", &has_obs);  // arcsec
    double cdelt1 = card_value(header, "CDELT1", &has_cd);       // arcsec/pixel
    if (has_obs && has_cd && cdelt1 != 0.0) {
      rsun_pix = rsun_obs / cdelt1;
      has_rsun = true;
    }
  }
  if (has_cr1 && has_cr2 && has_rsun && rsun_pix > 0.0) {
    raw.geometry = DiskGeometry{crpix2 - 1.0, crpix1 - 1.0, rsun_pix};
    raw.has_geometry = true;
  } else {
    raw.geometry = DiskGeometry::centered_default(h, w);
    raw.has_geometry = false;
  }
  return raw;
}

void save_fits_float(const std::string& path, const Tensor<float>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  auto card = [](const std::string& s) {
    std::string c = s;
    c.resize(80, ' ');
    return c;
  };
  std::string header;
  header += card("SIMPLE  =                    T");
  header += card("BITPIX  =                  -32");
  header += card("NAXIS   =                    2");
  {
    std::ostringstream os;
    os << "NAXIS1  = " << std::setw(20) << data.w;
    header += card(os.str());
  }
  {
    std::ostringstream os;
    os << "NAXIS2  = " << std::setw(20) << data.h;
    header += card(os.str());
  }
  header += card("END");
  header.resize((header.size() + kFitsBlock - 1) / kFitsBlock * kFitsBlock, ' ');
  out.write(header.data(), header.size());
  std::vector<uint8_t> buf(data.size() * 4);
  for (size_t i = 0; i < data.size(); ++i) {
    uint32_t u;
    std::memcpy(&u, &data.v[i], 4);
    buf[i * 4 + 0] = uint8_t(u >> 24);
    buf[i * 4 + 1] = uint8_t(u >> 16);
    buf[i * 4 + 2] = uint8_t(u >> 8);
    buf[i * 4 + 3] = uint8_t(u);
  }
  size_t padded = (buf.size() + kFitsBlock - 1) / kFitsBlock * kFitsBlock;
  buf.resize(padded, 0);
  out.write(reinterpret_cast<const char*>(buf.data()), buf.size());
  if (!out) throw InputError("failed writing " + path);
}

RawEuvImage load_raw_image(const std::string& path) {
  if (is_fits_path(path)) return load_fits(path);
  RawEuvImage raw;
  std::string ext = lower_ext(path);
  if (ext == "png")
    raw.intensity = load_png_gray(path);
  else if (ext == "pgm")
    raw.intensity = load_pgm(path);
  else
    throw InputError("unsupported image format: " + path);
  raw.geometry = DiskGeometry::centered_default(raw.h(), raw.w());
  raw.has_geometry = false;
  return raw;
}

ImageTensor load_levels(const std::string& path) {
  RawEuvImage raw = load_raw_image(path);
  if (is_fits_path(path))
    throw InputError("load_levels expects an 8-bit PNG/PGM image: " + path);
  ImageTensor t;
  t.t = std::move(raw.intensity);
  t.orig_h = t.t.h;
  t.orig_w = t.t.w;
  return t;
}

void save_png_gray(const std::string& path, const Tensor<float>& levels) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw InputError("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InputError("png: failed to write " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, levels.w, levels.h, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<uint8_t> row(levels.w);
  for (int y = 0; y < levels.h; ++y) {
    for (int x = 0; x < levels.w; ++x) row[x] = to_u8(levels.at(y, x, 0));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_pgm(const std::string& path, const Tensor<float>& levels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << "P5\n" << levels.w << " " << levels.h << "\n255\n";
  std::vector<uint8_t> buf(levels.size());
  for (size_t i = 0; i < levels.size(); ++i) buf[i] = to_u8(levels.v[i]);
  out.write(reinterpret_cast<const char*>(buf.data()), buf.size());
  if (!out) throw InputError("failed writing " + path);
}

void save_mask_png(const std::string& path, const Tensor<uint8_t>& mask) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw InputError("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InputError("png: failed to write " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, mask.w, mask.h, 1, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_set_packing(png);  // we hand over one pixel per byte
  std::vector<uint8_t> row(mask.w);
  for (int y = 0; y < mask.h; ++y) {
    for (int x = 0; x < mask.w; ++x) row[x] = mask.at(y, x, 0) ? 1 : 0;
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Tensor<uint8_t> load_mask_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw InputError("cannot open " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("png: failed to read " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  png_set_packing(png);
  png_read_update_info(png, info);
  const int h = png_get_image_height(png, info);
  const int w = png_get_image_width(png, info);
  Tensor<uint8_t> out(h, w, 1);
  std::vector<uint8_t> row(png_get_rowbytes(png, info));
  for (int y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < w; ++x) out.at(y, x, 0) = row[x] ? 1 : 0;
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace snic::data
