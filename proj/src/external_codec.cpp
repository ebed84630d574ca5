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

#include "snic/eval/external_codec.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "snic/data/image_io.hpp"
#include "snic/eval/metrics.hpp"

namespace snic::eval {

namespace {

namespace fs = std::filesystem;

bool binary_on_path(const std::string& name) {
  std::string cmd = "command -v " + name + " >/dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

int run(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }

struct TmpDir {
  fs::path path;
  TmpDir() {
    path = fs::temp_directory_path() /
           ("snic_ext_" + std::to_string(uint64_t(std::rand()) * 100003 + getpid()));
    fs::create_directories(path);
  }
  ~TmpDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

bool external_codec_available(const std::string& codec_id) {
  if (codec_id == ExternalCodecIds::kJpeg)
    return binary_on_path("cjpeg") && binary_on_path("djpeg");
  if (codec_id == ExternalCodecIds::kJpeg2000)
    return binary_on_path("opj_compress") && binary_on_path("opj_decompress");
  if (codec_id == ExternalCodecIds::kBpg)
    return binary_on_path("bpgenc") && binary_on_path("bpgdec");
  return false;
}

std::optional<RdPoint> external_codec_point(const std::string& codec_id, double quality,
                                            const Tensor<float>& image) {
  if (!external_codec_available(codec_id)) return std::nullopt;
  TmpDir tmp;
  fs::path in_pgm = tmp.path / "in.pgm";
  fs::path in_png = tmp.path / "in.png";
  fs::path packed = tmp.path / "packed.bin";
  fs::path rec_pgm = tmp.path / "rec.pgm";
  fs::path rec_png = tmp.path / "rec.png";
  data::save_pgm(in_pgm.string(), image);
  data::save_png_gray(in_png.string(), image);

  std::ostringstream enc, dec;
  fs::path rec_path = rec_pgm;
  if (codec_id == ExternalCodecIds::kJpeg) {
    enc << "cjpeg -quality " << int(quality) << " -grayscale " << in_pgm << " > " << packed;
    dec << "djpeg -grayscale -pnm " << packed << " > " << rec_pgm;
  } else if (codec_id == ExternalCodecIds::kJpeg2000) {
    enc << "opj_compress -i " << in_pgm << " -o " << (tmp.path / "packed.j2k") << " -r "
        << quality;
    dec << "opj_decompress -i " << (tmp.path / "packed.j2k") << " -o " << rec_pgm;
    packed = tmp.path / "packed.j2k";
  } else if (codec_id == ExternalCodecIds::kBpg) {
    enc << "bpgenc -q " << int(quality) << " -o " << packed << " " << in_png;
    dec << "bpgdec -o " << rec_png << " " << packed;
    rec_path = rec_png;
  } else {
    return std::nullopt;
  }
  if (run(enc.str()) != 0) throw std::runtime_error("external codec encode failed: " + codec_id);
  if (run(dec.str()) != 0) throw std::runtime_error("external codec decode failed: " + codec_id);

  data::ImageTensor rec = data::load_levels(rec_path.string());
  RdPoint p;
  p.codec_id = codec_id;
  p.parameter = quality;
  p.bpp = 8.0 * double(fs::file_size(packed)) / (double(image.h) * image.w);
  p.psnr = psnr(image, rec.t);
  p.msssim_log = msssim_log(image, rec.t);
  p.lpips = 0.0;  // external points report pixel metrics only
  return p;
}

}  // namespace snic::eval
