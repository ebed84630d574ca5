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

#include "snic/eval/rd_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "snic/codec/codec.hpp"
#include "snic/eval/metrics.hpp"
#include "snic/eval/svg_plot.hpp"
#include "snic/model/checkpoint.hpp"
#include "snic/nn/ops.hpp"
#include "snic/objectives/lpips.hpp"

namespace snic::eval {

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << v;
  return os.str();
}

double parse_field(const std::string& s) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

std::vector<RdPoint> rd_sweep(const std::vector<std::string>& checkpoint_paths,
                              const std::vector<Tensor<float>>& corpus, int jobs) {
  if (checkpoint_paths.empty()) throw std::invalid_argument("rd_sweep: no checkpoints");
  if (corpus.empty()) throw std::invalid_argument("rd_sweep: empty corpus");
  objectives::LpipsExtractor<float> lpips;
  std::vector<RdPoint> points;
  for (const auto& path : checkpoint_paths) {
    model::Checkpoint ck = model::load_checkpoint(path);
    const int n = static_cast<int>(corpus.size());
    std::vector<double> bpps(n), psnrs(n), mlogs(n), lps(n);
#pragma omp parallel for schedule(static) num_threads(std::max(1, jobs))
    for (int i = 0; i < n; ++i) {
      const Tensor<float>& img = corpus[i];
      Tensor<float> padded = nn::pad_replicate_to_multiple(img, 64);
      codec::CompressResult cr =
          codec::compress_image(padded, img.w, img.h, *ck.model, ck.meta.lambda_index);
      Tensor<float> recon = codec::decompress_image(cr.bytes, *ck.model);
      bpps[i] = cr.bpp;
      psnrs[i] = psnr(img, recon);
      mlogs[i] = msssim_log(img, recon);
      lps[i] = objectives::lpips_distance(lpips, img, recon);
    }
    RdPoint p;
    p.codec_id = "snic";
    p.parameter = ck.meta.lambda_value;
    for (int i = 0; i < n; ++i) {
      p.bpp += bpps[i] / n;
      p.psnr += psnrs[i] / n;
      p.msssim_log += mlogs[i] / n;
      p.lpips += lps[i] / n;
    }
    points.push_back(p);
  }
  std::sort(points.begin(), points.end(),
            [](const RdPoint& a, const RdPoint& b) { return a.bpp < b.bpp; });
  return points;
}

void write_rd_csv(const std::string& path, const std::vector<RdPoint>& points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "codec_id,parameter,bpp,psnr,msssim_log,lpips\n";
  for (const auto& p : points)
    out << p.codec_id << ',' << fmt(p.parameter) << ',' << fmt(p.bpp) << ',' << fmt(p.psnr)
        << ',' << fmt(p.msssim_log) << ',' << fmt(p.lpips) << '\n';
}

std::vector<RdPoint> read_rd_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<RdPoint> points;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f;
    RdPoint p;
    std::getline(ss, p.codec_id, ',');
    std::getline(ss, f, ',');
    p.parameter = parse_field(f);
    std::getline(ss, f, ',');
    p.bpp = parse_field(f);
    std::getline(ss, f, ',');
    p.psnr = parse_field(f);
    std::getline(ss, f, ',');
    p.msssim_log = parse_field(f);
    std::getline(ss, f, ',');
    p.lpips = parse_field(f);
    points.push_back(p);
  }
  return points;
}

std::vector<std::string> write_rd_plots(const std::string& dir,
                                        const std::vector<RdPoint>& points) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  struct MetricSel {
    const char* name;
    double RdPoint::* field;
  };
  const MetricSel metrics[] = {{"psnr", &RdPoint::psnr},
                               {"msssim_log", &RdPoint::msssim_log},
                               {"lpips", &RdPoint::lpips}};
  std::vector<std::string> written;
  for (const auto& sel : metrics) {
    std::vector<std::string> ids;
    for (const auto& p : points)
      if (std::find(ids.begin(), ids.end(), p.codec_id) == ids.end())
        ids.push_back(p.codec_id);
    std::vector<SvgSeries> series;
    for (const auto& id : ids) {
      SvgSeries s;
      s.label = id;
      for (const auto& p : points)
        if (p.codec_id == id && std::isfinite(p.*(sel.field)))
          s.points.push_back({p.bpp, p.*(sel.field)});
      std::sort(s.points.begin(), s.points.end());
      if (!s.points.empty()) series.push_back(std::move(s));
    }
    std::string path = (fs::path(dir) / (std::string("rd_") + sel.name + ".svg")).string();
    write_svg_plot(path, series, "bpp", sel.name);
    written.push_back(path);
  }
  return written;
}

}  // namespace snic::eval
