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

// snic: learned single-channel image codec with a solar segmentation
// harness. Subcommands: train, compress, decompress, eval, segment, impact,
// plot. Exit codes: 0 ok, 2 bad input, 3 model/checkpoint mismatch,
// 4 container integrity failure, 1 anything else.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "snic/codec/codec.hpp"
#include "snic/data/dataset.hpp"
#include "snic/data/image_io.hpp"
#include "snic/data/preprocess.hpp"
#include "snic/eval/external_codec.hpp"
#include "snic/eval/rd_sweep.hpp"
#include "snic/model/checkpoint.hpp"
#include "snic/seg/impact.hpp"
#include "snic/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace snic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitInput = 2;
constexpr int kExitModel = 3;
constexpr int kExitIntegrity = 4;

struct EuvOpts {
  bool euv = false;
  double clip_lo = 20.0;
  double clip_hi = 2500.0;
};

void add_euv_opts(CLI::App* cmd, EuvOpts& o) {
  cmd->add_flag("--euv", o.euv, "treat input as EUV intensities (clip+log map)");
  cmd->add_option("--clip-lo", o.clip_lo, "lower intensity clip for the EUV map");
  cmd->add_option("--clip-hi", o.clip_hi, "upper intensity clip for the EUV map");
}

// Loads one image into the level domain, optionally through the EUV map.
data::ImageTensor load_input(const std::string& path, const EuvOpts& o) {
  if (o.euv) {
    data::RawEuvImage raw = data::load_raw_image(path);
    return data::preprocess_euv(raw, o.clip_lo, o.clip_hi);
  }
  return data::load_levels(path);
}

std::vector<Tensor<float>> load_corpus(const std::string& manifest_path, const EuvOpts& o) {
  std::vector<Tensor<float>> corpus;
  for (const auto& e : data::load_manifest(manifest_path))
    corpus.push_back(load_input(e.path, o).t);
  if (corpus.empty()) throw data::InputError("manifest lists no images: " + manifest_path);
  return corpus;
}

std::vector<std::string> find_checkpoints(const std::string& dir) {
  std::vector<std::string> out;
  if (fs::is_regular_file(dir)) {
    out.push_back(dir);
    return out;
  }
  if (!fs::exists(dir)) throw model::ModelError("no such checkpoint path: " + dir);
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() == "ckpt_final.snck")
      out.push_back(entry.path().string());
  if (out.empty())
    for (const auto& entry : fs::recursive_directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".snck")
        out.push_back(entry.path().string());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw model::ModelError("no checkpoints under " + dir);
  return out;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::strtod(tok.c_str(), nullptr));
  return out;
}

int run_compress(const std::string& input, const std::string& ckpt, const std::string& output,
                 const EuvOpts& euv) {
  model::Checkpoint ck = model::load_checkpoint(ckpt);
  data::ImageTensor img = load_input(input, euv);
  data::ImageTensor padded = data::pad_to_multiple(img, 64);
  auto t0 = std::chrono::steady_clock::now();
  codec::CompressResult cr = codec::compress_image(padded.t, padded.orig_w, padded.orig_h,
                                                   *ck.model, ck.meta.lambda_index);
  auto t1 = std::chrono::steady_clock::now();
  std::ofstream out(output, std::ios::binary);
  if (!out) throw data::InputError("cannot write " + output);
  out.write(reinterpret_cast<const char*>(cr.bytes.data()), cr.bytes.size());
  if (!out) throw data::InputError("failed writing " + output);
  double enc_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  std::cout << "bpp=" << cr.bpp << " enc_ms=" << enc_ms << "\n";
  return kExitOk;
}

int run_decompress(const std::string& input, const std::string& ckpt,
                   const std::string& output, const EuvOpts& euv) {
  model::Checkpoint ck = model::load_checkpoint(ckpt);
  std::ifstream in(input, std::ios::binary);
  if (!in) throw data::InputError("cannot open " + input);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  Tensor<float> recon = codec::decompress_image(bytes, *ck.model);
  if (fs::path(output).extension() == ".pgm")
    data::save_pgm(output, recon);
  else
    data::save_png_gray(output, recon);
  if (euv.euv) {
    data::ImageTensor t;
    t.t = recon;
    t.orig_h = recon.h;
    t.orig_w = recon.w;
    data::save_fits_float(output + ".intensity.fits",
                          data::inverse_preprocess(t, euv.clip_lo, euv.clip_hi));
  }
  return kExitOk;
}

int run_train(const std::string& manifest, train::TrainConfig cfg, const EuvOpts& euv) {
  std::vector<Tensor<float>> corpus = load_corpus(manifest, euv);
  train::TrainResult res = train::train(cfg, corpus);
  for (const auto& p : res.checkpoints) std::cout << "checkpoint " << p << "\n";
  return kExitOk;
}

int run_eval(const std::string& ckpt_dir, const std::string& manifest,
             const std::string& out_dir, int jobs, const std::string& external,
             const std::string& qualities, const EuvOpts& euv) {
  std::vector<Tensor<float>> corpus = load_corpus(manifest, euv);
  std::vector<std::string> ckpts = find_checkpoints(ckpt_dir);
  std::vector<eval::RdPoint> points = eval::rd_sweep(ckpts, corpus, jobs);
  if (!external.empty()) {
    if (!eval::external_codec_available(external)) {
      std::cerr << "external codec '" << external << "' not found on this host; skipping\n";
    } else {
      for (double q : parse_list(qualities)) {
        eval::RdPoint mean;
        mean.codec_id = external;
        mean.parameter = q;
        int n = 0;
        for (const auto& img : corpus) {
          auto p = eval::external_codec_point(external, q, img);
          if (!p) continue;
          mean.bpp += p->bpp;
          mean.psnr += p->psnr;
          mean.msssim_log += p->msssim_log;
          ++n;
        }
        if (n) {
          mean.bpp /= n;
          mean.psnr /= n;
          mean.msssim_log /= n;
          points.push_back(mean);
        }
      }
      std::sort(points.begin(), points.end(),
                [](const eval::RdPoint& a, const eval::RdPoint& b) { return a.bpp < b.bpp; });
    }
  }
  fs::create_directories(out_dir);
  eval::write_rd_csv((fs::path(out_dir) / "rd.csv").string(), points);
  eval::write_rd_plots(out_dir, points);
  std::cout << "wrote " << (fs::path(out_dir) / "rd.csv").string() << " with "
            << points.size() << " points\n";
  return kExitOk;
}

seg::AcweConfig acwe_from_cli(double alpha, double mu_len, double lambda_ratio, int max_iters,
                              double tol) {
  seg::AcweConfig cfg;
  cfg.alpha = alpha;
  cfg.mu_len = mu_len;
  cfg.lambda_i = lambda_ratio;
  cfg.lambda_o = 1.0;
  cfg.max_iters = max_iters;
  cfg.tol = tol;
  return cfg;
}

int run_segment(const std::string& input, const std::string& output,
                const seg::AcweConfig& cfg, const EuvOpts& euv) {
  data::RawEuvImage raw = data::load_raw_image(input);
  Tensor<float> img = raw.intensity;
  if (euv.euv && data::is_fits_path(input)) {
    // segment in clipped intensity space; geometry comes from the header
    for (auto& v : img.v)
      v = std::min(std::max(v, float(euv.clip_lo)), float(euv.clip_hi));
  }
  seg::AcweResult res = seg::segment_image(img, raw.geometry, cfg);
  data::save_mask_png(output, res.mask.mask);
  nlohmann::json side;
  side["geometry"] = {{"center_row", raw.geometry.center_row},
                      {"center_col", raw.geometry.center_col},
                      {"radius", raw.geometry.radius}};
  side["config"] = {{"alpha", cfg.alpha},       {"mu_len", cfg.mu_len},
                    {"lambda_i", cfg.lambda_i}, {"lambda_o", cfg.lambda_o},
                    {"max_iters", cfg.max_iters}, {"tol", cfg.tol}};
  side["iterations"] = res.iterations;
  side["converged"] = res.converged;
  side["empty_seed"] = res.empty_seed;
  side["pixels"] = res.mask.count();
  std::ofstream js(output + ".json");
  js << side.dump(2) << "\n";
  std::cout << "mask " << output << " pixels=" << res.mask.count()
            << " iters=" << res.iterations << "\n";
  return kExitOk;
}

int run_impact(const std::string& ckpt_dir, int use_lambdas, const std::string& manifest,
               const std::string& out_csv, const std::string& codec_kind,
               const seg::AcweConfig& cfg, const EuvOpts& euv, int jobs) {
  std::vector<data::ManifestEntry> entries = data::load_manifest(manifest);
  if (entries.empty()) throw data::InputError("manifest lists no images: " + manifest);
  std::vector<Tensor<float>> images;
  std::vector<data::DiskGeometry> geoms;
  for (const auto& e : entries) {
    data::RawEuvImage raw = data::load_raw_image(e.path);
    if (euv.euv && data::is_fits_path(e.path)) {
      data::ImageTensor lvl = data::preprocess_euv(raw, euv.clip_lo, euv.clip_hi);
      images.push_back(lvl.t);
    } else {
      images.push_back(raw.intensity);
    }
    geoms.push_back(raw.geometry);
  }

  std::vector<seg::ImpactPoint> points;
  if (codec_kind == "identity") {
    for (size_t i = 0; i < images.size(); ++i)
      points.push_back(seg::compression_impact(entries[i].path, images[i], geoms[i], cfg,
                                               seg::identity_codec()));
  } else if (codec_kind == "snic") {
    std::vector<std::string> ckpts = find_checkpoints(ckpt_dir);
    if (use_lambdas > 0 && use_lambdas < int(ckpts.size())) {
      // evenly spaced subset across the sorted checkpoint list
      std::vector<std::string> some;
      for (int k = 0; k < use_lambdas; ++k)
        some.push_back(ckpts[size_t(k) * (ckpts.size() - 1) / std::max(1, use_lambdas - 1)]);
      ckpts = some;
    }
    for (const auto& cp : ckpts) {
      model::Checkpoint ck = model::load_checkpoint(cp);
      const int n = int(images.size());
      std::vector<seg::ImpactPoint> batch(n);
#pragma omp parallel for schedule(static) num_threads(std::max(1, jobs))
      for (int i = 0; i < n; ++i)
        batch[i] = seg::compression_impact(entries[i].path, images[i], geoms[i], cfg,
                                           seg::snic_codec(*ck.model, ck.meta.lambda_index));
      points.insert(points.end(), batch.begin(), batch.end());
    }
  } else {
    throw data::InputError("unknown codec kind: " + codec_kind);
  }
  seg::write_impact_csv(out_csv, points);
  std::cout << "wrote " << out_csv << " with " << points.size() << " rows\n";
  return kExitOk;
}

int run_plot(const std::string& csv, const std::string& out_dir) {
  std::vector<eval::RdPoint> points = eval::read_rd_csv(csv);
  auto files = eval::write_rd_plots(out_dir, points);
  for (const auto& f : files) std::cout << "plot " << f << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snic - learned single-channel image compression toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file merged under explicit flags");

  uint64_t seed = 0;
  app.add_option("--seed", seed, "root seed for all randomness");

  // ---- compress ----
  auto* c_cmd = app.add_subcommand("compress", "encode an image into a .snic container");
  std::string c_in, c_ckpt, c_out = "out.snic";
  EuvOpts c_euv;
  c_cmd->add_option("input", c_in, "input image (png/pgm, or fits with --euv)")->required();
  c_cmd->add_option("--checkpoint", c_ckpt, "model checkpoint (.snck)")->required();
  c_cmd->add_option("-o,--output", c_out, "output container path");
  add_euv_opts(c_cmd, c_euv);

  // ---- decompress ----
  auto* d_cmd = app.add_subcommand("decompress", "decode a .snic container");
  std::string d_in, d_ckpt, d_out = "out.png";
  EuvOpts d_euv;
  d_cmd->add_option("input", d_in, "input .snic container")->required();
  d_cmd->add_option("--checkpoint", d_ckpt, "model checkpoint (.snck)")->required();
  d_cmd->add_option("-o,--output", d_out, "reconstruction path (png/pgm)");
  add_euv_opts(d_cmd, d_euv);

  // ---- train ----
  auto* t_cmd = app.add_subcommand("train", "train one model per lambda");
  std::string t_manifest, t_lambdas = "0.0015,0.0035,0.0070,0.0125,0.0250,0.0410,0.0550";
  train::TrainConfig tcfg;
  EuvOpts t_euv;
  t_cmd->add_option("--manifest", t_manifest, "dataset manifest (path,timestamp lines)")
      ->required();
  t_cmd->add_option("--out", tcfg.out_dir, "run directory for checkpoints and metrics");
  t_cmd->add_option("--lambdas", t_lambdas, "comma-separated rate-distortion weights");
  t_cmd->add_option("--arch", tcfg.arch, "model preset: paper, desk, micro");
  t_cmd->add_option("--epochs", tcfg.epochs, "training epochs");
  t_cmd->add_option("--batch", tcfg.batch, "batch size");
  t_cmd->add_option("--crop", tcfg.crop, "training crop size");
  t_cmd->add_option("--lr-start", tcfg.lr_start, "initial learning rate");
  t_cmd->add_option("--lr-end", tcfg.lr_end, "final annealed learning rate");
  t_cmd->add_option("--steps-per-epoch", tcfg.steps_per_epoch,
                    "steps per epoch (0: corpus/batch)");
  t_cmd->add_flag("--adversarial", tcfg.adversarial, "enable the conditional adversary");
  t_cmd->add_option("--w-recon", tcfg.w_recon, "pixel reconstruction weight");
  t_cmd->add_option("--w-perc", tcfg.w_perceptual, "perceptual distance weight");
  t_cmd->add_option("--w-adv", tcfg.w_adversarial, "adversarial weight");
  add_euv_opts(t_cmd, t_euv);

  // ---- eval ----
  auto* e_cmd = app.add_subcommand("eval", "rate-distortion sweep over checkpoints");
  std::string e_ckpts, e_corpus, e_out = "eval_out", e_external,
              e_qualities = "10,30,50,70,90";
  int e_jobs = 1;
  EuvOpts e_euv;
  e_cmd->add_option("--checkpoints", e_ckpts, "checkpoint file or directory")->required();
  e_cmd->add_option("--corpus", e_corpus, "evaluation manifest")->required();
  e_cmd->add_option("--out", e_out, "output directory (rd.csv + plots)");
  e_cmd->add_option("--jobs", e_jobs, "worker pool size (results independent of it)");
  e_cmd->add_option("--external", e_external, "external codec id: jpeg, jpeg2000, bpg");
  e_cmd->add_option("--qualities", e_qualities, "external codec quality sweep");
  add_euv_opts(e_cmd, e_euv);

  // ---- segment ----
  auto* s_cmd = app.add_subcommand("segment", "coronal-hole segmentation of one image");
  std::string s_in, s_out = "mask.png";
  double s_alpha = 0.3, s_mu = 0.0, s_ratio = 50.0, s_tol = 1e-4;
  int s_iters = 500;
  EuvOpts s_euv;
  s_cmd->add_option("input", s_in, "input image (fits carries disk geometry)")->required();
  s_cmd->add_option("-o,--output", s_out, "mask path (1-bit png + .json sidecar)");
  s_cmd->add_option("--alpha", s_alpha, "seeding factor on the quiet-sun level");
  s_cmd->add_option("--mu-len", s_mu, "contour-length weight");
  s_cmd->add_option("--lambda-ratio", s_ratio, "foreground/background homogeneity ratio");
  s_cmd->add_option("--max-iters", s_iters, "iteration cap");
  s_cmd->add_option("--tol", s_tol, "convergence tolerance (flipped-pixel fraction)");
  add_euv_opts(s_cmd, s_euv);

  // ---- impact ----
  auto* i_cmd = app.add_subcommand("impact", "segmentation agreement vs bitrate");
  std::string i_ckpts, i_images, i_out = "impact.csv", i_codec = "snic";
  int i_lambdas = 0, i_jobs = 1;
  double i_alpha = 0.3, i_mu = 0.0, i_ratio = 50.0, i_tol = 1e-4;
  int i_iters = 500;
  EuvOpts i_euv;
  i_cmd->add_option("--checkpoints", i_ckpts, "checkpoint file or directory");
  i_cmd->add_option("--lambdas", i_lambdas, "use this many checkpoints, evenly spaced");
  i_cmd->add_option("--images", i_images, "image manifest")->required();
  i_cmd->add_option("--out", i_out, "output csv (image id, bpp, dice)");
  i_cmd->add_option("--codec", i_codec, "codec under test: snic or identity");
  i_cmd->add_option("--jobs", i_jobs, "worker pool size");
  i_cmd->add_option("--alpha", i_alpha, "seeding factor");
  i_cmd->add_option("--mu-len", i_mu, "contour-length weight");
  i_cmd->add_option("--lambda-ratio", i_ratio, "homogeneity ratio");
  i_cmd->add_option("--max-iters", i_iters, "iteration cap");
  i_cmd->add_option("--tol", i_tol, "convergence tolerance");
  add_euv_opts(i_cmd, i_euv);

  // ---- plot ----
  auto* p_cmd = app.add_subcommand("plot", "render RD curves from a csv");
  std::string p_csv, p_out = "plots";
  p_cmd->add_option("--csv", p_csv, "rd csv produced by eval")->required();
  p_cmd->add_option("--out", p_out, "output directory for svg plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);  // --help exits 0; bad flags exit nonzero
  }

  try {
    if (*c_cmd) return run_compress(c_in, c_ckpt, c_out, c_euv);
    if (*d_cmd) return run_decompress(d_in, d_ckpt, d_out, d_euv);
    if (*t_cmd) {
      tcfg.lambdas = parse_list(t_lambdas);
      tcfg.seed = seed;
      return run_train(t_manifest, tcfg, t_euv);
    }
    if (*e_cmd)
      return run_eval(e_ckpts, e_corpus, e_out, e_jobs, e_external, e_qualities, e_euv);
    if (*s_cmd)
      return run_segment(s_in, s_out, acwe_from_cli(s_alpha, s_mu, s_ratio, s_iters, s_tol),
                         s_euv);
    if (*i_cmd)
      return run_impact(i_ckpts, i_lambdas, i_images, i_out, i_codec,
                        acwe_from_cli(i_alpha, i_mu, i_ratio, i_iters, i_tol), i_euv, i_jobs);
    if (*p_cmd) return run_plot(p_csv, p_out);
  } catch (const codec::IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const codec::ModelMismatchError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kExitModel;
  } catch (const model::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kExitModel;
  } catch (const data::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
