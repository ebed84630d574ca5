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

#include "snic/train/trainer.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "snic/data/dataset.hpp"
#include "snic/entropy/rate.hpp"
#include "snic/quant/quantize.hpp"
#include "snic/train/schedule.hpp"

namespace snic::train {

namespace {

// lets Adam drive the discriminator through the same visit() shape the
// model exposes
struct DiscVisitable {
  objectives::Discriminator<float>& d;
  template <typename F>
  void visit(F&& f) {
    d.visit("disc", std::forward<F>(f));
  }
};

void add_into(Tensor<float>& dst, const Tensor<float>& src) {
  if (!dst.same_shape(src)) throw std::logic_error("trainer: grad shape mismatch");
  for (size_t i = 0; i < dst.size(); ++i) dst.v[i] += src.v[i];
}

}  // namespace

void TrainConfig::validate() const {
  if (lambdas.empty()) throw std::invalid_argument("train: empty lambda grid");
  if (epochs <= 0 || batch <= 0 || crop <= 0)
    throw std::invalid_argument("train: counts must be positive");
  if (crop % 64 != 0)
    throw std::invalid_argument("train: crop must be a multiple of 64 (transform stride)");
  if (!(lr_end < lr_start)) throw std::invalid_argument("train: lr_end must be < lr_start");
  for (double l : lambdas)
    if (l < 0) throw std::invalid_argument("train: negative lambda");
}

Trainer::Trainer(const model::ModelConfig& mcfg, const TrainConfig& cfg, double lambda,
                 uint8_t lambda_index)
    : cfg_(cfg), lambda_(lambda), lambda_index_(lambda_index) {
  cfg_.validate();
  model_ = std::make_unique<model::CompressionModel<float>>(mcfg);
  model_->init(Rng::mix(cfg.seed, 0x10c0de + lambda_index));
  lpips_ = std::make_unique<objectives::LpipsExtractor<float>>();
  if (cfg.adversarial) {
    disc_ = std::make_unique<objectives::Discriminator<float>>(mcfg.m);
    Rng rng(Rng::mix(cfg.seed, 0xd15c0 + lambda_index));
    disc_->init(rng);
  }
}

Trainer Trainer::resume(const std::string& checkpoint_path, const TrainConfig& cfg) {
  model::Checkpoint ck = model::load_checkpoint(checkpoint_path);
  if (!ck.training)
    throw model::ModelError("checkpoint has no training state: " + checkpoint_path);
  Trainer t;
  t.cfg_ = cfg;
  t.cfg_.adversarial = ck.meta.adversarial;
  t.cfg_.seed = ck.meta.seed;
  t.lambda_ = ck.meta.lambda_value;
  t.lambda_index_ = ck.meta.lambda_index;
  t.step_ = ck.meta.step;
  t.model_ = std::move(ck.model);
  t.disc_ = std::move(ck.disc);
  t.lpips_ = std::make_unique<objectives::LpipsExtractor<float>>();
  t.opt_.t = ck.training->adam_t;
  for (auto& [k, v] : ck.training->adam_m)
    (k.rfind("disc.", 0) == 0 ? t.disc_opt_ : t.opt_).m[k] = v;
  for (auto& [k, v] : ck.training->adam_v)
    (k.rfind("disc.", 0) == 0 ? t.disc_opt_ : t.opt_).v[k] = v;
  t.disc_opt_.t = t.opt_.t;
  return t;
}

std::vector<Tensor<float>> Trainer::sample_batch(
    const std::vector<Tensor<float>>& corpus) const {
  uint64_t s = Rng::mix(Rng::mix(cfg_.seed, 0xba7c4 + lambda_index_), uint64_t(step_));
  return data::sample_crops(corpus, cfg_.crop, cfg_.batch, s);
}

StepMetrics Trainer::train_step(const std::vector<Tensor<float>>& batch,
                                int64_t total_steps) {
  StepMetrics mt;
  mt.step = step_;
  mt.lr = anneal_lr(std::min(step_, total_steps), total_steps, cfg_.lr_start, cfg_.lr_end);
  const int B = static_cast<int>(batch.size());
  if (B == 0) throw std::invalid_argument("train_step: empty batch");
  const double inv_b = 1.0 / B;
  const bool use_adv = cfg_.adversarial && cfg_.w_adversarial > 0.0 && disc_;

  model_->zero_grad();
  std::vector<Tensor<float>> recons, conds;

  for (int bi = 0; bi < B; ++bi) {
    const Tensor<float>& x = batch[bi];
    typename model::AnalysisTransform<float>::Trace ga_tr;
    Tensor<float> y = model_->ga.forward_cached(x, ga_tr);
    typename model::HyperAnalysis<float>::Trace ha_tr;
    Tensor<float> z = model_->ha.forward_cached(y, ha_tr);

    Rng noise(Rng::mix(Rng::mix(cfg_.seed, 0x4015e + lambda_index_),
                       Rng::mix(uint64_t(step_), uint64_t(bi))));
    Tensor<float> y_t = quant::add_uniform_noise(y, noise);
    Tensor<float> z_t = quant::add_uniform_noise(z, noise);

    entropy::RateTrace<float> rate_tr = entropy::rate_forward(*model_, y_t, z_t);
    typename model::SynthesisTransform<float>::Trace gs_tr;
    Tensor<float> recon = model_->gs.forward_cached(y_t, gs_tr);

    const double npix = double(x.h) * x.w;
    const double sample_mse = objectives::mse(x, recon);
    objectives::LpipsTrace<float> lp_tr;
    double sample_lpips = 0.0;
    if (cfg_.w_perceptual > 0.0)
      sample_lpips = objectives::lpips_forward(*lpips_, x, recon, lp_tr);
    double sample_adv = 0.0;
    typename objectives::Discriminator<float>::Trace d_tr;
    Tensor<float> dprob;
    if (use_adv) {
      dprob = disc_->forward_cached(recon, y_t, d_tr);
      sample_adv = objectives::neg_log_mean(dprob);
    }
    const double rate_bpp = rate_tr.bits() / npix;
    const double dr = cfg_.w_recon * sample_mse + cfg_.w_perceptual * sample_lpips +
                      cfg_.w_adversarial * sample_adv;
    if (!std::isfinite(rate_bpp) || !std::isfinite(dr)) {
      std::ostringstream os;
      os << "non-finite loss at step " << step_ << " sample " << bi << ": rate_bpp="
         << rate_bpp << " mse=" << sample_mse << " lpips=" << sample_lpips
         << " adv=" << sample_adv;
      throw std::runtime_error(os.str());
    }
    const double loss = objectives::rd_loss(rate_bpp, dr, lambda_);
    if (!std::isfinite(loss)) {
      std::ostringstream os;
      os << "non-finite loss at step " << step_ << " sample " << bi << ": rate_bpp="
         << rate_bpp << " mse=" << sample_mse << " lpips=" << sample_lpips
         << " adv=" << sample_adv;
      throw std::runtime_error(os.str());
    }
    mt.loss += loss * inv_b;
    mt.rate_bits += rate_tr.bits() * inv_b;
    mt.mse += sample_mse * inv_b;
    mt.lpips += sample_lpips * inv_b;
    mt.adv += sample_adv * inv_b;

    // distortion gradients into the reconstruction
    Tensor<float> gx =
        objectives::mse_backward_second(x, recon, lambda_ * cfg_.w_recon * inv_b);
    if (cfg_.w_perceptual > 0.0)
      add_into(gx, objectives::lpips_backward_second(*lpips_, lp_tr,
                                                     lambda_ * cfg_.w_perceptual * inv_b));
    if (use_adv) {
      Tensor<float> gprob = objectives::neg_log_mean_backward(
          dprob, lambda_ * cfg_.w_adversarial * inv_b);
      add_into(gx, disc_->backward(d_tr, gprob));
    }
    Tensor<float> gy = model_->gs.backward(gs_tr, gx);
    auto [gy_rate, gz] = entropy::rate_backward(*model_, rate_tr, inv_b / npix);
    add_into(gy, gy_rate);
    add_into(gy, model_->ha.backward(ha_tr, gz));
    model_->ga.backward(ga_tr, gy);

    if (use_adv) {
      recons.push_back(std::move(recon));
      conds.push_back(std::move(y_t));
    }
  }

  opt_.clip_global_norm(*model_, cfg_.clip_norm);
  opt_.step(*model_, mt.lr);

  if (use_adv) {
    // one discriminator update per generator update, on detached tensors
    disc_->zero_grad();
    for (int bi = 0; bi < B; ++bi) {
      typename objectives::Discriminator<float>::Trace tr_real, tr_fake;
      Tensor<float> p_real = disc_->forward_cached(batch[bi], conds[bi], tr_real);
      disc_->backward(tr_real, objectives::neg_log_mean_backward(p_real, inv_b));
      Tensor<float> p_fake = disc_->forward_cached(recons[bi], conds[bi], tr_fake);
      disc_->backward(tr_fake,
                      objectives::neg_log_one_minus_mean_backward(p_fake, inv_b));
    }
    DiscVisitable dv{*disc_};
    disc_opt_.clip_global_norm(dv, cfg_.clip_norm);
    disc_opt_.step(dv, mt.lr);
  }

  ++step_;
  return mt;
}

void Trainer::save(const std::string& path, bool with_training_state) {
  model::CheckpointMeta meta;
  meta.cfg = model_->cfg;
  meta.lambda_index = lambda_index_;
  meta.lambda_value = lambda_;
  meta.adversarial = cfg_.adversarial && disc_ != nullptr;
  meta.step = step_;
  meta.seed = cfg_.seed;
  model::TrainingState ts;
  if (with_training_state) {
    ts.adam_t = opt_.t;
    for (auto& [k, v] : opt_.m) ts.adam_m[k] = v;
    for (auto& [k, v] : opt_.v) ts.adam_v[k] = v;
    for (auto& [k, v] : disc_opt_.m) ts.adam_m[k] = v;
    for (auto& [k, v] : disc_opt_.v) ts.adam_v[k] = v;
  }
  model::save_checkpoint(path, *model_, meta, disc_.get(),
                         with_training_state ? &ts : nullptr);
}

TrainResult train(const TrainConfig& cfg, const std::vector<Tensor<float>>& corpus) {
  cfg.validate();
  if (corpus.empty()) throw std::invalid_argument("train: empty dataset");
  namespace fs = std::filesystem;
  model::ModelConfig mcfg = model::ModelConfig::preset(cfg.arch);
  const int spe = cfg.steps_per_epoch > 0
                      ? cfg.steps_per_epoch
                      : std::max<int>(1, int(corpus.size()) / cfg.batch);
  const int64_t total_steps = int64_t(spe) * cfg.epochs;

  TrainResult result;
  for (size_t li = 0; li < cfg.lambdas.size(); ++li) {
    Trainer trainer(mcfg, cfg, cfg.lambdas[li], uint8_t(li));
    fs::path run_dir = fs::path(cfg.out_dir) / ("lambda_" + std::to_string(li));
    fs::create_directories(run_dir);
    std::ofstream csv(run_dir / "metrics.csv");
    csv << "step,rate_bits,mse,lpips,adv,lr\n";
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (int s = 0; s < spe; ++s) {
        StepMetrics mt = trainer.train_step(trainer.sample_batch(corpus), total_steps);
        csv << mt.step << ',' << mt.rate_bits << ',' << mt.mse << ',' << mt.lpips << ','
            << mt.adv << ',' << mt.lr << '\n';
      }
      trainer.save((run_dir / ("ckpt_" + std::to_string(epoch) + ".snck")).string());
    }
    std::string final_path = (run_dir / "ckpt_final.snck").string();
    trainer.save(final_path);
    result.checkpoints.push_back(final_path);
  }
  return result;
}

}  // namespace snic::train
