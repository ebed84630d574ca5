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

#include "snic/model/checkpoint.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>

namespace snic::model {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'S', 'N', 'C', 'K'};
constexpr uint8_t kVersion = 1;

struct NamedTensor {
  std::string name;
  std::vector<int> shape;
  const std::vector<float>* data;
};

void write_u32(std::ostream& out, uint32_t v) {
  uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& in) {
  uint8_t b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) |
         (uint32_t(b[3]) << 24);
}

json config_json(const ModelConfig& c) {
  return json{{"n", c.n},           {"m", c.m},
              {"cz", c.cz},         {"num_slices", c.num_slices},
              {"window", c.window}, {"ca_reduction", c.ca_reduction}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.n = j.at("n");
  c.m = j.at("m");
  c.cz = j.at("cz");
  c.num_slices = j.at("num_slices");
  c.window = j.at("window");
  c.ca_reduction = j.at("ca_reduction");
  c.validate();
  return c;
}

void write_tensor(std::ostream& out, const std::string& name,
                  const std::vector<int>& shape, const std::vector<float>& data) {
  if (name.size() > 0xffff) throw ModelError("checkpoint: tensor name too long");
  uint16_t nl = static_cast<uint16_t>(name.size());
  out.put(char(nl & 0xff));
  out.put(char(nl >> 8));
  out.write(name.data(), nl);
  out.put(char(shape.size()));
  size_t expect = 1;
  for (int d : shape) {
    write_u32(out, static_cast<uint32_t>(d));
    expect *= size_t(d);
  }
  if (expect != data.size()) throw ModelError("checkpoint: shape/data mismatch for " + name);
  write_u32(out, static_cast<uint32_t>(data.size()));
  out.write(reinterpret_cast<const char*>(data.data()), data.size() * sizeof(float));
}

struct ReadTensor {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
};

ReadTensor read_tensor(std::istream& in) {
  ReadTensor t;
  int lo = in.get(), hi = in.get();
  if (lo < 0 || hi < 0) throw ModelError("checkpoint: truncated tensor header");
  t.name.resize(size_t(lo) | (size_t(hi) << 8));
  in.read(t.name.data(), t.name.size());
  int nd = in.get();
  if (nd < 0 || nd > 8) throw ModelError("checkpoint: bad tensor rank");
  t.shape.resize(nd);
  for (int i = 0; i < nd; ++i) t.shape[i] = static_cast<int>(read_u32(in));
  uint32_t count = read_u32(in);
  t.data.resize(count);
  in.read(reinterpret_cast<char*>(t.data.data()), size_t(count) * sizeof(float));
  if (!in) throw ModelError("checkpoint: truncated tensor data for " + t.name);
  return t;
}

}  // namespace

void save_checkpoint(const std::string& path, CompressionModel<float>& model,
                     const CheckpointMeta& meta, objectives::Discriminator<float>* disc,
                     const TrainingState* training) {
  std::vector<NamedTensor> tensors;
  std::vector<std::vector<int>> shapes;
  auto collect = [&](const std::string& name, std::vector<float>& w, std::vector<float>&,
                     std::vector<int> shape) {
    tensors.push_back({name, shape, &w});
  };
  model.visit(collect);
  if (disc) disc->visit("disc", collect);

  json manifest;
  manifest["config"] = config_json(model.cfg);
  manifest["lambda_index"] = meta.lambda_index;
  manifest["lambda_value"] = meta.lambda_value;
  manifest["adversarial"] = meta.adversarial;
  manifest["step"] = meta.step;
  manifest["seed"] = meta.seed;
  manifest["has_training_state"] = training != nullptr;
  json plan = json::array();
  for (const auto& t : tensors) plan.push_back(t.name);
  manifest["layer_plan"] = plan;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write checkpoint " + path);
  out.write(kMagic, 4);
  out.put(char(kVersion));
  out.put(char(0));
  out.put(char(0));
  out.put(char(0));
  std::string mstr = manifest.dump();
  write_u32(out, static_cast<uint32_t>(mstr.size()));
  out.write(mstr.data(), mstr.size());
  uint32_t count = static_cast<uint32_t>(tensors.size()) +
                   (training ? static_cast<uint32_t>(training->adam_m.size() +
                                                     training->adam_v.size() + 1)
                             : 0);
  write_u32(out, count);
  for (const auto& t : tensors) write_tensor(out, t.name, t.shape, *t.data);
  if (training) {
    std::vector<float> tval = {static_cast<float>(training->adam_t)};
    write_tensor(out, "#adam.t", {1}, tval);
    for (const auto& [k, v] : training->adam_m)
      write_tensor(out, "#adam.m:" + k, {int(v.size())}, v);
    for (const auto& [k, v] : training->adam_v)
      write_tensor(out, "#adam.v:" + k, {int(v.size())}, v);
  }
  if (!out) throw ModelError("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open checkpoint " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ModelError("not a checkpoint file: " + path);
  int version = in.get();
  in.get();
  in.get();
  in.get();
  if (version != kVersion)
    throw ModelError("unsupported checkpoint version in " + path);
  uint32_t mlen = read_u32(in);
  std::string mstr(mlen, '\0');
  in.read(mstr.data(), mlen);
  if (!in) throw ModelError("truncated checkpoint manifest in " + path);
  json manifest = json::parse(mstr);

  Checkpoint ck;
  ck.meta.cfg = config_from_json(manifest.at("config"));
  ck.meta.lambda_index = manifest.value("lambda_index", 0xff);
  ck.meta.lambda_value = manifest.value("lambda_value", 0.0);
  ck.meta.adversarial = manifest.value("adversarial", false);
  ck.meta.step = manifest.value("step", 0);
  ck.meta.seed = manifest.value("seed", 0);
  ck.model = std::make_unique<CompressionModel<float>>(ck.meta.cfg);
  if (ck.meta.adversarial)
    ck.disc = std::make_unique<objectives::Discriminator<float>>(ck.meta.cfg.m);

  uint32_t count = read_u32(in);
  std::map<std::string, ReadTensor> loaded;
  for (uint32_t i = 0; i < count; ++i) {
    ReadTensor t = read_tensor(in);
    loaded.emplace(t.name, std::move(t));
  }

  std::vector<std::string> plan;
  for (const auto& n : manifest.at("layer_plan")) plan.push_back(n.get<std::string>());
  size_t plan_i = 0;
  bool has_training = manifest.value("has_training_state", false);
  if (has_training) ck.training.emplace();

  auto fill = [&](const std::string& name, std::vector<float>& w, std::vector<float>&,
                  std::vector<int> shape) {
    if (plan_i >= plan.size() || plan[plan_i] != name)
      throw ModelError("checkpoint manifest mismatch at '" + name + "' in " + path);
    ++plan_i;
    auto it = loaded.find(name);
    if (it == loaded.end()) throw ModelError("checkpoint missing tensor " + name);
    size_t expect = 1;
    for (int d : shape) expect *= size_t(d);
    if (it->second.data.size() != expect || it->second.shape != shape)
      throw ModelError("checkpoint tensor shape mismatch for " + name);
    w = it->second.data;
    if (has_training) {
      auto m = loaded.find("#adam.m:" + name);
      auto v = loaded.find("#adam.v:" + name);
      if (m != loaded.end()) ck.training->adam_m[name] = m->second.data;
      if (v != loaded.end()) ck.training->adam_v[name] = v->second.data;
    }
  };
  ck.model->visit(fill);
  if (ck.disc) ck.disc->visit("disc", fill);
  if (plan_i != plan.size())
    throw ModelError("checkpoint layer plan does not match this build in " + path);
  if (has_training) {
    auto t = loaded.find("#adam.t");
    ck.training->adam_t = t != loaded.end() ? int64_t(t->second.data[0]) : 0;
  }
  return ck;
}

}  // namespace snic::model
