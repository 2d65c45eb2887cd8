// Copyright 2026 The EA-Interp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <sstream>

#include "eainterp/nn/serialize.hpp"
#include "eainterp/trainer.hpp"

namespace fs = std::filesystem;

namespace eainterp {

namespace {

constexpr char kMagic[8] = {'E', 'A', 'I', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

nn::ParameterSet collect_discriminator(Discriminator& d, const std::string& prefix) {
  nn::ParameterSet s;
  d.collect(prefix, s);
  return s;
}

void write_set(std::ostream& out, const nn::ParameterSet& set) {
  nn::io::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(set.params.size()));
  for (const auto& p : set.params) {
    nn::io::write_string(out, p.name);
    nn::io::write_tensor(out, p.var->value);
  }
  nn::io::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(set.buffers.size()));
  for (const auto& b : set.buffers) {
    nn::io::write_string(out, b.name);
    nn::io::write_tensor(out, *b.tensor);
  }
}

void read_into(nn::Tensor& dst, const std::string& expected, std::istream& in) {
  const std::string name = nn::io::read_string(in);
  if (name != expected) throw CheckpointError("checkpoint holds '" + name + "' where '" + expected + "' was expected");
  nn::Tensor t = nn::io::read_tensor(in);
  if (!(t.shape() == dst.shape())) {
    throw CheckpointError("shape mismatch for '" + name + "': checkpoint " + t.shape().str() + ", model " + dst.shape().str());
  }
  dst = std::move(t);
}

void read_set(std::istream& in, const nn::ParameterSet& set) {
  if (nn::io::read_pod<std::uint32_t>(in) != set.params.size()) throw CheckpointError("parameter count mismatch");
  for (const auto& p : set.params) read_into(p.var->value, p.name, in);
  if (nn::io::read_pod<std::uint32_t>(in) != set.buffers.size()) throw CheckpointError("buffer count mismatch");
  for (const auto& b : set.buffers) read_into(*b.tensor, b.name, in);
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

const TrainConfig& checked(const TrainConfig& config) {
  config.validate();
  return config;
}

}  // namespace

TrainingState::TrainingState(const TrainConfig& cfg)
    : config(checked(cfg)), model(config.model_config(), config.seed) {
  g_params = model.parameters();
  const DiscriminatorConfig dc{config.disc_channels, static_cast<float>(config.leaky_slope)};
  nn::AdamConfig ac;
  ac.lr = static_cast<float>(learning_rate(config, 0));
  opt_g = nn::Adam(g_params, ac);
  if (config.frame_discriminator) {
    d_frame.emplace(DiscriminatorKind::kFrame, dc, derive_seed(config.seed, 2));
    d_frame_params = collect_discriminator(*d_frame, "d_frame");
    opt_d_frame.emplace(d_frame_params, ac);
  }
  if (config.edge_discriminator) {
    d_edge.emplace(DiscriminatorKind::kEdge, dc, derive_seed(config.seed, 3));
    d_edge_params = collect_discriminator(*d_edge, "d_edge");
    opt_d_edge.emplace(d_edge_params, ac);
  }
}

fs::path checkpoint_path(const fs::path& run_dir, int epoch) {
  char name[32];
  std::snprintf(name, sizeof name, "%04d.ckpt", epoch);
  return run_dir / name;
}

fs::path manifest_path(const fs::path& checkpoint) {
  fs::path p = checkpoint;
  p.replace_extension(".manifest");
  return p;
}

void save_checkpoint(const TrainingState& state, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
    out.write(kMagic, sizeof kMagic);
    nn::io::write_pod(out, kVersion);
    nn::io::write_pod<std::uint64_t>(out, config_hash(state.config));
    nn::io::write_pod<std::int32_t>(out, state.epoch);
    nn::io::write_pod<std::int64_t>(out, state.step);
    nn::io::write_pod<std::uint64_t>(out, state.config.seed);
    write_set(out, state.g_params);
    nn::io::write_pod<std::uint8_t>(out, state.d_frame ? 1 : 0);
    if (state.d_frame) write_set(out, state.d_frame_params);
    nn::io::write_pod<std::uint8_t>(out, state.d_edge ? 1 : 0);
    if (state.d_edge) write_set(out, state.d_edge_params);
    state.opt_g.save(out);
    if (state.opt_d_frame) state.opt_d_frame->save(out);
    if (state.opt_d_edge) state.opt_d_edge->save(out);
    out.write(kMagic, sizeof kMagic);
    if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
  }
  std::ofstream man(manifest_path(path), std::ios::trunc);
  if (!man) throw CheckpointError("cannot write manifest for " + path.string());
  man << "# ea-interp checkpoint manifest\n";
  man << "epoch = " << state.epoch << "\n";
  man << "step = " << state.step << "\n";
  man << "config_hash = " << hex(config_hash(state.config)) << "\n";
  man << format_config(state.config);
}

TrainConfig read_manifest(const fs::path& checkpoint) {
  const fs::path mp = manifest_path(checkpoint);
  std::ifstream in(mp);
  if (!in) throw CheckpointError("missing manifest " + mp.string());
  std::stringstream ss;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    const std::string key = eq == std::string::npos ? "" : line.substr(0, line.find_last_not_of(" \t", eq - 1) + 1);
    if (key == "epoch" || key == "step" || key == "config_hash") continue;
    ss << line << "\n";
  }
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw CheckpointError("corrupt manifest " + mp.string() + ": " + e.what());
  }
}

void load_checkpoint(TrainingState& state, const fs::path& path, bool force) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read checkpoint " + path.string());
  try {
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || !std::equal(magic, magic + 8, kMagic)) throw CheckpointError("not a checkpoint file");
    if (nn::io::read_pod<std::uint32_t>(in) != kVersion) throw CheckpointError("unsupported checkpoint version");
    const auto hash = nn::io::read_pod<std::uint64_t>(in);
    if (!force && hash != config_hash(state.config)) {
      throw CheckpointError("config hash mismatch (checkpoint " + hex(hash) + ", current config " +
                            hex(config_hash(state.config)) + "); model settings differ");
    }
    const int epoch = nn::io::read_pod<std::int32_t>(in);
    const auto step = nn::io::read_pod<std::int64_t>(in);
    nn::io::read_pod<std::uint64_t>(in);
    read_set(in, state.g_params);
    if ((nn::io::read_pod<std::uint8_t>(in) != 0) != state.d_frame.has_value()) {
      throw CheckpointError("frame discriminator presence differs");
    }
    if (state.d_frame) read_set(in, state.d_frame_params);
    if ((nn::io::read_pod<std::uint8_t>(in) != 0) != state.d_edge.has_value()) {
      throw CheckpointError("edge discriminator presence differs");
    }
    if (state.d_edge) read_set(in, state.d_edge_params);
    state.opt_g.load(in);
    if (state.opt_d_frame) state.opt_d_frame->load(in);
    if (state.opt_d_edge) state.opt_d_edge->load(in);
    char tail[8];
    in.read(tail, sizeof tail);
    if (!in || !std::equal(tail, tail + 8, kMagic)) throw CheckpointError("checkpoint trailer missing");
    state.epoch = epoch;
    state.step = step;
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw CheckpointError(path.string() + ": corrupt checkpoint (" + e.what() + ")");
  }
}

std::unique_ptr<TrainingState> load_checkpoint(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw CheckpointError("checkpoint " + path.string() + " not found");
  TrainConfig config = read_manifest(path);
  std::unique_ptr<TrainingState> state;
  try {
    state = std::make_unique<TrainingState>(config);
  } catch (const ConfigError& e) {
    throw CheckpointError("manifest of " + path.string() + " holds an invalid config: " + e.what());
  }
  load_checkpoint(*state, path, false);
  return state;
}

}  // namespace eainterp
