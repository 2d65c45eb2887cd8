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

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "eainterp/trainer.hpp"

namespace eainterp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as " + expected);
}

template <class T>
T parse_number(const std::string& key, const std::string& value, const char* what) {
  T out{};
  const char* b = value.data();
  const char* e = b + value.size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || ptr != e) bad_value(key, value, what);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

std::vector<int> parse_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(key, trim(item), "a comma-separated integer list"));
  if (out.empty()) bad_value(key, value, "a comma-separated integer list");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

std::string fmt(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct Field {
  const char* name;
  bool hashed;
  std::function<std::string(const TrainConfig&)> get;
  std::function<void(TrainConfig&, const std::string&)> set;
};

#define EA_BOOL(key, member, hashed)                                              \
  Field{key, hashed, [](const TrainConfig& c) { return fmt(c.member); },         \
        [](TrainConfig& c, const std::string& v) { c.member = parse_bool(key, v); }}
#define EA_NUM(key, member, type, hashed)                                                \
  Field{key, hashed, [](const TrainConfig& c) { return fmt(static_cast<double>(c.member)); }, \
        [](TrainConfig& c, const std::string& v) { c.member = parse_number<type>(key, v, #type); }}
#define EA_INT(key, member, type, hashed)                                          \
  Field{key, hashed, [](const TrainConfig& c) { return std::to_string(c.member); }, \
        [](TrainConfig& c, const std::string& v) { c.member = parse_number<type>(key, v, "an integer"); }}
#define EA_STR(key, member)                                                  \
  Field{key, false, [](const TrainConfig& c) { return c.member; },           \
        [](TrainConfig& c, const std::string& v) { c.member = v; }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"mode", true, [](const TrainConfig& c) { return to_string(c.mode); },
            [](TrainConfig& c, const std::string& v) {
              try {
                c.mode = parse_task_mode(v);
              } catch (const std::invalid_argument&) {
                bad_value("mode", v, "single_frame or multi_frame");
              }
            }},
      Field{"edge_mode", true, [](const TrainConfig& c) { return to_string(c.edge_mode); },
            [](TrainConfig& c, const std::string& v) {
              try {
                c.edge_mode = parse_edge_mode(v);
              } catch (const std::invalid_argument&) {
                bad_value("edge_mode", v, "plain, augment, concat or two_stream");
              }
            }},
      EA_BOOL("refinement", refinement, true),
      EA_BOOL("attention", attention, true),
      EA_BOOL("frame_discriminator", frame_discriminator, true),
      EA_BOOL("edge_discriminator", edge_discriminator, true),
      EA_BOOL("residual_flows", residual_flows, true),
      Field{"flow_form", true,
            [](const TrainConfig& c) { return std::string(c.flow_form == FlowForm::kSymmetric ? "symmetric" : "forward"); },
            [](TrainConfig& c, const std::string& v) {
              if (v == "symmetric") c.flow_form = FlowForm::kSymmetric;
              else if (v == "forward") c.flow_form = FlowForm::kForwardLiteral;
              else bad_value("flow_form", v, "symmetric or forward");
            }},
      Field{"flow_channels", true, [](const TrainConfig& c) { return fmt(c.flow_channels); },
            [](TrainConfig& c, const std::string& v) { c.flow_channels = parse_list("flow_channels", v); }},
      Field{"refine_channels", true, [](const TrainConfig& c) { return fmt(c.refine_channels); },
            [](TrainConfig& c, const std::string& v) { c.refine_channels = parse_list("refine_channels", v); }},
      EA_INT("disc_channels", disc_channels, int, true),
      EA_NUM("leaky_slope", leaky_slope, double, true),
      EA_NUM("canny_low", canny.low, double, false),
      EA_NUM("canny_high", canny.high, double, false),
      EA_NUM("canny_sigma", canny.sigma, double, false),
      EA_NUM("lr", lr, double, false),
      EA_NUM("lr_decay", lr_decay, double, false),
      EA_INT("milestone", milestone, int, false),
      EA_INT("epochs", epochs, int, false),
      EA_INT("batch_size", batch_size, int, false),
      EA_INT("steps_per_epoch", steps_per_epoch, int, false),
      EA_INT("max_steps", max_steps, std::int64_t, false),
      EA_INT("seed", seed, std::uint64_t, false),
      EA_NUM("w_syn", weights.syn, double, false),
      EA_NUM("w_flow", weights.flow, double, false),
      EA_NUM("w_adv", weights.adv, double, false),
      Field{"adversarial", false,
            [](const TrainConfig& c) {
              return std::string(c.adversarial == AdversarialMode::kDifference ? "difference" : "bce");
            },
            [](TrainConfig& c, const std::string& v) {
              if (v == "difference") c.adversarial = AdversarialMode::kDifference;
              else if (v == "bce") c.adversarial = AdversarialMode::kCrossEntropy;
              else bad_value("adversarial", v, "difference or bce");
            }},
      EA_BOOL("augment", augment, false),
      EA_INT("crop", crop, int, false),
      EA_INT("clip_group", clip_group, int, false),
      EA_INT("validate_every", validate_every, int, false),
      EA_NUM("target_psnr", target_psnr, double, false),
      EA_INT("checkpoint_every", checkpoint_every, int, false),
      EA_STR("train_root", train_root),
      EA_STR("train_split", train_split),
      EA_STR("val_root", val_root),
      EA_STR("val_split", val_split),
      EA_STR("run_dir", run_dir),
      EA_STR("resume", resume),
  };
  return table;
}

#undef EA_BOOL
#undef EA_NUM
#undef EA_INT
#undef EA_STR

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(lr > 0.0)) fail("lr must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) fail("lr_decay must be in (0, 1]");
  if (milestone < 1) fail("milestone must be positive");
  if (epochs < 1) fail("epochs must be positive");
  if (batch_size < 1) fail("batch_size must be positive");
  if (steps_per_epoch < 0) fail("steps_per_epoch must be non-negative");
  if (max_steps < 0) fail("max_steps must be non-negative");
  if (weights.syn < 0.0 || weights.flow < 0.0 || weights.adv < 0.0) fail("loss weights must be non-negative");
  if (disc_channels < 1) fail("disc_channels must be positive");
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0)) fail("leaky_slope must be in [0, 1)");
  if (crop < 32 || crop % 32 != 0) fail("crop must be a positive multiple of 32");
  if (clip_group < 3) fail("clip_group must be at least 3");
  if (validate_every < 1) fail("validate_every must be positive");
  if (checkpoint_every < 1) fail("checkpoint_every must be positive");
  if (!(canny.low < canny.high) || !(canny.sigma > 0.0)) fail("canny thresholds need low < high and sigma > 0");
  if (run_dir.empty()) fail("run_dir must be set");
  try {
    model_config().flow.validate();
    FlowUNetConfig r;
    r.encoder_channels = refine_channels;
    r.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

ModelConfig TrainConfig::model_config() const {
  ModelConfig m;
  m.flow.input_mode = edge_mode;
  m.flow.encoder_channels = flow_channels;
  m.flow.leaky_slope = static_cast<float>(leaky_slope);
  m.refiner.channels = refine_channels;
  m.refiner.leaky_slope = static_cast<float>(leaky_slope);
  m.refiner.residual = residual_flows;
  m.refinement = refinement;
  m.attention = attention;
  m.flow_form = flow_form;
  m.canny = canny;
  return m;
}

std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.name, f.get(config));
  return out;
}

std::string format_config(const TrainConfig& config) {
  std::string s;
  for (const auto& [k, v] : config_entries(config)) s += k + " = " + v + "\n";
  return s;
}

void set_config_value(TrainConfig& config, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.name) {
      f.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

TrainConfig parse_config_text(const std::string& text, TrainConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

TrainConfig load_config_file(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::uint64_t config_hash(const TrainConfig& config) {
  // FNV-1a over the canonical rendering of the hashed fields
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& f : fields()) {
    if (!f.hashed) continue;
    for (char c : std::string(f.name) + "=" + f.get(config) + ";") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

double learning_rate(const TrainConfig& config, int epoch) {
  return epoch < config.milestone ? config.lr : config.lr * config.lr_decay;
}

}  // namespace eainterp
