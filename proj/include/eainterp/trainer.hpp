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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eainterp/data.hpp"
#include "eainterp/nn/adam.hpp"
#include "eainterp/objective.hpp"
#include "eainterp/pipeline.hpp"

namespace eainterp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  TaskMode mode = TaskMode::kSingleFrame;
  EdgeMode edge_mode = EdgeMode::kAugment;
  bool refinement = true;
  bool attention = true;
  bool frame_discriminator = true;
  bool edge_discriminator = true;
  bool residual_flows = true;
  FlowForm flow_form = FlowForm::kSymmetric;
  std::vector<int> flow_channels{32, 64, 128, 256, 512, 512};
  std::vector<int> refine_channels{32, 64, 128, 256, 512, 512};
  int disc_channels = 64;
  double leaky_slope = 0.1;
  CannyParams canny;

  double lr = 1e-4;
  double lr_decay = 0.1;
  int milestone = 100;
  int epochs = 500;
  int batch_size = 8;
  // 0: one pass over the training set per epoch.
  int steps_per_epoch = 0;
  // 0: no limit on generator steps.
  std::int64_t max_steps = 0;
  std::uint64_t seed = 0;
  LossWeights weights;
  AdversarialMode adversarial = AdversarialMode::kDifference;

  bool augment = true;
  int crop = 256;
  int clip_group = 9;

  int validate_every = 5;
  // Stop once validation PSNR reaches this value; 0 disables.
  double target_psnr = 0.0;
  int checkpoint_every = 1;

  std::string train_root;
  std::string train_split;
  std::string val_root;
  std::string val_split;
  std::string run_dir = "runs/default";
  // Checkpoint to continue from.
  std::string resume;

  void validate() const;
  ModelConfig model_config() const;
};

// Ordered key = value rendering of every field; parse_config_text accepts it back.
std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& config);
std::string format_config(const TrainConfig& config);
// Applies one key = value pair; unknown keys and malformed values throw ConfigError.
void set_config_value(TrainConfig& config, const std::string& key, const std::string& value);
// Lines of "key = value"; '#' starts a comment.
TrainConfig parse_config_text(const std::string& text, TrainConfig base = {});
TrainConfig load_config_file(const std::filesystem::path& path, TrainConfig base = {});

// Hash of the fields that determine the parameter layout and the task.
std::uint64_t config_hash(const TrainConfig& config);

// lr for epoch < milestone, lr * lr_decay from the milestone on.
double learning_rate(const TrainConfig& config, int epoch);

// Models and optimizer state of a run. Not movable: the optimizers refer
// to the parameters of the models they update.
struct TrainingState {
  explicit TrainingState(const TrainConfig& config);
  TrainingState(const TrainingState&) = delete;
  TrainingState& operator=(const TrainingState&) = delete;

  TrainConfig config;
  Interpolator model;
  std::optional<Discriminator> d_frame;
  std::optional<Discriminator> d_edge;
  nn::ParameterSet g_params;
  nn::ParameterSet d_frame_params;
  nn::ParameterSet d_edge_params;
  nn::Adam opt_g;
  std::optional<nn::Adam> opt_d_frame;
  std::optional<nn::Adam> opt_d_edge;
  // Last completed epoch, -1 before training.
  int epoch = -1;
  std::int64_t step = 0;
};

std::filesystem::path checkpoint_path(const std::filesystem::path& run_dir, int epoch);
std::filesystem::path manifest_path(const std::filesystem::path& checkpoint);

// Binary parameter/moment blob plus a plain-text manifest beside it.
void save_checkpoint(const TrainingState& state, const std::filesystem::path& path);
// Restores into a state built from a compatible config; a config hash
// mismatch throws CheckpointError unless force is set.
void load_checkpoint(TrainingState& state, const std::filesystem::path& path, bool force = false);
// Rebuilds the state from the manifest, then loads the blob.
std::unique_ptr<TrainingState> load_checkpoint(const std::filesystem::path& path);
TrainConfig read_manifest(const std::filesystem::path& checkpoint);

struct StepRecord {
  int epoch = 0;
  std::int64_t step = 0;
  LossReport loss;
  std::vector<std::string> batch_ids;
};

struct EpochRecord {
  int epoch = 0;
  LossParts mean;
  double total = 0.0;
  std::optional<double> val_psnr;
  std::optional<double> val_ssim;
};

struct TrainOptions {
  std::function<void(const StepRecord&)> on_step;
  std::function<void(const EpochRecord&)> on_epoch;
  std::ostream* log = nullptr;
};

struct TrainResult {
  std::filesystem::path run_dir;
  int last_epoch = -1;
  std::int64_t steps = 0;
  bool reached_target = false;
  std::optional<double> last_val_psnr;
  std::uint64_t d_frame_calls = 0;
  std::uint64_t d_edge_calls = 0;
};

inline constexpr const char* kMetricsHeader =
    "epoch,l_syn,l_flow,l_adv_frame,l_adv_edge,total,val_psnr,val_ssim";

TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset* val_set,
                  const TrainOptions& options = {});
// Opens train_root (and val_root when set) in the configured task layout.
TrainResult train(const TrainConfig& config, const TrainOptions& options = {});

struct EvalRow {
  std::string id;
  double psnr = 0.0;
  double ssim = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
};

// Predictions are quantized to 8 bits before scoring, as if written to PNG.
// Multi-frame rows average over every target of the clip.
EvalReport evaluate(const Interpolator& model, const Dataset& dataset);
// Loads the checkpoint and checks that its task mode matches mode.
EvalReport evaluate(const std::filesystem::path& checkpoint, const Dataset& dataset, TaskMode mode);
// Header id,psnr,ssim; one row per sample and a final "mean" row.
void write_report(const EvalReport& report, const std::filesystem::path& path);

Frame quantize_frame(const Frame& frame);

}  // namespace eainterp
