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

#include "eainterp/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "eainterp/data.hpp"
#include "eainterp/flow_algebra.hpp"
#include "eainterp/imaging.hpp"
#include "eainterp/trainer.hpp"

namespace fs = std::filesystem;

namespace eainterp {

namespace {

// Raised for semantically invalid arguments that the parser cannot catch.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path with_suffix(const fs::path& base, const std::string& suffix, const std::string& ext) {
  fs::path p = base;
  const std::string stem = p.stem().string();
  p.replace_filename(stem + suffix + ext);
  return p;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("EA_INTERP_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long s = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return s;
  } catch (const std::exception&) {
    throw UsageError(std::string("EA_INTERP_SEED must be a non-negative integer, got '") + v + "'");
  }
}

struct TrainArgs {
  std::string config;
  std::vector<std::string> sets;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> run_dir;
  std::optional<std::string> train_root;
  std::optional<std::string> val_root;
  std::optional<std::string> edge_mode;
  std::optional<std::string> mode;
  std::optional<std::string> resume;
  std::optional<std::int64_t> max_steps;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  TrainConfig config;
  if (!a.config.empty()) {
    if (!fs::is_regular_file(a.config)) throw ConfigError("config file " + a.config + " not found");
    config = load_config_file(a.config);
  }
  if (const auto s = env_seed()) config.seed = *s;
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.epochs) config.epochs = *a.epochs;
  if (a.batch_size) config.batch_size = *a.batch_size;
  if (a.lr) config.lr = *a.lr;
  if (a.seed) config.seed = *a.seed;
  if (a.run_dir) config.run_dir = *a.run_dir;
  if (a.train_root) config.train_root = *a.train_root;
  if (a.val_root) config.val_root = *a.val_root;
  if (a.edge_mode) set_config_value(config, "edge_mode", *a.edge_mode);
  if (a.mode) set_config_value(config, "mode", *a.mode);
  if (a.resume) config.resume = *a.resume;
  if (a.max_steps) config.max_steps = *a.max_steps;
  config.validate();
  out << "# resolved config\n" << format_config(config);
  out.flush();
  TrainOptions opts;
  opts.log = &err;
  const TrainResult r = train(config, opts);
  out << "finished: " << r.steps << " steps, last epoch " << r.last_epoch << ", run " << r.run_dir.string() << "\n";
  return kExitOk;
}

struct InterpArgs {
  std::string frame0, frame1, checkpoint, out;
  std::optional<double> t;
  std::optional<int> factor;
  bool dump_flow = false;
  bool dump_attention = false;
};

void write_dumps(const Interpolation& r, const fs::path& base, bool flow, bool attention) {
  if (flow) {
    save_image(flow_to_color(r.f01), with_suffix(base, "_flow_01", ".png"));
    save_image(flow_to_color(r.f10), with_suffix(base, "_flow_10", ".png"));
    save_image(flow_to_color(r.to0), with_suffix(base, "_flow_t0", ".png"));
    save_image(flow_to_color(r.to1), with_suffix(base, "_flow_t1", ".png"));
  }
  if (attention) save_image(r.attention.a0, with_suffix(base, "_attention", ".png"));
}

int cmd_interp(const InterpArgs& a, std::ostream& out, std::ostream& err) {
  if (a.t && !(*a.t > 0.0 && *a.t < 1.0)) throw UsageError("--t must lie strictly between 0 and 1");
  if (a.factor && *a.factor < 2) throw UsageError("--factor must be at least 2");
  const Frame i0 = load_image(a.frame0);
  const Frame i1 = load_image(a.frame1);
  if (!same_extent(i0, i1)) throw std::runtime_error("input frames differ in size");
  const auto state = load_checkpoint(a.checkpoint);
  if (padded_extent(i0.height()) != i0.height() || padded_extent(i0.width()) != i0.width()) {
    err << "warning: " << i0.width() << "x" << i0.height() << " is not a multiple of 32; reflect-padding to "
        << padded_extent(i0.width()) << "x" << padded_extent(i0.height()) << " and cropping the output back\n";
  }
  if (a.t) {
    const fs::path dst(a.out);
    ensure_parent(dst);
    const Interpolation r = state->model.interpolate(i0, i1, TimePoint(*a.t));
    save_image(r.frame, dst);
    write_dumps(r, dst, a.dump_flow, a.dump_attention);
    out << "wrote " << dst.string() << "\n";
    return kExitOk;
  }
  const fs::path dir(a.out);
  fs::create_directories(dir);
  const int n = *a.factor;
  for (int i = 1; i < n; ++i) {
    const Interpolation r = state->model.interpolate(i0, i1, TimePoint(static_cast<double>(i) / n));
    const fs::path dst = dir / ("out_" + std::to_string(i) + ".png");
    save_image(r.frame, dst);
    write_dumps(r, dst, a.dump_flow, a.dump_attention);
  }
  out << "wrote " << (n - 1) << " frames to " << dir.string() << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string root, checkpoint, mode = "single_frame", report, split;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  TaskMode mode;
  try {
    mode = parse_task_mode(a.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::optional<fs::path> split;
  if (!a.split.empty()) split = a.split;
  Dataset data;
  try {
    data = Dataset::open(mode, a.root, split);
  } catch (const LayoutError& e) {
    throw UsageError(e.what());
  }
  const auto state = load_checkpoint(a.checkpoint);
  if (state->config.mode != mode) {
    throw UsageError("checkpoint was trained for " + to_string(state->config.mode) + ", --mode is " + a.mode);
  }
  const EvalReport report = evaluate(state->model, data);
  write_report(report, a.report);
  char line[96];
  std::snprintf(line, sizeof line, "PSNR=%.4f SSIM=%.4f", report.mean_psnr, report.mean_ssim);
  out << line << "\n";
  return kExitOk;
}

struct EdgeArgs {
  std::string in, out, method = "canny";
  CannyParams canny;
};

int cmd_edges(const EdgeArgs& a, std::ostream& out) {
  if (a.method == "canny" && !(a.canny.low < a.canny.high)) throw UsageError("--low must be below --high");
  if (a.method == "canny" && !(a.canny.sigma > 0.0)) throw UsageError("--sigma must be positive");
  const Frame img = load_image(a.in);
  const EdgeMap e = a.method == "canny" ? canny_edges(img, a.canny) : soft_edges(img);
  ensure_parent(a.out);
  save_image(e, a.out);
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

struct FlowArgs {
  std::string frame0, frame1, checkpoint, out_flo, out_viz;
};

int cmd_flow(const FlowArgs& a, std::ostream& out) {
  const Frame i0 = load_image(a.frame0);
  const Frame i1 = load_image(a.frame1);
  if (!same_extent(i0, i1)) throw std::runtime_error("input frames differ in size");
  const auto state = load_checkpoint(a.checkpoint);
  const Interpolation r = state->model.interpolate(i0, i1, TimePoint(0.5));
  const fs::path flo(a.out_flo);
  ensure_parent(flo);
  write_flo(r.f01, with_suffix(flo, "_01", ".flo"));
  write_flo(r.f10, with_suffix(flo, "_10", ".flo"));
  if (!a.out_viz.empty()) {
    const fs::path viz(a.out_viz);
    ensure_parent(viz);
    save_image(flow_to_color(r.f01), with_suffix(viz, "_01", ".png"));
    save_image(flow_to_color(r.f10), with_suffix(viz, "_10", ".png"));
  }
  out << "wrote " << with_suffix(flo, "_01", ".flo").string() << " and " << with_suffix(flo, "_10", ".flo").string()
      << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string out;
  SyntheticConfig config;
  std::optional<std::uint64_t> seed;
};

int cmd_synth(SynthArgs a, std::ostream& out) {
  if (const auto s = env_seed()) a.config.seed = *s;
  if (a.seed) a.config.seed = *a.seed;
  write_samples(synthetic_translating_rectangles(a.config), a.out);
  out << "wrote " << a.config.count << " samples to " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Edge-aware video frame interpolation", "ea-interp"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a key = value config file");
  train_cmd->add_option("--config", ta.config, "Config file (key = value lines)");
  train_cmd->add_option("--set", ta.sets, "Override any config key: key=value (repeatable)");
  train_cmd->add_option("--epochs", ta.epochs, "Number of epochs");
  train_cmd->add_option("--batch-size", ta.batch_size, "Batch size");
  train_cmd->add_option("--lr", ta.lr, "Initial learning rate");
  train_cmd->add_option("--seed", ta.seed, "Seed (overrides EA_INTERP_SEED)");
  train_cmd->add_option("--run-dir", ta.run_dir, "Output directory for checkpoints and metrics");
  train_cmd->add_option("--train-root", ta.train_root, "Training dataset root");
  train_cmd->add_option("--val-root", ta.val_root, "Validation dataset root");
  train_cmd->add_option("--edge-mode", ta.edge_mode, "plain, augment, concat or two_stream");
  train_cmd->add_option("--mode", ta.mode, "single_frame or multi_frame");
  train_cmd->add_option("--resume", ta.resume, "Checkpoint to continue from");
  train_cmd->add_option("--max-steps", ta.max_steps, "Stop after this many generator steps");

  InterpArgs ia;
  auto* interp_cmd = app.add_subcommand("interp", "Synthesize intermediate frames");
  interp_cmd->add_option("--frame0", ia.frame0, "First input frame")->required();
  interp_cmd->add_option("--frame1", ia.frame1, "Second input frame")->required();
  interp_cmd->add_option("--checkpoint", ia.checkpoint, "Model checkpoint")->required();
  auto* t_opt = interp_cmd->add_option("--t", ia.t, "Time in (0, 1); --out is the output image");
  auto* f_opt = interp_cmd->add_option("--factor", ia.factor, "Write N-1 frames at t = i/N into directory --out");
  t_opt->excludes(f_opt);
  interp_cmd->add_option("--out", ia.out, "Output image (--t) or directory (--factor)")->required();
  interp_cmd->add_flag("--dump-flow", ia.dump_flow, "Also write colour-coded flows next to each output");
  interp_cmd->add_flag("--dump-attention", ia.dump_attention, "Also write the attention map A0 next to each output");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a dataset (PSNR/SSIM)");
  eval_cmd->add_option("--dataset-root", ea.root, "Dataset root")->required();
  eval_cmd->add_option("--checkpoint", ea.checkpoint, "Model checkpoint")->required();
  eval_cmd->add_option("--mode", ea.mode, "single_frame or multi_frame");
  eval_cmd->add_option("--report", ea.report, "CSV report path")->required();
  eval_cmd->add_option("--split", ea.split, "Split file listing sequence paths");

  EdgeArgs ga;
  auto* edges_cmd = app.add_subcommand("edges", "Extract an edge map");
  edges_cmd->add_option("--in", ga.in, "Input image")->required();
  edges_cmd->add_option("--out", ga.out, "Output PNG")->required();
  edges_cmd->add_option("--method", ga.method, "canny or sobel")->check(CLI::IsMember({"canny", "sobel"}));
  edges_cmd->add_option("--low", ga.canny.low, "Canny low threshold on the gradient magnitude");
  edges_cmd->add_option("--high", ga.canny.high, "Canny high threshold");
  edges_cmd->add_option("--sigma", ga.canny.sigma, "Gaussian smoothing sigma");

  FlowArgs fa;
  auto* flow_cmd = app.add_subcommand("flow", "Estimate bidirectional flow");
  flow_cmd->add_option("--frame0", fa.frame0, "First input frame")->required();
  flow_cmd->add_option("--frame1", fa.frame1, "Second input frame")->required();
  flow_cmd->add_option("--checkpoint", fa.checkpoint, "Model checkpoint")->required();
  flow_cmd->add_option("--out-flo", fa.out_flo, "Base .flo path; writes <stem>_01.flo and <stem>_10.flo")->required();
  flow_cmd->add_option("--out-viz", fa.out_viz, "Base .png path for colour-coded flows");

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Write synthetic translating-rectangle samples");
  synth_cmd->add_option("--out", sa.out, "Output dataset root")->required();
  synth_cmd->add_option("--count", sa.config.count, "Number of samples");
  synth_cmd->add_option("--height", sa.config.height, "Frame height");
  synth_cmd->add_option("--width", sa.config.width, "Frame width");
  synth_cmd->add_option("--frames", sa.config.frames, "Frames per sample (3 writes triplets)");
  synth_cmd->add_option("--seed", sa.seed, "Generator seed (overrides EA_INTERP_SEED)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help requests exit 0; everything else the parser rejects is a usage error.
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(ta, out, err);
    if (interp_cmd->parsed()) {
      if (!ia.t && !ia.factor) throw UsageError("one of --t or --factor is required");
      return cmd_interp(ia, out, err);
    }
    if (eval_cmd->parsed()) return cmd_eval(ea, out);
    if (edges_cmd->parsed()) return cmd_edges(ga, out);
    if (flow_cmd->parsed()) return cmd_flow(fa, out);
    if (synth_cmd->parsed()) return cmd_synth(sa, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace eainterp
