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

#include <gtest/gtest.h>

#include <cmath>

#include "eainterp/trainer.hpp"
#include "test_util.hpp"
#include "train_fixtures.hpp"

namespace eainterp {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::TempDir;
using testing::tiny_config;

TEST(ConfigTest, FormatParsesBack) {
  TrainConfig c = tiny_config("runs/x", 77);
  c.edge_mode = EdgeMode::kTwoStream;
  c.mode = TaskMode::kMultiFrame;
  c.attention = false;
  c.flow_form = FlowForm::kForwardLiteral;
  c.adversarial = AdversarialMode::kCrossEntropy;
  c.weights = {1.0, 0.5, 0.01};
  c.lr = 3.5e-4;
  c.canny.sigma = 0.7;
  c.train_root = "/data/with space";
  const TrainConfig d = parse_config_text(format_config(c));
  EXPECT_EQ(config_entries(c), config_entries(d));
  EXPECT_EQ(d.lr, 3.5e-4);
  EXPECT_EQ(d.seed, 77u);
  EXPECT_EQ(d.edge_mode, EdgeMode::kTwoStream);
  EXPECT_EQ(d.train_root, "/data/with space");
  EXPECT_EQ(config_hash(c), config_hash(d));
}

TEST(ConfigTest, TextSyntaxAndErrors) {
  const TrainConfig c = parse_config_text("# comment\n\n  lr = 0.002  # trailing\nedge_mode=concat\nepochs = 7\n");
  EXPECT_EQ(c.lr, 0.002);
  EXPECT_EQ(c.edge_mode, EdgeMode::kConcat);
  EXPECT_EQ(c.epochs, 7);
  EXPECT_THROW(parse_config_text("learning_rate = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("lr = fast\n"), ConfigError);
  EXPECT_THROW(parse_config_text("epochs = 3.5\n"), ConfigError);
  EXPECT_THROW(parse_config_text("lr 0.1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("edge_mode = sideways\n"), ConfigError);
  EXPECT_THROW(parse_config_text("flow_channels = 1,2,3\n").validate(), ConfigError);
  EXPECT_THROW(load_config_file("/nonexistent/cfg.txt"), ConfigError);
  TrainConfig base;
  base.batch_size = 3;
  EXPECT_EQ(parse_config_text("lr = 0.1\n", base).batch_size, 3);
}

TEST(ConfigTest, ValidateRejectsNonsense) {
  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  bad([](TrainConfig& c) { c.lr = 0; });
  bad([](TrainConfig& c) { c.epochs = 0; });
  bad([](TrainConfig& c) { c.batch_size = 0; });
  bad([](TrainConfig& c) { c.weights.adv = -1; });
  bad([](TrainConfig& c) { c.crop = 100; });
  bad([](TrainConfig& c) { c.canny.low = 0.5; });
  EXPECT_NO_THROW(TrainConfig{}.validate());
}

TEST(ConfigTest, HashCoversLayoutNotSchedule) {
  TrainConfig a, b;
  b.lr = 0.5;
  b.epochs = 3;
  b.seed = 9;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.edge_mode = EdgeMode::kPlain;
  EXPECT_NE(config_hash(a), config_hash(b));
  TrainConfig c;
  c.mode = TaskMode::kMultiFrame;
  EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(ScheduleTest, SingleMilestone) {
  const TrainConfig c;
  EXPECT_EQ(learning_rate(c, 0), 1e-4);
  EXPECT_EQ(learning_rate(c, 99), 1e-4);
  EXPECT_EQ(learning_rate(c, 100), 1e-5);
  EXPECT_EQ(learning_rate(c, 500), 1e-5);
  for (int e = 0; e < 600; ++e) EXPECT_EQ(learning_rate(c, e), e < 100 ? 1e-4 : 1e-5);
}

TEST(CheckpointTest, NamingConvention) {
  EXPECT_EQ(checkpoint_path("runs/a", 7), fs::path("runs/a/0007.ckpt"));
  EXPECT_EQ(checkpoint_path("r", 1234), fs::path("r/1234.ckpt"));
}

TEST(CheckpointTest, SaveLoadSaveIsByteIdentical) {
  TempDir dir("ckpt");
  const TrainConfig c = tiny_config(dir / "run");
  TrainingState a(c);
  // Give the optimizers non-trivial moments.
  for (auto* ps : {&a.g_params, &a.d_frame_params, &a.d_edge_params})
    for (const auto& p : ps->params) p.var->grad_buffer().fill(0.01f);
  a.opt_g.step();
  a.opt_d_frame->step();
  a.epoch = 3;
  a.step = 42;
  save_checkpoint(a, dir / "a.ckpt");
  const auto b = load_checkpoint(dir / "a.ckpt");
  EXPECT_EQ(b->epoch, 3);
  EXPECT_EQ(b->step, 42);
  save_checkpoint(*b, dir / "b.ckpt");
  EXPECT_EQ(read_file(dir / "a.ckpt"), read_file(dir / "b.ckpt"));
  for (std::size_t i = 0; i < a.g_params.params.size(); ++i) {
    const auto va = a.g_params.params[i].var->value.values(), vb = b->g_params.params[i].var->value.values();
    ASSERT_TRUE(std::equal(va.begin(), va.end(), vb.begin()));
  }
  EXPECT_TRUE(fs::exists(manifest_path(dir / "a.ckpt")));
  EXPECT_EQ(read_manifest(dir / "a.ckpt").seed, c.seed);
}

TEST(CheckpointTest, MismatchedConfigIsRejected) {
  TempDir dir("ckpt_mm");
  TrainConfig c = tiny_config(dir / "run");
  TrainingState a(c);
  save_checkpoint(a, dir / "a.ckpt");
  c.edge_mode = EdgeMode::kPlain;
  TrainingState other(c);
  EXPECT_THROW(load_checkpoint(other, dir / "a.ckpt"), CheckpointError);
  EXPECT_NO_THROW(load_checkpoint(other, dir / "a.ckpt", /*force=*/true));
  c.edge_mode = EdgeMode::kConcat;
  TrainingState concat(c);
  EXPECT_THROW(load_checkpoint(concat, dir / "a.ckpt", /*force=*/true), CheckpointError);
}

TEST(CheckpointTest, CorruptFilesAreRejected) {
  TempDir dir("ckpt_bad");
  TrainingState a(tiny_config(dir / "run"));
  save_checkpoint(a, dir / "a.ckpt");
  const std::string bytes = read_file(dir / "a.ckpt");
  std::ofstream(dir / "a.ckpt", std::ios::binary | std::ios::trunc) << bytes.substr(0, bytes.size() / 2);
  TrainingState b(tiny_config(dir / "run"));
  EXPECT_THROW(load_checkpoint(b, dir / "a.ckpt"), CheckpointError);
  std::ofstream(dir / "junk.ckpt", std::ios::binary) << "not a checkpoint at all";
  EXPECT_THROW(load_checkpoint(b, dir / "junk.ckpt"), CheckpointError);
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), CheckpointError);
}

TEST(TrainTest, DiscriminatorsOffNeverRun) {
  TempDir dir("train_nod");
  TrainConfig c = tiny_config(dir / "run");
  c.frame_discriminator = false;
  c.edge_discriminator = false;
  c.epochs = 2;
  std::vector<StepRecord> steps;
  TrainOptions opts;
  opts.on_step = [&](const StepRecord& s) { steps.push_back(s); };
  const auto r = train(c, testing::synthetic_dataset(), nullptr, opts);
  EXPECT_EQ(r.d_frame_calls, 0u);
  EXPECT_EQ(r.d_edge_calls, 0u);
  ASSERT_EQ(steps.size(), 2u);
  for (const auto& s : steps) {
    EXPECT_EQ(s.loss.parts.l_adv_frame, 0.0);
    EXPECT_EQ(s.loss.parts.l_adv_edge, 0.0);
    EXPECT_EQ(s.loss.total, s.loss.parts.l_syn + s.loss.parts.l_flow);
  }
  // Enabled discriminators do run.
  TrainConfig d = tiny_config(dir / "run2");
  d.epochs = 1;
  const auto r2 = train(d, testing::synthetic_dataset(), nullptr);
  EXPECT_GT(r2.d_frame_calls, 0u);
  EXPECT_GT(r2.d_edge_calls, 0u);
}

TEST(TrainTest, RunDirectoryLayout) {
  TempDir dir("train_layout");
  TrainConfig c = tiny_config(dir / "run");
  c.epochs = 3;
  c.validate_every = 2;
  const Dataset data = testing::synthetic_dataset();
  const auto r = train(c, data, &data);
  EXPECT_EQ(r.last_epoch, 2);
  EXPECT_EQ(r.steps, 3);
  for (int e = 0; e < 3; ++e) EXPECT_TRUE(fs::exists(checkpoint_path(dir / "run", e)));
  EXPECT_TRUE(fs::exists(dir / "run" / "config.txt"));
  std::istringstream csv(read_file(dir / "run" / "metrics.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, kMetricsHeader);
  std::vector<std::string> rows;
  while (std::getline(csv, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].substr(rows[0].size() - 2), ",,");  // no validation at epoch 0
  EXPECT_NE(rows[1].substr(rows[1].size() - 2), ",,");  // validate_every 2
  EXPECT_NE(rows[2].substr(rows[2].size() - 2), ",,");  // final epoch
  EXPECT_TRUE(r.last_val_psnr.has_value());
}

TEST(TrainTest, SmokeDescentOverSeeds) {
  TempDir dir("train_smoke");
  int passes = 0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    TrainConfig c = tiny_config(dir / ("s" + std::to_string(seed)), seed);
    c.epochs = 50;
    c.augment = false;
    c.checkpoint_every = 1000;
    c.weights.adv = testing::kToyAdversarialWeight;
    std::vector<double> totals;
    TrainOptions opts;
    opts.on_step = [&](const StepRecord& s) { totals.push_back(s.loss.total); };
    train(c, testing::synthetic_dataset(seed), nullptr, opts);
    ASSERT_EQ(totals.size(), 50u);
    passes += totals.back() < totals.front();
  }
  EXPECT_GE(passes, 2);
}

TEST(TrainTest, NonFiniteLossAbortsWithBatchIds) {
  TempDir dir("train_nan");
  auto samples = synthetic_translating_rectangles({.count = 2, .seed = 3});
  samples[1].id = "poisoned";
  samples[1].frames[1].values()[10] = std::nanf("");
  TrainConfig c = tiny_config(dir / "run");
  c.batch_size = 1;
  c.augment = false;
  try {
    train(c, Dataset(samples), nullptr);
    FAIL() << "expected an abort";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("poisoned"), std::string::npos) << e.what();
  }
  EXPECT_NE(read_file(dir / "run" / "nonfinite_batch.txt").find("poisoned"), std::string::npos);
}

TEST(TrainTest, EmptyTrainingSetIsAnError) {
  TempDir dir("train_empty");
  EXPECT_THROW(train(tiny_config(dir / "run"), Dataset{}, nullptr), TrainingError);
  TrainConfig c = tiny_config(dir / "run");
  c.train_root = (dir / "nothing").string();
  EXPECT_THROW(train(c), DataError);
}

TEST(TrainTest, SeededRunsAndResumeAreReproducible) {
  TempDir dir("train_det");
  TrainConfig a = tiny_config(dir / "a", 5);
  a.epochs = 4;
  TrainConfig b = a;
  b.run_dir = (dir / "b").string();
  const Dataset data = testing::synthetic_dataset(5);
  train(a, data, nullptr);
  train(b, data, nullptr);
  EXPECT_EQ(read_file(dir / "a" / "metrics.csv"), read_file(dir / "b" / "metrics.csv"));
  EXPECT_EQ(read_file(checkpoint_path(dir / "a", 3)), read_file(checkpoint_path(dir / "b", 3)));

  // Interrupt right after epoch 1 is written, then resume to the end.
  struct Interrupted {};
  TrainConfig first = a;
  first.run_dir = (dir / "c").string();
  TrainOptions stop_after_1;
  stop_after_1.on_epoch = [](const EpochRecord& e) {
    if (e.epoch == 1) throw Interrupted{};
  };
  EXPECT_THROW(train(first, data, nullptr, stop_after_1), Interrupted);
  EXPECT_FALSE(fs::exists(checkpoint_path(dir / "c", 2)));
  TrainConfig rest = first;
  rest.resume = checkpoint_path(dir / "c", 1).string();
  train(rest, data, nullptr);
  EXPECT_EQ(read_file(dir / "a" / "metrics.csv"), read_file(dir / "c" / "metrics.csv"));
  EXPECT_EQ(read_file(checkpoint_path(dir / "a", 3)), read_file(checkpoint_path(dir / "c", 3)));
}

TEST(EvaluateTest, SelfConsistencyHitsCap) {
  TempDir dir("eval_self");
  TrainingState st(tiny_config(dir / "run"));
  auto samples = synthetic_translating_rectangles({.count = 3, .seed = 4});
  for (auto& s : samples)
    s.frames[1] = quantize_frame(st.model.interpolate(s.first(), s.last(), TimePoint(0.5)).frame);
  const EvalReport r = evaluate(st.model, Dataset(samples));
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) EXPECT_EQ(row.psnr, 100.0) << row.id;
  EXPECT_EQ(r.mean_psnr, 100.0);
  EXPECT_NEAR(r.mean_ssim, 1.0, 1e-9);
}

TEST(EvaluateTest, ReportRowsAndErrors) {
  TempDir dir("eval_rep");
  TrainConfig c = tiny_config(dir / "run");
  TrainingState st(c);
  save_checkpoint(st, dir / "m.ckpt");
  const Dataset data = testing::synthetic_dataset(2, 5);
  const EvalReport r = evaluate(dir / "m.ckpt", data, TaskMode::kSingleFrame);
  write_report(r, dir / "out" / "report.csv");
  std::istringstream in(read_file(dir / "out" / "report.csv"));
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 1u + 5u + 1u);
  EXPECT_EQ(lines.front(), "id,psnr,ssim");
  EXPECT_EQ(lines.back().rfind("mean,", 0), 0u);
  EXPECT_THROW(evaluate(dir / "m.ckpt", data, TaskMode::kMultiFrame), CheckpointError);
  EXPECT_THROW(evaluate(st.model, Dataset{}), DataError);
}

TEST(EvaluateTest, MultiFrameAveragesTargets) {
  TempDir dir("eval_multi");
  TrainConfig c = tiny_config(dir / "run");
  c.mode = TaskMode::kMultiFrame;
  TrainingState st(c);
  const Dataset clips = testing::synthetic_dataset(1, 2, 9);
  const EvalReport r = evaluate(st.model, clips);
  ASSERT_EQ(r.rows.size(), 2u);
  const FrameSample s = clips.get(0);
  double mean = 0.0;
  for (int j = 0; j < 7; ++j)
    mean += psnr(quantize_frame(st.model.interpolate(s.first(), s.last(), TimePoint(s.t[j])).frame), s.target(j));
  EXPECT_NEAR(r.rows[0].psnr, mean / 7.0, 1e-9);
}

}  // namespace
}  // namespace eainterp
