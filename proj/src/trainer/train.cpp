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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "eainterp/nn/ops.hpp"
#include "eainterp/tensor_bridge.hpp"
#include "eainterp/trainer.hpp"

namespace fs = std::filesystem;

namespace eainterp {

using nn::Var;

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? ", " : "") + ids[i];
  return s;
}

double scalar(const Var& v) { return static_cast<double>(v->value.data()[0]); }

// Generator term for one discriminator given its scores on the fakes.
Var generator_term(const Var& fake_scores, AdversarialMode mode) {
  if (mode == AdversarialMode::kDifference) return nn::scale(nn::mean(fake_scores), -1.0f);
  return nn::scale(nn::mean(nn::log(nn::clamp(fake_scores, 1e-7f, 1.0f))), -1.0f);
}

Var discriminator_loss(const Var& real_scores, const Var& fake_scores, AdversarialMode mode) {
  if (mode == AdversarialMode::kDifference) return nn::sub(nn::mean(fake_scores), nn::mean(real_scores));
  const Var one_minus_fake = nn::add_scalar(nn::scale(fake_scores, -1.0f), 1.0f);
  return nn::scale(nn::add(nn::mean(nn::log(nn::clamp(real_scores, 1e-7f, 1.0f))),
                           nn::mean(nn::log(nn::clamp(one_minus_fake, 1e-7f, 1.0f)))),
                   -1.0f);
}

class RunLog {
 public:
  RunLog(const TrainConfig& config, std::ostream* log) : config_(config), log_(log) {}

  template <class... Args>
  void line(const Args&... args) const {
    if (!log_) return;
    std::ostringstream ss;
    (ss << ... << args);
    *log_ << ss.str() << "\n";
    log_->flush();
  }

 private:
  const TrainConfig& config_;
  std::ostream* log_;
};

[[noreturn]] void abort_nonfinite(const TrainConfig& config, int epoch, std::int64_t step,
                                  const std::vector<std::string>& ids, const char* what) {
  const std::string msg = std::string("non-finite ") + what + " at epoch " + std::to_string(epoch) +
                          ", step " + std::to_string(step) + "; batch: " + join_ids(ids);
  std::ofstream dump(fs::path(config.run_dir) / "nonfinite_batch.txt", std::ios::trunc);
  if (dump) {
    dump << "epoch = " << epoch << "\nstep = " << step << "\n";
    for (const auto& id : ids) dump << id << "\n";
  }
  throw TrainingError(msg);
}

struct BatchFrames {
  std::vector<Frame> i0, i1, gt;
  std::vector<float> t;
  std::vector<std::string> ids;
};

FrameSample prepare(const FrameSample& s, const TrainConfig& config, std::mt19937_64& rng) {
  if (config.augment) return augment(s, rng, config.crop);
  const int h = s.first().height();
  const int w = s.first().width();
  const int ch = std::min(config.crop, h / 32 * 32);
  const int cw = std::min(config.crop, w / 32 * 32);
  return crop_sample(s, (h - ch) / 2, (w - cw) / 2, ch, cw);
}

BatchFrames build_batch(const Dataset& data, const std::vector<std::size_t>& indices,
                        const TrainConfig& config, std::mt19937_64& rng) {
  BatchFrames b;
  for (std::size_t idx : indices) {
    const FrameSample s = prepare(data.get(idx), config, rng);
    if (s.targets() < 1) throw TrainingError("sample " + s.id + " has no target frame");
    const int j = s.targets() > 1 ? static_cast<int>(rng() % static_cast<std::uint64_t>(s.targets())) : 0;
    if (!b.i0.empty() && !same_extent(s.first(), b.i0.front())) {
      throw TrainingError("sample " + s.id + " has a different size from the rest of its batch");
    }
    b.i0.push_back(s.first());
    b.i1.push_back(s.last());
    b.gt.push_back(s.target(j));
    b.t.push_back(s.t[static_cast<std::size_t>(j)]);
    b.ids.push_back(s.id);
  }
  return b;
}

// Sample order for one epoch: successive seeded permutations of the whole set.
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, const TrainConfig& config,
                                                    std::mt19937_64& rng) {
  const std::size_t bs = static_cast<std::size_t>(config.batch_size);
  const std::size_t steps = config.steps_per_epoch > 0 ? static_cast<std::size_t>(config.steps_per_epoch)
                                                       : (n + bs - 1) / bs;
  std::vector<std::size_t> stream;
  const std::size_t needed = config.steps_per_epoch > 0 ? steps * bs : n;
  while (stream.size() < needed) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
    stream.insert(stream.end(), perm.begin(), perm.end());
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t b = s * bs;
    const std::size_t e = std::min(b + bs, needed);
    if (b >= e) break;
    batches.emplace_back(stream.begin() + static_cast<std::ptrdiff_t>(b), stream.begin() + static_cast<std::ptrdiff_t>(e));
  }
  return batches;
}

StepRecord train_step(TrainingState& st, const BatchFrames& frames, int epoch) {
  const TrainConfig& cfg = st.config;
  const LossWeights& w = cfg.weights;
  const PipelineBatch batch = make_batch(st.model.config(), frames.i0, frames.i1, frames.t);
  const Var gt = nn::constant(stack<3>(std::span<const Frame>(frames.gt)));
  const PipelineOutput out = st.model.forward(batch);

  const Var l_syn = synthesis_loss(out.frame, gt);
  const Var l_flow = flow_loss(batch.i0, batch.i1, out.f01, out.f10);
  Var g_loss = nn::add(nn::scale(l_syn, static_cast<float>(w.syn)), nn::scale(l_flow, static_cast<float>(w.flow)));
  std::vector<Var> gen_terms;
  if (st.d_frame) {
    st.d_frame_params.set_requires_grad(false);
    gen_terms.push_back(generator_term(st.d_frame->forward(out.frame, true), cfg.adversarial));
  }
  if (st.d_edge) {
    st.d_edge_params.set_requires_grad(false);
    gen_terms.push_back(generator_term(st.d_edge->forward(nn::soft_edges(out.frame), true), cfg.adversarial));
  }
  for (const Var& g : gen_terms) g_loss = nn::add(g_loss, nn::scale(g, static_cast<float>(w.adv)));
  if (!std::isfinite(scalar(g_loss))) abort_nonfinite(cfg, epoch, st.step, frames.ids, "generator loss");
  nn::backward(g_loss);
  st.opt_g.step();
  st.opt_g.zero_grad();

  StepRecord rec;
  rec.epoch = epoch;
  rec.step = st.step;
  rec.batch_ids = frames.ids;
  LossParts parts;
  parts.l_syn = scalar(l_syn);
  parts.l_flow = scalar(l_flow);

  const Var fake = nn::constant(out.frame->value);
  auto d_step = [&](Discriminator& d, const nn::ParameterSet& params, nn::Adam& opt, const Var& real_in,
                    const Var& fake_in) {
    params.set_requires_grad(true);
    params.zero_grad();
    const Var sr = d.forward(real_in, true);
    const Var sf = d.forward(fake_in, true);
    const Var loss = discriminator_loss(sr, sf, cfg.adversarial);
    if (!std::isfinite(scalar(loss))) abort_nonfinite(cfg, epoch, st.step, frames.ids, "discriminator loss");
    const double value = scalar(nn::mean(sr)) - scalar(nn::mean(sf));
    nn::backward(loss);
    opt.step();
    opt.zero_grad();
    return value;
  };
  if (st.d_frame) parts.l_adv_frame = d_step(*st.d_frame, st.d_frame_params, *st.opt_d_frame, gt, fake);
  if (st.d_edge) {
    parts.l_adv_edge = d_step(*st.d_edge, st.d_edge_params, *st.opt_d_edge, nn::soft_edges(gt), nn::soft_edges(fake));
  }
  rec.loss = total_loss(parts, w);
  if (!std::isfinite(rec.loss.total)) abort_nonfinite(cfg, epoch, st.step, frames.ids, "loss");
  ++st.step;
  return rec;
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string metrics_row(const EpochRecord& r) {
  std::string s = std::to_string(r.epoch);
  for (double v : {r.mean.l_syn, r.mean.l_flow, r.mean.l_adv_frame, r.mean.l_adv_edge, r.total}) s += "," + csv_number(v);
  s += "," + (r.val_psnr ? csv_number(*r.val_psnr) : std::string());
  s += "," + (r.val_ssim ? csv_number(*r.val_ssim) : std::string());
  return s;
}

// Keeps the header and rows of epochs up to last_epoch.
void rewrite_metrics(const fs::path& path, int last_epoch) {
  std::vector<std::string> keep{kMetricsHeader};
  std::ifstream in(path);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    if (std::stoi(line.substr(0, line.find(','))) <= last_epoch) keep.push_back(line);
  }
  in.close();
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : keep) out << l << "\n";
}

}  // namespace

TrainResult train(const TrainConfig& config, const Dataset& train_set, const Dataset* val_set,
                  const TrainOptions& options) {
  config.validate();
  if (train_set.empty()) throw TrainingError("empty training set");
  const RunLog log(config, options.log);
  const fs::path run_dir(config.run_dir);
  fs::create_directories(run_dir);
  auto st = std::make_unique<TrainingState>(config);
  const fs::path metrics = run_dir / "metrics.csv";
  if (!config.resume.empty()) {
    load_checkpoint(*st, config.resume, false);
    // Schedule and stopping settings follow the new config.
    log.line("resumed from ", config.resume, " after epoch ", st->epoch);
    rewrite_metrics(metrics, st->epoch);
  } else {
    std::ofstream(metrics, std::ios::trunc) << kMetricsHeader << "\n";
  }
  std::ofstream(run_dir / "config.txt", std::ios::trunc) << format_config(config);

  TrainResult result;
  result.run_dir = run_dir;
  result.last_epoch = st->epoch;
  bool stop = false;
  for (int epoch = st->epoch + 1; epoch < config.epochs && !stop; ++epoch) {
    if (config.max_steps > 0 && st->step >= config.max_steps) break;
    const float lr = static_cast<float>(learning_rate(config, epoch));
    st->opt_g.set_lr(lr);
    if (st->opt_d_frame) st->opt_d_frame->set_lr(lr);
    if (st->opt_d_edge) st->opt_d_edge->set_lr(lr);

    std::mt19937_64 rng(derive_seed(config.seed, 0x10000 + static_cast<std::uint64_t>(epoch)));
    EpochRecord rec;
    rec.epoch = epoch;
    int steps = 0;
    for (const auto& indices : epoch_batches(train_set.size(), config, rng)) {
      if (config.max_steps > 0 && st->step >= config.max_steps) {
        stop = true;
        break;
      }
      const StepRecord s = train_step(*st, build_batch(train_set, indices, config, rng), epoch);
      rec.mean.l_syn += s.loss.parts.l_syn;
      rec.mean.l_flow += s.loss.parts.l_flow;
      rec.mean.l_adv_frame += s.loss.parts.l_adv_frame;
      rec.mean.l_adv_edge += s.loss.parts.l_adv_edge;
      ++steps;
      if (options.on_step) options.on_step(s);
    }
    if (steps == 0) break;
    if (config.max_steps > 0 && st->step >= config.max_steps) stop = true;
    for (double* v : {&rec.mean.l_syn, &rec.mean.l_flow, &rec.mean.l_adv_frame, &rec.mean.l_adv_edge}) *v /= steps;
    rec.total = total_loss(rec.mean, config.weights).total;

    const bool last = stop || epoch + 1 == config.epochs;
    if (val_set && !val_set->empty() && ((epoch + 1) % config.validate_every == 0 || last)) {
      const EvalReport r = evaluate(st->model, *val_set);
      rec.val_psnr = r.mean_psnr;
      rec.val_ssim = r.mean_ssim;
      result.last_val_psnr = r.mean_psnr;
      if (config.target_psnr > 0.0 && r.mean_psnr >= config.target_psnr) {
        result.reached_target = true;
        stop = true;
      }
    }
    std::ofstream(metrics, std::ios::app) << metrics_row(rec) << "\n";
    st->epoch = epoch;
    if ((epoch + 1) % config.checkpoint_every == 0 || stop || epoch + 1 == config.epochs) {
      save_checkpoint(*st, checkpoint_path(run_dir, epoch));
    }
    log.line("epoch ", epoch, " steps ", st->step, " lr ", lr, " l_syn ", rec.mean.l_syn, " l_flow ",
             rec.mean.l_flow, " total ", rec.total,
             rec.val_psnr ? " val_psnr " + csv_number(*rec.val_psnr) : std::string());
    if (options.on_epoch) options.on_epoch(rec);
    result.last_epoch = epoch;
  }
  result.steps = st->step;
  if (st->d_frame) result.d_frame_calls = st->d_frame->forward_calls();
  if (st->d_edge) result.d_edge_calls = st->d_edge->forward_calls();
  return result;
}

TrainResult train(const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  if (config.train_root.empty()) throw ConfigError("train_root is not set");
  auto split = [](const std::string& s) -> std::optional<fs::path> {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
  };
  const Dataset train_set = Dataset::open(config.mode, config.train_root, split(config.train_split), config.clip_group);
  std::optional<Dataset> val_set;
  if (!config.val_root.empty()) {
    val_set = Dataset::open(config.mode, config.val_root, split(config.val_split), config.clip_group);
  }
  if (options.log && train_set.skipped() > 0) {
    *options.log << "skipped " << train_set.skipped() << " incomplete sequence(s)\n";
  }
  return train(config, train_set, val_set ? &*val_set : nullptr, options);
}

Frame quantize_frame(const Frame& frame) {
  Frame out = frame;
  for (float& v : out.values()) v = static_cast<float>(quantize_byte(v)) / 255.0f;
  return out;
}

EvalReport evaluate(const Interpolator& model, const Dataset& dataset) {
  if (dataset.empty()) throw DataError("evaluation dataset is empty");
  EvalReport report;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const FrameSample s = dataset.get(i);
    EvalRow row{s.id, 0.0, 0.0};
    for (int j = 0; j < s.targets(); ++j) {
      const Frame pred = quantize_frame(model.interpolate(s.first(), s.last(), TimePoint(s.t[static_cast<std::size_t>(j)])).frame);
      row.psnr += psnr(pred, s.target(j));
      row.ssim += ssim(pred, s.target(j));
    }
    row.psnr /= s.targets();
    row.ssim /= s.targets();
    report.mean_psnr += row.psnr;
    report.mean_ssim += row.ssim;
    report.rows.push_back(std::move(row));
  }
  report.mean_psnr /= static_cast<double>(report.rows.size());
  report.mean_ssim /= static_cast<double>(report.rows.size());
  return report;
}

EvalReport evaluate(const fs::path& checkpoint, const Dataset& dataset, TaskMode mode) {
  const auto state = load_checkpoint(checkpoint);
  if (state->config.mode != mode) {
    throw CheckpointError("checkpoint " + checkpoint.string() + " was trained for " + to_string(state->config.mode) +
                          " but evaluation requested " + to_string(mode));
  }
  return evaluate(state->model, dataset);
}

void write_report(const EvalReport& report, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write report " + path.string());
  out << "id,psnr,ssim\n";
  for (const auto& r : report.rows) out << r.id << "," << csv_number(r.psnr) << "," << csv_number(r.ssim) << "\n";
  out << "mean," << csv_number(report.mean_psnr) << "," << csv_number(report.mean_ssim) << "\n";
}

}  // namespace eainterp
