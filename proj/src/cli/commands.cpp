/* Copyright 2026 The TrajMem Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "trajmem/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "trajmem/cli/manifest.hpp"
#include "trajmem/data/dataset_io.hpp"
#include "trajmem/data/ethucy.hpp"
#include "trajmem/data/synth.hpp"
#include "trajmem/eval/ablation.hpp"
#include "trajmem/eval/bench.hpp"
#include "trajmem/eval/predict.hpp"
#include "trajmem/eval/report.hpp"
#include "trajmem/seqlm/train.hpp"
#include "trajmem/vqmem/checkpoint.hpp"
#include "trajmem/vqmem/train.hpp"

namespace trajmem::cli {

namespace fs = std::filesystem;

DependencyError::DependencyError(const fs::path& missing,
                                 const std::string& command)
    : std::runtime_error("missing " + missing.string() + "; run `trajmem " +
                         command + "` first"),
      command_(command) {}

namespace {

std::string fixed(double v, int digits = 9) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Artifact directory plus the bookkeeping for one command's manifest.
class Run {
 public:
  Run(std::string command, const RunConfig& config, std::ostream& log)
      : config_(config), log_(log), dir_(config.text("run.dir")) {
    manifest_.command = std::move(command);
    fs::create_directories(dir_);
  }

  const RunConfig& config() const { return config_; }
  std::ostream& log() { return log_; }

  // Path of an upstream artifact; throws DependencyError when absent.
  fs::path need(const std::string& name, const std::string& producer) {
    const fs::path p = dir_ / name;
    if (!fs::exists(p)) throw DependencyError(p, producer);
    manifest_.inputs.emplace_back(name, file_hash(p));
    return p;
  }

  fs::path output(const std::string& name) {
    outputs_.push_back(name);
    return dir_ / name;
  }

  void write_text(const std::string& name, const std::string& text) {
    std::ofstream out(output(name), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << text;
  }

  void add_input(const std::string& name, std::uint64_t hash) {
    manifest_.inputs.emplace_back(name, hash);
  }

  void finish() {
    for (const auto& name : outputs_) {
      manifest_.outputs.emplace_back(name, file_hash(dir_ / name));
    }
    std::ofstream out(dir_ / (manifest_.command + ".manifest"),
                      std::ios::binary);
    out << render_manifest(manifest_, config_);
    log_ << manifest_.command << ": wrote";
    for (const auto& name : outputs_) log_ << ' ' << name;
    log_ << '\n';
  }

 private:
  const RunConfig& config_;
  std::ostream& log_;
  fs::path dir_;
  Manifest manifest_;
  std::vector<std::string> outputs_;
};

constexpr const char* kSplitFiles[3] = {"train.tmds", "val.tmds", "test.tmds"};

data::SplitDatasets load_splits(Run& run) {
  data::SplitDatasets s;
  s.train = data::load_dataset(run.need(kSplitFiles[0], "synth"));
  s.val = data::load_dataset(run.need(kSplitFiles[1], "synth"));
  s.test = data::load_dataset(run.need(kSplitFiles[2], "synth"));
  return s;
}

void save_splits(Run& run, const data::SplitDatasets& s) {
  data::save_dataset(run.output(kSplitFiles[0]), s.train);
  data::save_dataset(run.output(kSplitFiles[1]), s.val);
  data::save_dataset(run.output(kSplitFiles[2]), s.test);
}

vqmem::VQParams<float> load_vq(Run& run) {
  return vqmem::vq_from_checkpoint(
      vqmem::load_checkpoint(run.need("vq.ckpt", "train-vq")));
}

seqlm::LMParams<float> load_lm(Run& run) {
  return seqlm::lm_from_checkpoint(
      vqmem::load_checkpoint(run.need("lm.ckpt", "train-lm")));
}

// The run config must describe the same horizons as the stored data.
void check_horizons(const RunConfig& config, const data::Dataset& d) {
  if (d.observed != config.count("data.observed") ||
      d.predicted != config.count("data.predicted")) {
    throw ConfigError("dataset has " + std::to_string(d.observed) + "+" +
                      std::to_string(d.predicted) +
                      " frames but the config asks for " +
                      config.text("data.observed") + "+" +
                      config.text("data.predicted"));
  }
}

void cmd_synth(Run& run) {
  const auto& c = run.config();
  const auto all = data::synth_generate(nc::Rng(c.count("seed")), synth_config(c));
  save_splits(run, data::split_dataset(all, split_sizes(c)));
}

void cmd_ingest(Run& run, const CommandOptions& options) {
  const auto& c = run.config();
  if (options.input.empty()) throw ConfigError("ingest needs --input <file>");
  if (!fs::exists(options.input)) {
    throw ConfigError("input file " + options.input.string() + " not found");
  }
  run.add_input(options.input.filename().string(), file_hash(options.input));
  const auto obs = data::load_ethucy_text(
      options.input, static_cast<std::int64_t>(c.count("ingest.frame_stride")));
  const auto windows =
      data::extract_tracks(obs, c.count("data.observed"),
                           c.count("data.predicted"),
                           c.count("ingest.window_stride"));
  const std::size_t n = windows.size();
  const auto train = static_cast<std::size_t>(
      static_cast<double>(n) * c.real("ingest.train_fraction"));
  const auto val = static_cast<std::size_t>(
      static_cast<double>(n) * c.real("ingest.val_fraction"));
  if (train == 0 || val == 0 || train + val >= n) {
    throw std::runtime_error("ingest: " + std::to_string(n) +
                             " windows are too few to split");
  }
  data::Dataset all;
  all.observed = c.count("data.observed");
  all.predicted = c.count("data.predicted");
  all.trajectories = windows;
  save_splits(run, data::split_dataset(all, {train, val, n - train - val}));
  run.log() << "ingest: " << n << " windows from " << obs.agents.size()
            << " agents\n";
}

void cmd_train_vq(Run& run) {
  const auto splits = load_splits(run);
  check_horizons(run.config(), splits.train);
  auto p = pipeline_config(run.config());
  nc::Rng init = nc::Rng(p.seed).fork(1);
  auto vq = vqmem::VQParams<float>::init(p.vq, init);
  std::string curve =
      "epoch,reconstruction,codebook,commitment,total,utilization,reseeded\n";
  vqmem::train_vq(vq, splits.train, p.vq_train,
                  [&](const vqmem::VQEpochStats& s) {
                    curve += std::to_string(s.epoch) + ',' +
                             fixed(s.reconstruction) + ',' + fixed(s.codebook) +
                             ',' + fixed(s.commitment) + ',' + fixed(s.total) +
                             ',' + fixed(s.utilization) + ',' +
                             std::to_string(s.reseeded) + '\n';
                    run.log() << "train-vq: epoch " << s.epoch + 1 << "/"
                              << p.vq_train.epochs << " loss " << s.total
                              << '\n';
                  });
  vqmem::save_checkpoint(run.output("vq.ckpt"), vqmem::vq_checkpoint(vq));
  vqmem::save_checkpoint(run.output("codebook.ckpt"),
                         vqmem::codebook_checkpoint(vq.memory));
  run.write_text("vq_curve.csv", curve);
  run.log() << "train-vq: validation reconstruction ADE "
            << vqmem::reconstruction_ade(vq, splits.val) << '\n';
}

void cmd_encode(Run& run) {
  const auto vq = load_vq(run);
  const auto splits = load_splits(run);
  const data::Dataset* sets[3] = {&splits.train, &splits.val, &splits.test};
  const char* names[3] = {"train.tokens", "val.tokens", "test.tokens"};
  for (int i = 0; i < 3; ++i) {
    seqlm::TokenFile f{vq.config.codebook_size, vq.config.observed_tokens(),
                       vq.config.future_tokens(),
                       vqmem::tokenize_dataset(vq, *sets[i])};
    seqlm::save_tokens(run.output(names[i]), f);
  }
  const auto usage = vqmem::codebook_report(vq, splits.train);
  std::string csv = "entry,count\n";
  for (std::size_t k = 0; k < usage.histogram.size(); ++k) {
    csv += std::to_string(k) + ',' + std::to_string(usage.histogram[k]) + '\n';
  }
  run.write_text("codebook_usage.csv", csv);
  run.log() << "encode: " << usage.used << "/" << usage.entries
            << " entries used, perplexity " << usage.perplexity << '\n';
}

void cmd_train_lm(Run& run) {
  const auto train = seqlm::load_tokens(run.need("train.tokens", "encode"));
  const auto val = seqlm::load_tokens(run.need("val.tokens", "encode"));
  auto p = pipeline_config(run.config());
  if (train.vocab != p.vq.codebook_size) {
    throw ConfigError("token files use " + std::to_string(train.vocab) +
                      " entries but vq.codebook_size is " +
                      std::to_string(p.vq.codebook_size));
  }
  nc::Rng init = nc::Rng(p.seed).fork(2);
  auto lm = seqlm::LMParams<float>::init(p.lm, init);
  const auto record = seqlm::train_lm(
      lm, train.sequences, val.sequences, p.lm_train,
      [&](const seqlm::LMEpochStats& s) {
        run.log() << "train-lm: epoch " << s.epoch + 1 << "/"
                  << p.lm_train.epochs << " train " << s.train_loss << " val "
                  << s.val_loss << '\n';
      });
  vqmem::save_checkpoint(run.output("lm.ckpt"), seqlm::lm_checkpoint(lm));
  std::string curve = "iteration,val_loss\n";
  for (const auto& e : record.evals) {
    curve += std::to_string(e.iteration) + ',' + fixed(e.val_loss) + '\n';
  }
  run.write_text("lm_curve.csv", curve);
  run.log() << "train-lm: " << record.iterations << " iterations, "
            << (record.converged_at
                    ? "converged at " + std::to_string(*record.converged_at)
                    : std::string("no plateau"))
            << '\n';
}

struct Models {
  vqmem::VQParams<float> vq;
  seqlm::LMParams<float> lm;
  data::Dataset test;
};

Models load_models(Run& run) {
  Models m{load_vq(run), load_lm(run), {}};
  m.test = data::load_dataset(run.need("test.tmds", "synth"));
  check_horizons(run.config(), m.test);
  eval::check_compatible(m.vq, m.lm);
  return m;
}

seqlm::SampleConfig sample_config(const RunConfig& c) {
  return pipeline_config(c).sample;
}

void cmd_predict(Run& run) {
  const auto m = load_models(run);
  std::vector<eval::Prediction> preds;
  eval::evaluate(m.vq, m.lm, m.test, sample_config(run.config()),
                 run.config().count("eval.threads"), &preds);
  std::ostringstream csv;
  csv << "trajectory,sample,step,x,y\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t k = 0; k < preds[i].futures.size(); ++k) {
      const auto& f = preds[i].futures[k];
      for (std::size_t t = 0; t < f.size(); ++t) {
        csv << i << ',' << k << ',' << t << ',' << fixed(f[t].x, 6) << ','
            << fixed(f[t].y, 6) << '\n';
      }
    }
  }
  run.write_text("predictions.csv", csv.str());
}

void cmd_eval(Run& run) {
  const auto m = load_models(run);
  const auto& c = run.config();
  auto report = eval::evaluate(m.vq, m.lm, m.test, sample_config(c),
                               c.count("eval.threads"));
  report.config.emplace_back("config_hash", hex64(c.hash()));
  const auto baseline = eval::evaluate_baseline(m.test);
  std::ostringstream csv, text, base;
  eval::write_metrics_csv(csv, report);
  eval::write_metrics_text(text, report);
  text << "constant-velocity ADE: " << fixed(baseline.mean_ade) << '\n'
       << "constant-velocity FDE: " << fixed(baseline.mean_fde) << '\n';
  eval::write_metrics_csv(base, baseline);
  run.write_text("metrics.csv", csv.str());
  run.write_text("metrics.txt", text.str());
  run.write_text("baseline_metrics.csv", base.str());
  run.log() << text.str();
}

void cmd_bench(Run& run) {
  const auto m = load_models(run);
  const auto& c = run.config();
  eval::BenchConfig b{c.count("bench.trials"), c.count("bench.warmup"),
                      c.count("bench.samples"), c.count("seed")};
  std::ostringstream text;
  eval::write_latency_text(text, eval::latency_bench(m.vq, m.lm, m.test, b));
  // Sampling cost scaling, reported only.
  b.samples *= 2;
  const auto doubled = eval::latency_bench(m.vq, m.lm, m.test, b);
  text << "p50 ms at " << b.samples << " samples: " << doubled.p50_ms << '\n';
  run.write_text("bench.txt", text.str());
  run.log() << text.str();
}

void cmd_sweep_theta(Run& run) {
  const auto splits = load_splits(run);
  check_horizons(run.config(), splits.train);
  const auto rows = eval::sweep_theta(splits, run.config().counts("sweep.thetas"),
                                      pipeline_config(run.config()));
  std::ostringstream csv;
  eval::write_theta_csv(csv, rows);
  run.write_text("sweep_theta.csv", csv.str());
  run.log() << csv.str();
}

void cmd_compare_masks(Run& run) {
  const auto vq = load_vq(run);
  const auto splits = load_splits(run);
  check_horizons(run.config(), splits.train);
  const auto rows =
      eval::compare_masks(vq, splits, pipeline_config(run.config()));
  std::ostringstream csv;
  eval::write_mask_csv(csv, rows);
  run.write_text("compare_masks.csv", csv.str());
  run.log() << csv.str();
}

std::string svg_polyline(const std::vector<data::Point>& pts,
                         const std::function<data::Point(data::Point)>& map,
                         const char* style) {
  std::string out = "<polyline fill=\"none\" " + std::string(style) +
                    " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto p = map(pts[i]);
    if (i > 0) out += ' ';
    out += fixed(p.x, 2) + ',' + fixed(p.y, 2);
  }
  return out + "\"/>\n";
}

void cmd_export_plot(Run& run) {
  const auto m = load_models(run);
  const auto& c = run.config();
  const std::size_t n = std::min(c.count("plot.count"), m.test.size());
  std::ostringstream csv;
  csv << "trajectory,kind,sample,step,x,y\n";
  constexpr double kPanel = 240, kPad = 12;
  const std::size_t cols = std::min<std::size_t>(4, std::max<std::size_t>(n, 1));
  const std::size_t rows = (n + cols - 1) / cols;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << fixed(cols * kPanel, 0) << "\" height=\"" << fixed(rows * kPanel, 0)
      << "\">\n";
  const auto sample = sample_config(c);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = m.test.trajectories[i];
    seqlm::SampleConfig local = sample;
    local.seed = eval::trajectory_seed(sample.seed, i);
    const auto pred = eval::predict(m.vq, m.lm, t, local);
    const std::vector<data::Point> past(t.past().begin(), t.past().end());
    auto emit = [&](const char* kind, long k, const std::vector<data::Point>& pts) {
      for (std::size_t s = 0; s < pts.size(); ++s) {
        csv << i << ',' << kind << ',' << k << ',' << s << ','
            << fixed(pts[s].x, 6) << ',' << fixed(pts[s].y, 6) << '\n';
      }
    };
    emit("past", -1, past);
    emit("truth", -1, pred.truth);
    for (std::size_t k = 0; k < pred.futures.size(); ++k) {
      emit("sample", static_cast<long>(k), pred.futures[k]);
    }

    // Panel scaled to the bounding box of everything drawn in it.
    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
    double hi_x = -lo_x, hi_y = -lo_x;
    auto extend = [&](const std::vector<data::Point>& pts) {
      for (const auto& p : pts) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
      }
    };
    extend(past);
    extend(pred.truth);
    for (const auto& f : pred.futures) extend(f);
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-6});
    const double scale = (kPanel - 2 * kPad) / span;
    const double ox = static_cast<double>(i % cols) * kPanel + kPad;
    const double oy = static_cast<double>(i / cols) * kPanel + kPad;
    auto map = [&](data::Point p) {
      return data::Point{ox + (p.x - lo_x) * scale,
                         oy + (hi_y - p.y) * scale};
    };
    svg << "<rect x=\"" << fixed(ox - kPad, 0) << "\" y=\""
        << fixed(oy - kPad, 0) << "\" width=\"" << fixed(kPanel, 0)
        << "\" height=\"" << fixed(kPanel, 0)
        << "\" fill=\"white\" stroke=\"#ccc\"/>\n";
    for (const auto& f : pred.futures) {
      svg << svg_polyline(f, map, "stroke=\"#999\" stroke-width=\"0.8\"");
    }
    svg << svg_polyline(past, map, "stroke=\"#1f77b4\" stroke-width=\"2\"");
    if (!pred.truth.empty()) {
      svg << svg_polyline(pred.truth, map,
                          "stroke=\"#2ca02c\" stroke-width=\"2\"");
    }
  }
  svg << "</svg>\n";
  run.write_text("plot.csv", csv.str());
  run.write_text("plot.svg", svg.str());
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "synth",   "ingest", "train-vq", "encode",      "train-lm",
      "predict", "eval",   "bench",    "sweep-theta", "compare-masks",
      "export-plot"};
  return names;
}

void run_command(const std::string& name, const RunConfig& config,
                 const CommandOptions& options, std::ostream& log) {
  config.validate();
  static const std::map<std::string, std::function<void(Run&, const CommandOptions&)>>
      table = {
          {"synth", [](Run& r, const CommandOptions&) { cmd_synth(r); }},
          {"ingest", cmd_ingest},
          {"train-vq", [](Run& r, const CommandOptions&) { cmd_train_vq(r); }},
          {"encode", [](Run& r, const CommandOptions&) { cmd_encode(r); }},
          {"train-lm", [](Run& r, const CommandOptions&) { cmd_train_lm(r); }},
          {"predict", [](Run& r, const CommandOptions&) { cmd_predict(r); }},
          {"eval", [](Run& r, const CommandOptions&) { cmd_eval(r); }},
          {"bench", [](Run& r, const CommandOptions&) { cmd_bench(r); }},
          {"sweep-theta",
           [](Run& r, const CommandOptions&) { cmd_sweep_theta(r); }},
          {"compare-masks",
           [](Run& r, const CommandOptions&) { cmd_compare_masks(r); }},
          {"export-plot",
           [](Run& r, const CommandOptions&) { cmd_export_plot(r); }},
      };
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown command '" + name + "'");
  Run run(name, config, log);
  it->second(run, options);
  run.finish();
}

}  // namespace trajmem::cli
