// Copyright (c) 2026 The genefx Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

#include "genefx/checkpoint.hpp"
#include "genefx/gene_effect.hpp"
#include "genefx/metrics.hpp"
#include "genefx/trainer.hpp"

namespace genefx::cli {

namespace {

namespace fs = std::filesystem;

std::string text(const std::string& v) { return v; }
std::string text(bool v) { return v ? "true" : "false"; }
std::string text(std::size_t v) { return std::to_string(v); }
// Shortest representation that parses back to the same double.
std::string text(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

using Settings = std::vector<std::pair<std::string, std::string>>;

// One subcommand: its CLI11 options plus the ordered key list echoed into the run manifest.
class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& description)
      : name_(name), app_(app.add_subcommand(name, description)) {}

  template <typename V>
  void option(const std::string& key, V& var, const std::string& help, bool required = false) {
    auto* opt = app_->add_option("--" + key, var, help)
                    ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    if (required) opt->required();
    else opt->capture_default_str();
    keys_.emplace_back(key, [&var] { return text(var); });
  }

  void flag(const std::string& key, bool& var, const std::string& help) {
    app_->add_flag("--" + key, var, help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    keys_.emplace_back(key, [&var] { return text(var); });
  }

  const std::string& name() const { return name_; }
  bool parsed() const { return app_->parsed(); }

  Settings resolved() const {
    Settings s{{"command", name_}};
    for (const auto& [k, get] : keys_) s.emplace_back(k, get());
    return s;
  }

 private:
  std::string name_;
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::string()>>> keys_;
};

void write_settings(const fs::path& path, const Settings& settings) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write run manifest '" + path.string() + "'");
  out << "# genefx run manifest; rerun with: genefx " << settings.front().second
      << " --config " << path.filename().string() << '\n';
  for (const auto& [k, v] : settings) out << k << '=' << v << '\n';
  if (!out) throw IoError("failed writing run manifest '" + path.string() + "'");
}

// Keys a manifest may carry that are not options.
bool is_manifest_only(const std::string& key) { return key == "command" || key == "warning"; }

// Moves `--config FILE` out of `args` and splices the file's settings in as options placed
// right after the subcommand, so explicit flags that follow take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file");
      config = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (config.empty()) return args;
  const auto manifest = data::read_manifest(config);
  const auto sub = std::find_if(args.begin(), args.end(),
                                [](const std::string& a) { return a.rfind("-", 0) != 0; });
  const std::string recorded = manifest.setting("command");
  if (sub != args.end() && !recorded.empty() && recorded != *sub)
    throw ConfigError("config '" + config + "' was written by '" + recorded + "', not '" + *sub +
                      "'");
  std::vector<std::string> injected;
  for (const auto& [k, v] : manifest.settings)
    if (!is_manifest_only(k)) injected.push_back("--" + k + "=" + v);
  const auto at = sub == args.end() ? args.end() : sub + 1;
  args.insert(at, injected.begin(), injected.end());
  return args;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::size_t> split_sizes(const std::string& s, const std::string& what) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoul(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(what + ": '" + item + "' is not a positive integer");
    }
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

struct Quality {
  double psnr = 0.0;
  double ssim = 0.0;
};

Quality evaluate(const ToyModel<float>& model, const std::vector<data::ImagePair>& pairs) {
  if (pairs.empty()) throw ConfigError("evaluation split is empty");
  Quality q;
  for (const auto& p : pairs) {
    const auto y = model.infer(p.low);
    q.psnr += metrics::psnr(y, p.high).value;
    q.ssim += metrics::ssim(y, p.high).value;
  }
  q.psnr /= static_cast<double>(pairs.size());
  q.ssim /= static_cast<double>(pairs.size());
  return q;
}

const std::vector<data::ImagePair>& pick_split(const data::Split& split, const std::string& name) {
  if (name == "val") return split.val;
  if (name == "train") return split.train;
  throw ConfigError("unknown split '" + name + "' (expected train or val)");
}

ToyModel<float> load_frozen(const std::string& path) {
  if (!fs::exists(path)) throw IoError("checkpoint '" + path + "' does not exist");
  auto model = ckpt::load_model<float>(path);
  model.freeze();
  return model;
}

// ---- gen-data ----

struct GenDataOptions {
  std::size_t count = 300;
  std::size_t size = 32;
  std::size_t seed = 0;
  std::string out;
  double train_fraction = 0.8;
  bool ambiguous = true;
};

void gen_data(const GenDataOptions& o, Settings settings, std::ostream& out) {
  if (o.size < metrics::kSsimWindow) {
    settings.emplace_back("warning", "size " + std::to_string(o.size) + " is below the " +
                                         std::to_string(metrics::kSsimWindow) +
                                         "-pixel SSIM window; SSIM is undefined on this data");
  }
  if (o.size % 2) {
    settings.emplace_back("warning", "odd size " + std::to_string(o.size) +
                                         "; the toy model needs even height and width");
  }
  data::DatasetParams dp;
  dp.seed = o.seed;
  dp.ambiguous = o.ambiguous;
  dp.train_fraction = o.train_fraction;
  const auto sources = data::procedural_sources(o.count, o.size, o.seed);
  const auto split = data::make_dataset(sources, dp);
  fs::create_directories(o.out);
  data::Manifest m;
  m.settings = std::move(settings);
  auto emit = [&](const std::vector<data::ImagePair>& pairs, const std::string& name) {
    for (const auto& p : pairs) {
      data::ManifestEntry e;
      e.id = p.id;
      e.split = name;
      e.low_path = p.id + "_low.png";
      e.high_path = p.id + "_high.png";
      e.params = data::draw_degrade(dp, p.id, p.high);
      data::save_png(fs::path(o.out) / e.low_path, p.low);
      data::save_png(fs::path(o.out) / e.high_path, p.high);
      m.entries.push_back(std::move(e));
    }
  };
  emit(split.train, "train");
  emit(split.val, "val");
  data::write_manifest(fs::path(o.out) / "manifest.txt", m);
  out << "gen-data: " << m.entries.size() << " pairs (" << split.train.size() << " train, "
      << split.val.size() << " val) in " << o.out << '\n';
  for (const auto& [k, v] : m.settings)
    if (k == "warning") out << "warning: " << v << '\n';
}

// ---- train / finetune ----

struct TrainOptions {
  std::string data, out, base;
  std::size_t steps = 2000;
  double lr = 2e-3;
  std::size_t batch = 4;
  std::size_t seed = 0;
  std::size_t channels = 8;
  std::string loss = "l1";
  // fine-tuning
  std::string source = "pog";
  std::string mode = "feature";
  std::size_t d_m = 4, d_e = 64, d_k = 3, candidates = 4;
  bool joint = false;
};

TrainConfig train_config(const TrainOptions& o) {
  TrainConfig c;
  c.lr = o.lr;
  c.steps = o.steps;
  c.batch = o.batch;
  c.seed = o.seed;
  c.loss = parse_loss_kind(o.loss);
  c.pde.d_m = o.d_m;
  c.pde.d_e = o.d_e;
  c.pde.d_k = o.d_k;
  c.pde.candidates = o.candidates;
  c.pde.source = parse_kernel_source(o.source);
  c.pde.mode = parse_insertion_mode(o.mode);
  c.joint = o.joint;
  c.validate();
  return c;
}

void write_curve(const fs::path& path, const std::vector<double>& curve) {
  std::ofstream f(path);
  write_loss_curve(f, curve);
  if (!f) throw IoError("failed writing loss curve '" + path.string() + "'");
}

void report_model(std::ostream& out, const std::string& cmd, const fs::path& ckpt_path,
                  const ToyModel<float>& model, const data::Split& split) {
  const auto q = evaluate(model, split.val);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s: val psnr=%.4f ssim=%.4f params=%zu checkpoint=%s fnv1a=",
                cmd.c_str(), q.psnr, q.ssim, model.parameter_count(), ckpt_path.string().c_str());
  out << buf << ckpt::file_fingerprint(ckpt_path) << '\n';
}

void cmd_train(const TrainOptions& o, const Settings& settings, std::ostream& out) {
  const TrainConfig cfg = train_config(o);
  const auto split = data::load_dataset(o.data);
  fs::create_directories(o.out);
  ToyModel<float> model({o.channels, true, {}}, o.seed);
  const auto result = train(model, split.train, cfg);
  const fs::path ckpt_path = fs::path(o.out) / "model.gfx";
  ckpt::save_model(ckpt_path, model);
  write_curve(fs::path(o.out) / "loss.csv", result.loss_curve);
  write_settings(fs::path(o.out) / "run_manifest.txt", settings);
  report_model(out, "train", ckpt_path, model, split);
}

void cmd_finetune(const TrainOptions& o, const Settings& settings, std::ostream& out) {
  const TrainConfig cfg = train_config(o);
  if (!fs::exists(o.base)) throw IoError("base checkpoint '" + o.base + "' does not exist");
  const auto split = data::load_dataset(o.data);
  fs::create_directories(o.out);
  const fs::path ckpt_path = fs::path(o.out) / "model.gfx";
  if (cfg.steps == 0) {
    // Nothing is learned, so the base is the result.
    fs::copy_file(o.base, ckpt_path, fs::copy_options::overwrite_existing);
    write_curve(fs::path(o.out) / "loss.csv", {});
  } else {
    auto result = fine_tune_with_pde(fs::path(o.base), split.train, cfg);
    ckpt::save_model(ckpt_path, result.model);
    write_curve(fs::path(o.out) / "loss.csv", result.train.loss_curve);
  }
  write_settings(fs::path(o.out) / "run_manifest.txt", settings);
  report_model(out, "finetune", ckpt_path, ckpt::load_model<float>(ckpt_path), split);
}

// ---- dge / poi ----

struct ProbeOptions {
  std::string model, data, out;
  std::string layers = kDefaultProbe;
  std::size_t seed = 0;
  std::string split = "val";
  double i_max = 1.0;
};

std::vector<std::string> probe_layers(const ToyModel<float>& model, const std::string& patterns) {
  std::vector<std::string> ids;
  for (const auto& l : select_layers(model.layers(), patterns)) ids.push_back(l.id);
  return ids;
}

void cmd_dge(const ProbeOptions& o, const Settings& settings, std::ostream& out) {
  const auto model = load_frozen(o.model);
  const auto split = data::load_dataset(o.data);
  const auto& pairs = pick_split(split, o.split);
  std::vector<data::Image> lows, highs;
  for (const auto& p : pairs) {
    lows.push_back(p.low);
    highs.push_back(p.high);
  }
  const gene::ResetPlan plan{probe_layers(model, o.layers), o.seed};
  const auto report = gene::dge(model, plan, lows, o.i_max, highs);
  fs::create_directories(o.out);
  const fs::path path = fs::path(o.out) / "dge_report.txt";
  std::ofstream f(path);
  gene::write_report(f, report);
  f << "# published full-scale reference, not a target: Restormer DGE 48.94 / 47.34 /\n"
       "# 49.53 dB and Restormer with the dynamic block 45.09 / 45.09 / 47.78 dB on LOL-v1 /\n"
       "# LOL-v2-real / LOL-v2-syn. Toy-model values are not comparable in magnitude.\n";
  if (!f) throw IoError("failed writing '" + path.string() + "'");
  write_settings(fs::path(o.out) / "run_manifest.txt", settings);
  char buf[120];
  std::snprintf(buf, sizeof buf, "dge: layers=%zu images=%zu capped=%zu dge=%.6f report=",
                report.layers.size(), report.image_count, report.capped_terms(), report.dge);
  out << buf << path.string() << '\n';
}

void cmd_poi(const ProbeOptions& o, const Settings& settings, std::ostream& out) {
  const auto model = load_frozen(o.model);
  const auto split = data::load_dataset(o.data);
  const auto& pairs = pick_split(split, o.split);
  fs::create_directories(o.out);
  const fs::path path = fs::path(o.out) / "poi_report.txt";
  std::ofstream f(path);
  f << "# genefx POI report\n# poi <layer> <improved> <total> <fraction>\n";
  std::size_t improved = 0, total = 0;
  for (const auto& id : probe_layers(model, o.layers)) {
    const auto r = gene::poi(model, id, pairs, o.seed);
    f << "poi " << r.layer << ' ' << r.improved << ' ' << r.total << ' ' << text(r.fraction)
      << '\n';
    out << "poi " << r.layer << ' ' << r.improved << '/' << r.total << '\n';
    improved += r.improved;
    total += r.total;
  }
  f << "summary improved=" << improved << " total=" << total << '\n';
  f << "# published full-scale reference, not a target: Restormer POI 40% 33% 33% 27% 27%\n"
       "# 33% for reset layers 1-6.\n";
  if (!f) throw IoError("failed writing '" + path.string() + "'");
  write_settings(fs::path(o.out) / "run_manifest.txt", settings);
}

// ---- ablate ----

struct AblateOptions {
  std::string base, data, out;
  std::size_t steps = 250;
  double lr = 5e-4;
  std::size_t batch = 4;
  std::size_t seed = 0;
  std::string d_m = "4";
  std::string d_e = "64";
  std::size_t candidates = 4;
};

struct AblationRow {
  std::string method;
  std::string d_m = "-", d_e = "-";
  Quality q;
  std::size_t params = 0;
  double mmacs = 0.0;
};

void cmd_ablate(const AblateOptions& o, const Settings& settings, std::ostream& out) {
  const auto dms = split_sizes(o.d_m, "d-m");
  const auto des = split_sizes(o.d_e, "d-e");
  if (!fs::exists(o.base)) throw IoError("ablate: base checkpoint '" + o.base + "' does not exist");
  const auto base = ckpt::load_model<float>(o.base);
  if (base.has_pde()) throw ConfigError("ablate: base checkpoint already contains a block");
  const auto split = data::load_dataset(o.data);
  if (split.val.empty()) throw ConfigError("ablate: dataset has no validation pairs");
  const std::size_t h = split.val.front().low.dim(1), w = split.val.front().low.dim(2);
  auto row = [&](const std::string& method, const ToyModel<float>& m, const std::string& dm,
                 const std::string& de) {
    return AblationRow{method, dm, de, evaluate(m, split.val), m.parameter_count(),
                       static_cast<double>(m.macs(h, w)) / 1e6};
  };
  auto tuned = [&](KernelSource source, std::size_t dm, std::size_t de) {
    TrainConfig c;
    c.steps = o.steps;
    c.lr = o.lr;
    c.batch = o.batch;
    c.seed = o.seed;
    c.pde.d_m = dm;
    c.pde.d_e = de;
    c.pde.candidates = o.candidates;
    c.pde.source = source;
    auto model = fine_tune_with_pde(base, split.train, c).model;
    model.freeze();
    return model;
  };
  auto frozen_base = base.clone();
  frozen_base.freeze();
  const std::string dm0 = std::to_string(dms[0]), de0 = std::to_string(des[0]);
  std::vector<AblationRow> structure{
      row("base", frozen_base, "-", "-"),
      row("base + static conv", tuned(KernelSource::kStatic, dms[0], des[0]), dm0, "-"),
      row("base + PDE (dynamic conv, K=" + std::to_string(o.candidates) + ")",
          tuned(KernelSource::kCandidateMixture, dms[0], des[0]), dm0, de0),
      row("base + PDE + POG", tuned(KernelSource::kPog, dms[0], des[0]), dm0, de0)};
  std::vector<AblationRow> grid;
  for (auto dm : dms)
    for (auto de : des) {
      if (dm == dms[0] && de == des[0]) {
        grid.push_back(structure.back());
        continue;
      }
      grid.push_back(row("base + PDE + POG", tuned(KernelSource::kPog, dm, de), std::to_string(dm),
                         std::to_string(de)));
    }
  std::ostringstream md;
  auto table = [&md](const std::string& title, const std::vector<AblationRow>& rows) {
    md << "### " << title << "\n\n| Method | D_m | D_e | PSNR | SSIM | Params | MMACs |\n"
       << "|---|---|---|---|---|---|---|\n";
    char buf[256];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "| %s | %s | %s | %.4f | %.4f | %zu | %.3f |\n",
                    r.method.c_str(), r.d_m.c_str(), r.d_e.c_str(), r.q.psnr, r.q.ssim, r.params,
                    r.mmacs);
      md << buf;
    }
    md << '\n';
  };
  table("Mechanism", structure);
  table("Block widths (PDE + POG)", grid);
  md << "Published full-scale reference, not targets: Restormer 20.91 dB, + static conv 21.18 dB,\n"
        "+ PDE 21.60 dB, + PDE + POG 21.88 dB on LOL-v1.\n";
  fs::create_directories(o.out);
  const fs::path path = fs::path(o.out) / "ablation.md";
  std::ofstream f(path);
  f << md.str();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
  write_settings(fs::path(o.out) / "run_manifest.txt", settings);
  out << md.str();
}

// ---- enhance ----

struct EnhanceOptions {
  std::string model, input, output;
};

void cmd_enhance(const EnhanceOptions& o, const Settings& settings, std::ostream& out) {
  const auto model = load_frozen(o.model);
  const auto image = data::to_rgb(data::load_png(o.input));
  data::save_png(o.output, model.infer(image));
  write_settings(fs::path(o.output).string() + ".manifest.txt", settings);
  out << "enhance: " << o.output << " fnv1a=" << ckpt::file_fingerprint(o.output) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  CLI::App app{"genefx: orthogonal parameter generation and gene-effect probes", "genefx"};
  app.require_subcommand(1);
  std::string config_file;
  app.add_option("--config", config_file, "key=value file with option defaults");

  GenDataOptions g;
  Command gen(app, "gen-data", "Write a procedural paired dataset");
  gen.option("count", g.count, "number of image pairs");
  gen.option("size", g.size, "image side in pixels");
  gen.option("seed", g.seed, "master seed");
  gen.option("out", g.out, "output directory", true);
  gen.option("train-fraction", g.train_fraction, "fraction of pairs in the training split");
  gen.flag("ambiguous", g.ambiguous, "fix the low-image brightness independently of exposure");

  TrainOptions t;
  Command tr(app, "train", "Train the toy enhancement model");
  tr.option("data", t.data, "dataset directory", true);
  tr.option("out", t.out, "output directory", true);
  tr.option("steps", t.steps, "optimizer steps");
  tr.option("lr", t.lr, "Adam learning rate");
  tr.option("batch", t.batch, "minibatch size");
  tr.option("seed", t.seed, "master seed");
  tr.option("channels", t.channels, "base channel width C");
  tr.option("loss", t.loss, "l1 or l2");

  TrainOptions f;
  f.steps = 250;
  f.lr = 5e-4;
  Command ft(app, "finetune", "Insert a dynamic block into a trained model and fine-tune it");
  ft.option("base", f.base, "base checkpoint", true);
  ft.option("data", f.data, "dataset directory", true);
  ft.option("out", f.out, "output directory", true);
  ft.option("steps", f.steps, "optimizer steps; 0 copies the base checkpoint");
  ft.option("lr", f.lr, "Adam learning rate");
  ft.option("batch", f.batch, "minibatch size");
  ft.option("seed", f.seed, "master seed");
  ft.option("loss", f.loss, "l1 or l2");
  ft.option("source", f.source, "kernel source: pog, dynconv or static");
  ft.option("mode", f.mode, "insertion: feature or qkv");
  ft.option("d-m", f.d_m, "bottleneck width D_m");
  ft.option("d-e", f.d_e, "embedding width D_e");
  ft.option("d-k", f.d_k, "kernel size");
  ft.option("candidates", f.candidates, "candidate kernels for dynconv");
  ft.flag("joint", f.joint, "also update the base weights");

  ProbeOptions d;
  Command dg(app, "dge", "Reset probed layers and report the log-MSE divergence");
  dg.option("model", d.model, "checkpoint", true);
  dg.option("data", d.data, "dataset directory", true);
  dg.option("out", d.out, "output directory", true);
  dg.option("layers", d.layers, "comma-separated layer globs; empty selects none");
  dg.option("seed", d.seed, "reset seed");
  dg.option("split", d.split, "train or val");
  dg.option("i-max", d.i_max, "peak intensity");

  ProbeOptions p;
  Command po(app, "poi", "Fraction of images improved by resetting each probed layer");
  po.option("model", p.model, "checkpoint", true);
  po.option("data", p.data, "dataset directory", true);
  po.option("out", p.out, "output directory", true);
  po.option("layers", p.layers, "comma-separated layer globs; empty selects none");
  po.option("seed", p.seed, "reset seed");
  po.option("split", p.split, "train or val");

  AblateOptions a;
  Command ab(app, "ablate", "Compare base, static, dynamic-conv and POG blocks");
  ab.option("base", a.base, "base checkpoint", true);
  ab.option("data", a.data, "dataset directory", true);
  ab.option("out", a.out, "output directory", true);
  ab.option("steps", a.steps, "fine-tune steps per variant");
  ab.option("lr", a.lr, "Adam learning rate");
  ab.option("batch", a.batch, "minibatch size");
  ab.option("seed", a.seed, "master seed");
  ab.option("d-m", a.d_m, "comma-separated bottleneck widths");
  ab.option("d-e", a.d_e, "comma-separated embedding widths");
  ab.option("candidates", a.candidates, "candidate kernels for the dynamic-conv row");

  EnhanceOptions e;
  Command en(app, "enhance", "Enhance one PNG with a checkpoint");
  en.option("model", e.model, "checkpoint", true);
  en.option("input", e.input, "input PNG", true);
  en.option("output", e.output, "output PNG", true);

  try {
    auto args = expand_config(raw);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }

  try {
    if (gen.parsed()) gen_data(g, gen.resolved(), out);
    else if (tr.parsed()) cmd_train(t, tr.resolved(), out);
    else if (ft.parsed()) cmd_finetune(f, ft.resolved(), out);
    else if (dg.parsed()) cmd_dge(d, dg.resolved(), out);
    else if (po.parsed()) cmd_poi(p, po.resolved(), out);
    else if (ab.parsed()) cmd_ablate(a, ab.resolved(), out);
    else if (en.parsed()) cmd_enhance(e, en.resolved(), out);
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace genefx::cli
