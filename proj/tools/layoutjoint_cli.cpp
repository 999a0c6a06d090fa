// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0
//
// layoutjoint command-line tool. Every command is deterministic given its
// flags and seed. Exit codes: 0 success, 2 usage, 3 data or I/O error.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "layoutjoint/layoutjoint.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  DataError(lj_status s, const std::string& message) : std::runtime_error(message), status(s) {}
  lj_status status;
};

void check(lj_status status) {
  if (status == LJ_OK) return;
  const std::string message = lj_last_error();
  if (status == LJ_ERR_INVALID_ARGUMENT || status == LJ_ERR_STEP_OUT_OF_RANGE) throw UsageError(message);
  throw DataError(status, message);
}

std::string take(char* s) {
  std::string out = s == nullptr ? std::string() : std::string(s);
  lj_string_free(s);
  return out;
}

struct LayoutDeleter {
  void operator()(lj_layout* p) const { lj_layout_free(p); }
};
struct MaskDeleter {
  void operator()(lj_mask* p) const { lj_mask_free(p); }
};
struct RenderDeleter {
  void operator()(lj_render* p) const { lj_render_free(p); }
};
struct DepthDeleter {
  void operator()(lj_depth* p) const { lj_depth_free(p); }
};
struct SuiteDeleter {
  void operator()(lj_suite* p) const { lj_suite_free(p); }
};
struct ReportDeleter {
  void operator()(lj_report* p) const { lj_report_free(p); }
};
using LayoutPtr = std::unique_ptr<lj_layout, LayoutDeleter>;
using MaskPtr = std::unique_ptr<lj_mask, MaskDeleter>;
using RenderPtr = std::unique_ptr<lj_render, RenderDeleter>;
using DepthPtr = std::unique_ptr<lj_depth, DepthDeleter>;
using SuitePtr = std::unique_ptr<lj_suite, SuiteDeleter>;
using ReportPtr = std::unique_ptr<lj_report, ReportDeleter>;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError(LJ_ERR_IO, "cannot write '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError(LJ_ERR_IO, "cannot create output directory '" + dir.string() + "'");
}

void announce(const fs::path& path) { std::cout << "wrote " << path.string() << "\n"; }

struct Settings {
  std::string config;
  std::string out = ".";
  int resolution = 0;
  int steps = 20;
  int gamma = -1;
  int patch_size = 32;
  int seg_len = 8;
  int dim = 32;
  int heads = 1;
  std::uint64_t seed = 0;
  bool no_i2i = false;
  bool no_i2t = false;
  bool no_t2i = false;
  bool no_t2t = false;
  bool no_detail_renderer = false;
  bool global_reads_instance_text = false;
  std::string attributes;
  double iou_threshold = 0.5;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::size_t max_instances = 16;

  std::string layout;
  bool dump_states = false;
  std::string layouts_dir;
  std::size_t suite_count = 100;
  int min_instances = 2;
  int max_suite_instances = 6;
  bool ablation_grid = false;
  bool refine = false;
  std::string depth_in;
  int height = 0;
  int width = 0;

  lj_options options() const {
    lj_options o;
    lj_options_init(&o);
    o.total_steps = steps;
    o.gamma = gamma;
    o.patch_size = patch_size;
    o.seg_len = seg_len;
    o.embed_dim = dim;
    o.heads = heads;
    o.seed = seed;
    o.i2i_control = !no_i2i;
    o.i2t_control = !no_i2t;
    o.t2i_control = !no_t2i;
    o.t2t_control = !no_t2t;
    o.detail_renderer = !no_detail_renderer;
    o.global_reads_instance_text = global_reads_instance_text;
    o.attributes = attributes.empty() ? nullptr : attributes.c_str();
    o.iou_threshold = iou_threshold;
    o.jobs = jobs;
    o.max_instances = max_instances;
    o.resolution = resolution;
    return o;
  }
};

void add_engine_flags(CLI::App* cmd, Settings& s) {
  cmd->add_option("--config", s.config, "JSON file of flag values; command-line flags win");
  cmd->add_option("--out", s.out, "Output directory")->capture_default_str();
  cmd->add_option("--resolution", s.resolution, "Grid and gamma resolution (default: the layout's)");
  cmd->add_option("--steps", s.steps, "Sampling steps")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--gamma", s.gamma, "STRICT steps (default: from the resolution)");
  cmd->add_option("--patch-size", s.patch_size, "Pixels per patch side")->capture_default_str();
  cmd->add_option("--seg-len", s.seg_len, "Tokens per text segment")->capture_default_str();
  cmd->add_option("--dim", s.dim, "Embedding width")->capture_default_str();
  cmd->add_option("--heads", s.heads, "Attention heads")->capture_default_str();
  cmd->add_option("--seed", s.seed, "Seed (fallback: LAYOUTJOINT_SEED, then 0)");
  cmd->add_flag("--no-i2i", s.no_i2i, "Disable image-to-image control");
  cmd->add_flag("--no-i2t", s.no_i2t, "Disable image-to-text control");
  cmd->add_flag("--no-t2i", s.no_t2i, "Disable text-to-image control");
  cmd->add_flag("--no-t2t", s.no_t2t, "Disable text-to-text control");
  cmd->add_flag("--no-detail-renderer", s.no_detail_renderer, "Disable every attention constraint");
  cmd->add_flag("--global-reads-instance-text", s.global_reads_instance_text,
                "Let global text read instance text under text-to-text control");
  cmd->add_option("--attributes", s.attributes, "Comma separated attribute vocabulary");
  cmd->add_option("--iou-threshold", s.iou_threshold, "IoU needed for a correct position")->capture_default_str();
  cmd->add_option("--jobs", s.jobs, "Evaluation workers (default: available cores)")->check(CLI::PositiveNumber);
  cmd->add_option("--max-instances", s.max_instances, "Layout validation limit")->capture_default_str();
}

std::string config_value(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number() || value.is_boolean()) return value.dump();
  throw UsageError("config values must be strings, numbers or booleans");
}

// Fills options that were not given on the command line from the JSON file.
void apply_config(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(LJ_ERR_IO, "cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(LJ_ERR_FORMAT, path + ": " + e.what());
  }
  if (!doc.is_object()) throw DataError(LJ_ERR_FORMAT, path + ": expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") throw UsageError(path + ": 'config' cannot be nested");
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) opt = cmd->get_option_no_throw(key);
    if (opt == nullptr) throw UsageError(path + ": unknown key '" + key + "' for " + cmd->get_name());
    if (opt->count() > 0) continue;
    if (value.is_boolean() && opt->get_expected_max() == 0) {
      if (!value.get<bool>()) continue;
      opt->add_result("true");
    } else {
      opt->add_result(config_value(value));
    }
    try {
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw UsageError(path + ": " + key + ": " + e.what());
    }
  }
}

LayoutPtr load_layout(const Settings& s) {
  lj_layout* raw = nullptr;
  check(lj_layout_load(s.layout.c_str(), s.max_instances, &raw));
  return LayoutPtr(raw);
}

std::string step_tag(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d", step);
  return buf;
}

int cmd_build_mask(const Settings& s) {
  const LayoutPtr layout = load_layout(s);
  const lj_options o = s.options();
  int gamma = 0;
  int total = 0;
  check(lj_resolve_schedule(layout.get(), &o, &gamma, &total));
  const fs::path dir(s.out);
  ensure_dir(dir);

  auto emit = [&](int step, const std::string& stem) {
    lj_mask* raw = nullptr;
    check(lj_mask_build(layout.get(), &o, step, &raw));
    const MaskPtr mask(raw);
    const fs::path pgm = dir / (stem + ".pgm");
    const fs::path sidecar = dir / (stem + ".json");
    check(lj_mask_write_pgm(mask.get(), pgm.string().c_str()));
    char* text = nullptr;
    check(lj_mask_sidecar_json(mask.get(), &text));
    write_text(sidecar, take(text));
    announce(pgm);
    announce(sidecar);
  };

  if (s.no_detail_renderer) {
    if (total < 1) throw UsageError("build-mask needs at least one sampling step");
    emit(0, "mask");
    return 0;
  }
  std::vector<int> steps;
  for (int step : {0, gamma - 1, gamma, total - 1}) {
    if (step >= 0 && step < total && std::find(steps.begin(), steps.end(), step) == steps.end()) {
      steps.push_back(step);
    }
  }
  std::sort(steps.begin(), steps.end());
  if (steps.empty()) throw UsageError("build-mask needs at least one sampling step");
  for (int step : steps) emit(step, "mask_step_" + step_tag(step));
  return 0;
}

int cmd_run(const Settings& s) {
  const LayoutPtr layout = load_layout(s);
  const lj_options o = s.options();
  lj_render* raw = nullptr;
  check(lj_render_layout(layout.get(), &o, s.dump_states ? 1 : 0, &raw));
  const RenderPtr render(raw);
  const fs::path dir(s.out);
  ensure_dir(dir);
  char* text = nullptr;
  check(lj_render_to_json(render.get(), &text));
  const std::string doc = take(text);
  write_text(dir / "render.json", doc);
  announce(dir / "render.json");
  if (s.dump_states) {
    const fs::path states = dir / "states.bin";
    check(lj_render_write_states(render.get(), states.string().c_str()));
    announce(states);
  }
  const json parsed = json::parse(doc);
  for (const json& inst : parsed["instances"]) {
    if (inst["attribute"].is_null()) continue;
    std::cout << "instance " << inst["id"].get<int>() << " " << inst["attribute"].get<std::string>() << ": "
              << (inst["success"].get<bool>() ? "ok" : "failed") << "\n";
  }
  return 0;
}

SuitePtr build_suite(const Settings& s, const lj_options& o) {
  lj_suite* raw = nullptr;
  if (!s.layouts_dir.empty()) {
    const fs::path dir(s.layouts_dir);
    if (!fs::is_directory(dir)) throw DataError(LJ_ERR_IO, "layout directory '" + s.layouts_dir + "' not found");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw UsageError("suite is empty: no .json layouts in '" + s.layouts_dir + "'");
    check(lj_suite_new(&raw));
    SuitePtr suite(raw);
    for (const fs::path& file : files) {
      lj_layout* layout = nullptr;
      check(lj_layout_load(file.string().c_str(), s.max_instances, &layout));
      const LayoutPtr owned(layout);
      check(lj_suite_add(suite.get(), owned.get()));
    }
    return suite;
  }
  if (s.suite_count == 0) throw UsageError("suite is empty: --suite-count must be at least 1");
  const int resolution = s.resolution > 0 ? s.resolution : 512;
  check(lj_suite_generate(s.suite_count, s.min_instances, s.max_suite_instances, s.seed, resolution, &o, &raw));
  return SuitePtr(raw);
}

std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

void print_metrics(const std::string& name, const lj_report* report) {
  double miou = 0;
  double isr = 0;
  double sr = 0;
  check(lj_report_metrics(report, &miou, &isr, &sr));
  char line[160];
  std::snprintf(line, sizeof line, "%-22s ISR %.4f  MIoU %.4f  SR %.4f", name.c_str(), isr, miou, sr);
  std::cout << line << "\n";
}

int cmd_evaluate(const Settings& s, bool ablation) {
  lj_options o = s.options();
  const SuitePtr suite = build_suite(s, o);
  const fs::path dir(s.out);
  ensure_dir(dir);

  std::vector<ReportPtr> reports;
  std::vector<std::string> names;
  if (ablation) {
    for (std::size_t i = 0; i < lj_ablation_count(); ++i) {
      const char* name = nullptr;
      check(lj_ablation_apply(i, &o, &name));
      lj_report* raw = nullptr;
      check(lj_evaluate(suite.get(), &o, name, &raw));
      reports.emplace_back(raw);
      names.emplace_back(name);
    }
  } else {
    const std::string name = "custom";
    lj_report* raw = nullptr;
    check(lj_evaluate(suite.get(), &o, name.c_str(), &raw));
    reports.emplace_back(raw);
    names.push_back(name);
  }

  for (std::size_t i = 0; i < reports.size(); ++i) {
    char* text = nullptr;
    check(lj_report_to_json(reports[i].get(), &text));
    const fs::path file = dir / (ablation ? "report_" + slug(names[i]) + ".json" : std::string("report.json"));
    write_text(file, take(text));
    announce(file);
    print_metrics(names[i], reports[i].get());
  }
  std::vector<const lj_report*> views;
  for (const ReportPtr& r : reports) views.push_back(r.get());
  char* csv = nullptr;
  check(lj_reports_to_csv(views.data(), views.size(), &csv));
  const fs::path csv_file = dir / (ablation ? "ablation.csv" : "report.csv");
  write_text(csv_file, take(csv));
  announce(csv_file);
  return 0;
}

int cmd_depth(const Settings& s) {
  const LayoutPtr layout = load_layout(s);
  const int resolution = s.resolution > 0 ? s.resolution : lj_layout_resolution(layout.get());
  const int height = s.height > 0 ? s.height : resolution;
  const int width = s.width > 0 ? s.width : resolution;
  lj_depth* raw = nullptr;
  if (!s.depth_in.empty()) {
    check(lj_depth_load_pgm(s.depth_in.c_str(), &raw));
  } else {
    check(lj_depth_from_layout(layout.get(), height, width, &raw));
  }
  const DepthPtr depth(raw);
  const fs::path dir(s.out);
  ensure_dir(dir);
  const fs::path pgm = dir / "depth.pgm";
  check(lj_depth_write_pgm(depth.get(), pgm.string().c_str()));
  announce(pgm);
  if (s.refine) {
    lj_layout* refined_raw = nullptr;
    char* notes = nullptr;
    check(lj_depth_refine(depth.get(), layout.get(), &refined_raw, &notes));
    const LayoutPtr refined(refined_raw);
    std::cerr << take(notes);
    char* text = nullptr;
    check(lj_layout_to_json(refined.get(), &text));
    write_text(dir / "refined_layout.json", take(text));
    announce(dir / "refined_layout.json");
  }
  return 0;
}

std::optional<std::uint64_t> env_seed() {
  const char* env = std::getenv("LAYOUTJOINT_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(env, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || env[used] != '\0') throw UsageError(std::string("LAYOUTJOINT_SEED is not an integer: ") + env);
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  CLI::App app{"layoutjoint: layout-driven joint-attention masks, toy sampler, depth stage and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lj_version()));

  CLI::App* build_mask = app.add_subcommand("build-mask", "Write PGM masks and JSON sidecars for key steps");
  build_mask->add_option("layout", s.layout, "Layout JSON file")->required();
  add_engine_flags(build_mask, s);

  CLI::App* run = app.add_subcommand("run", "Render one layout and report per-instance verdicts");
  run->add_option("layout", s.layout, "Layout JSON file")->required();
  run->add_flag("--dump-states", s.dump_states, "Write per-step sampler states to states.bin");
  add_engine_flags(run, s);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a synthetic suite or a layout directory");
  CLI::App* ablate = app.add_subcommand("ablate", "Evaluate the six ablation configurations");
  for (CLI::App* cmd : {evaluate, ablate}) {
    cmd->add_option("--layouts", s.layouts_dir, "Directory of layout JSON files");
    cmd->add_option("--suite-count", s.suite_count, "Synthetic suite size")->capture_default_str();
    cmd->add_option("--min-instances", s.min_instances, "Fewest instances per synthetic layout")
        ->capture_default_str();
    cmd->add_option("--suite-max-instances", s.max_suite_instances, "Most instances per synthetic layout")
        ->capture_default_str();
    add_engine_flags(cmd, s);
  }
  evaluate->add_flag("--ablation-grid", s.ablation_grid, "Evaluate all six ablation configurations");

  CLI::App* depth = app.add_subcommand("depth", "Write the scene depth map and optionally refine the layout");
  depth->add_option("layout", s.layout, "Layout JSON file")->required();
  depth->add_flag("--refine", s.refine, "Tighten boxes to their depth plateaus");
  depth->add_option("--depth-in", s.depth_in, "Refine against this 16-bit PGM instead of the layout's own depth");
  depth->add_option("--height", s.height, "Depth map height (default: resolution)");
  depth->add_option("--width", s.width, "Depth map width (default: resolution)");
  add_engine_flags(depth, s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    if (!s.config.empty()) apply_config(cmd, s.config);
    if (cmd->get_option("--seed")->count() == 0) {
      if (const auto seed = env_seed()) s.seed = *seed;
    }
    if (cmd == build_mask) return cmd_build_mask(s);
    if (cmd == run) return cmd_run(s);
    if (cmd == evaluate) return cmd_evaluate(s, s.ablation_grid);
    if (cmd == ablate) return cmd_evaluate(s, true);
    if (cmd == depth) return cmd_depth(s);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
