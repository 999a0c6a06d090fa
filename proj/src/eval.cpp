// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "layoutjoint/error.hpp"

namespace layoutjoint {
namespace {

constexpr const char* kObjects[] = {"cup",   "car",   "dog",      "cat",  "bench", "vase",  "chair",
                                    "clock", "bowl",  "umbrella", "bus",  "kite",  "bottle", "horse",
                                    "apple", "teddy", "suitcase", "book", "bird",  "laptop"};

class SuiteRng {
 public:
  explicit SuiteRng(std::uint64_t seed) : state_(seed) {}
  double uniform() {
    state_ = mix_seed(state_);
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::uint64_t state_;
};

bool separated(const BoundingBox& a, const BoundingBox& b, double gap) {
  return a.x1 + gap <= b.x0 || b.x1 + gap <= a.x0 || a.y1 + gap <= b.y0 || b.y1 + gap <= a.y0;
}

// Sides of at least 0.22 span 3.5 patches on the default 16x16 grid, which
// keeps the IoU between a box and its rasterized region above 0.5.
std::vector<BoundingBox> place_boxes(SuiteRng& rng, int n) {
  constexpr double kGap = 0.07;
  constexpr double kMinSide = 0.22;
  double max_side = 0.34;
  for (;;) {
    for (int restart = 0; restart < 64; ++restart) {
      std::vector<BoundingBox> boxes;
      for (int i = 0; i < n; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 256 && !placed; ++attempt) {
          const double w = rng.uniform(kMinSide, max_side);
          const double h = rng.uniform(kMinSide, max_side);
          const double x0 = rng.uniform(0.0, 1.0 - w);
          const double y0 = rng.uniform(0.0, 1.0 - h);
          const BoundingBox cand{x0, y0, x0 + w, y0 + h};
          placed = std::all_of(boxes.begin(), boxes.end(),
                               [&](const BoundingBox& b) { return separated(cand, b, kGap); });
          if (placed) boxes.push_back(cand);
        }
        if (!placed) break;
      }
      if (static_cast<int>(boxes.size()) == n) return boxes;
    }
    max_side = std::max(kMinSide, max_side * 0.95);
  }
}

std::string ratio(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

LevelMetrics aggregate(const std::vector<const LayoutResult*>& layouts) {
  LevelMetrics m;
  std::size_t successes = 0;
  std::size_t full = 0;
  double iou_sum = 0.0;
  for (const LayoutResult* lr : layouts) {
    ++m.layouts;
    for (const InstanceVerdict& v : lr->verdicts) {
      ++m.instances;
      iou_sum += v.iou;
      if (v.success) ++successes;
    }
    if (lr->all_success()) ++full;
  }
  if (m.instances > 0) {
    m.miou = iou_sum / static_cast<double>(m.instances);
    m.isr = static_cast<double>(successes) / static_cast<double>(m.instances);
  }
  if (m.layouts > 0) m.sr = static_cast<double>(full) / static_cast<double>(m.layouts);
  return m;
}

nlohmann::json metrics_json(const LevelMetrics& m) {
  return {{"layouts", m.layouts}, {"instances", m.instances}, {"miou", m.miou}, {"isr", m.isr}, {"sr", m.sr}};
}

}  // namespace

bool LayoutResult::all_success() const {
  return !verdicts.empty() &&
         std::all_of(verdicts.begin(), verdicts.end(), [](const InstanceVerdict& v) { return v.success; });
}

EvalReport summarize(std::string config_name, const MaskConfig& config, std::vector<LayoutResult> layouts,
                     double iou_threshold) {
  EvalReport report;
  report.config_name = std::move(config_name);
  report.config = config;
  report.iou_threshold = iou_threshold;
  report.layouts = std::move(layouts);

  std::vector<const LayoutResult*> all;
  std::map<std::size_t, std::vector<const LayoutResult*>> levels;
  for (const LayoutResult& lr : report.layouts) {
    all.push_back(&lr);
    levels[lr.verdicts.size()].push_back(&lr);
  }
  report.overall = aggregate(all);
  for (const auto& [count, members] : levels) report.by_level[count] = aggregate(members);
  return report;
}

std::optional<BoundingBox> predicted_region(std::span<const int> decoded, int grid_h, int grid_w, int attribute) {
  if (grid_h < 1 || grid_w < 1 || decoded.size() != static_cast<std::size_t>(grid_h) * grid_w) {
    throw Error(ErrorCode::kDimensionMismatch, "decoded map does not match the grid");
  }
  std::vector<std::uint8_t> seen(decoded.size(), 0);
  std::vector<std::size_t> stack;
  std::size_t best_size = 0;
  int br0 = 0, br1 = 0, bc0 = 0, bc1 = 0;
  for (std::size_t start = 0; start < decoded.size(); ++start) {
    if (decoded[start] != attribute || seen[start]) continue;
    int r0 = grid_h, r1 = -1, c0 = grid_w, c1 = -1;
    std::size_t size = 0;
    seen[start] = 1;
    stack.assign(1, start);
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      ++size;
      const int r = static_cast<int>(idx / static_cast<std::size_t>(grid_w));
      const int c = static_cast<int>(idx % static_cast<std::size_t>(grid_w));
      r0 = std::min(r0, r);
      r1 = std::max(r1, r);
      c0 = std::min(c0, c);
      c1 = std::max(c1, c);
      auto visit = [&](int nr, int nc) {
        if (nr < 0 || nr >= grid_h || nc < 0 || nc >= grid_w) return;
        const std::size_t n = static_cast<std::size_t>(nr) * grid_w + nc;
        if (!seen[n] && decoded[n] == attribute) {
          seen[n] = 1;
          stack.push_back(n);
        }
      };
      visit(r - 1, c);
      visit(r + 1, c);
      visit(r, c - 1);
      visit(r, c + 1);
    }
    if (size > best_size) {
      best_size = size;
      br0 = r0;
      br1 = r1;
      bc0 = c0;
      bc1 = c1;
    }
  }
  if (best_size == 0) return std::nullopt;
  return BoundingBox{static_cast<double>(bc0) / grid_w, static_cast<double>(br0) / grid_h,
                     static_cast<double>(bc1 + 1) / grid_w, static_cast<double>(br1 + 1) / grid_h};
}

InstanceVerdict judge_instance(const Instance& instance, std::span<const int> decoded, int grid_h, int grid_w,
                               const AttributeVocab& vocab, double iou_threshold) {
  InstanceVerdict v;
  v.instance_id = instance.id;
  v.target_attribute = instance.attribute;
  const int target = vocab.index_of(instance.attribute);
  if (target < 0) return v;
  v.predicted = predicted_region(decoded, grid_h, grid_w, target);
  if (!v.predicted) return v;
  v.iou = box_iou(*v.predicted, instance.box);
  v.position_ok = v.iou >= iou_threshold;

  // Plurality over the patches of the predicted box; NONE counts as a label.
  const int c0 = static_cast<int>(std::lround(v.predicted->x0 * grid_w));
  const int c1 = static_cast<int>(std::lround(v.predicted->x1 * grid_w));
  const int r0 = static_cast<int>(std::lround(v.predicted->y0 * grid_h));
  const int r1 = static_cast<int>(std::lround(v.predicted->y1 * grid_h));
  std::map<int, std::size_t> votes;
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) ++votes[decoded[static_cast<std::size_t>(r) * grid_w + c]];
  }
  std::size_t top = 0;
  std::size_t target_votes = 0;
  std::size_t top_holders = 0;
  for (const auto& [label, count] : votes) {
    if (count > top) {
      top = count;
      top_holders = 1;
    } else if (count == top) {
      ++top_holders;
    }
    if (label == target) target_votes = count;
  }
  v.attribute_ok = target_votes == top && top_holders == 1;
  v.success = v.position_ok && v.attribute_ok;
  return v;
}

std::vector<Layout> generate_suite(const SuiteOptions& options) {
  if (options.count < 1) throw Error(ErrorCode::kInvalidArgument, "suite count must be at least 1");
  if (options.min_instances < 2 || options.max_instances > 6 || options.min_instances > options.max_instances) {
    throw Error(ErrorCode::kInvalidArgument, "instance range must lie within [2, 6]");
  }
  if (options.vocab.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two attribute words");

  SuiteRng rng(mix_seed(options.seed ^ 0x7375697465ull));
  const std::size_t span = static_cast<std::size_t>(options.max_instances - options.min_instances + 1);
  constexpr std::size_t kObjectCount = sizeof(kObjects) / sizeof(kObjects[0]);

  std::vector<Layout> suite;
  suite.reserve(options.count);
  for (std::size_t k = 0; k < options.count; ++k) {
    const int n = options.min_instances + static_cast<int>(rng.below(span));
    const std::vector<BoundingBox> boxes = place_boxes(rng, n);

    std::vector<std::size_t> attrs(options.vocab.size());
    for (std::size_t i = 0; i < attrs.size(); ++i) attrs[i] = i;
    for (std::size_t i = attrs.size() - 1; i > 0; --i) std::swap(attrs[i], attrs[rng.below(i + 1)]);

    Layout layout;
    layout.resolution = options.resolution;
    std::string global = "a photo of";
    for (int i = 0; i < n; ++i) {
      const std::string object = kObjects[rng.below(kObjectCount)];
      const std::string& attribute = options.vocab.word(attrs[static_cast<std::size_t>(i) % attrs.size()]);
      Instance inst;
      inst.id = i + 1;
      inst.text = "a " + attribute + " " + object;
      inst.attribute = attribute;
      inst.box = boxes[static_cast<std::size_t>(i)];
      layout.instances.push_back(std::move(inst));
      global += (i == 0 ? " a " : (i + 1 == n ? " and a " : ", a ")) + object;
    }
    layout.global_text = std::move(global);
    suite.push_back(std::move(layout));
  }
  return suite;
}

EvalReport evaluate_suite(std::span<const Layout> suite, const MaskConfig& config, const EvalOptions& options,
                          std::string config_name) {
  if (suite.empty()) throw Error(ErrorCode::kInvalidArgument, "suite is empty");
  std::vector<ValidatedLayout> layouts;
  layouts.reserve(suite.size());
  for (std::size_t k = 0; k < suite.size(); ++k) {
    layouts.push_back(validate_layout(suite[k]));
    for (const Instance& inst : layouts.back().instances()) {
      if (options.render.embedding.vocab.index_of(inst.attribute) < 0) {
        throw Error(ErrorCode::kInvalidArgument, "layout " + std::to_string(k) + " instance " +
                                                     std::to_string(inst.id) + " has no vocabulary attribute");
      }
    }
  }

  std::vector<LayoutResult> results(layouts.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= layouts.size()) return;
      try {
        RenderOptions render = options.render;
        render.mask = config;
        render.keep_history = false;
        render.seed = mix_seed(options.render.seed ^ (0x9e3779b97f4a7c15ull * (k + 1)));
        const RenderResult rendered = render_layout(layouts[k], render);
        LayoutResult& lr = results[k];
        lr.layout_index = k;
        for (const Instance& inst : layouts[k].instances()) {
          lr.verdicts.push_back(judge_instance(inst, rendered.decoded, render.grid_h, render.grid_w,
                                               render.embedding.vocab, options.iou_threshold));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(layouts.size());
      }
    }
  };

  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, layouts.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(std::move(config_name), config, std::move(results), options.iou_threshold);
}

std::vector<AblationRow> ablation_rows() {
  std::vector<AblationRow> rows;
  MaskConfig c;
  c.i2i_control = false;
  rows.push_back({"w/o I2I control", c});
  c = {};
  c.i2t_control = false;
  rows.push_back({"w/o I2T control", c});
  c = {};
  c.t2i_control = false;
  rows.push_back({"w/o T2I control", c});
  c = {};
  c.t2t_control = false;
  rows.push_back({"w/o T2T control", c});
  c = {};
  c.detail_renderer = false;
  rows.push_back({"w/o detail renderer", c});
  rows.push_back({"w/ all", MaskConfig{}});
  return rows;
}

std::string report_to_json(const EvalReport& report) {
  using nlohmann::json;
  json doc;
  doc["config"] = report.config_name;
  doc["mask_config"] = {{"i2i_control", report.config.i2i_control},
                        {"i2t_control", report.config.i2t_control},
                        {"t2i_control", report.config.t2i_control},
                        {"t2t_control", report.config.t2t_control},
                        {"detail_renderer", report.config.detail_renderer},
                        {"global_reads_instance_text", report.config.global_reads_instance_text}};
  doc["iou_threshold"] = report.iou_threshold;
  doc["attribute_check"] = "plurality of decoded attribute tokens inside the predicted box (detector proxy)";
  doc["overall"] = metrics_json(report.overall);
  json levels = json::object();
  for (const auto& [count, m] : report.by_level) levels["L" + std::to_string(count)] = metrics_json(m);
  doc["levels"] = std::move(levels);
  json per_layout = json::array();
  for (const LayoutResult& lr : report.layouts) {
    json instances = json::array();
    for (const InstanceVerdict& v : lr.verdicts) {
      json item = {{"id", v.instance_id},           {"attribute", v.target_attribute},
                   {"iou", v.iou},                  {"position_ok", v.position_ok},
                   {"attribute_ok", v.attribute_ok}, {"success", v.success}};
      if (v.predicted) {
        item["predicted_box"] = {v.predicted->x0, v.predicted->y0, v.predicted->x1, v.predicted->y1};
      } else {
        item["predicted_box"] = nullptr;
      }
      instances.push_back(std::move(item));
    }
    per_layout.push_back({{"index", lr.layout_index}, {"instances", std::move(instances)}});
  }
  doc["per_layout"] = std::move(per_layout);
  return doc.dump(2) + "\n";
}

std::string reports_to_csv(std::span<const EvalReport> reports) {
  std::string out = "config";
  for (const char* metric : {"ISR", "MIoU"}) {
    for (int level = 2; level <= 6; ++level) out += std::string(",") + metric + "_L" + std::to_string(level);
    out += std::string(",") + metric + "_AVG";
  }
  out += ",SR\n";
  for (const EvalReport& report : reports) {
    std::string name = report.config_name;
    if (name.find_first_of(",\"") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : name) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      name = quoted + "\"";
    }
    out += name;
    for (int metric = 0; metric < 2; ++metric) {
      for (std::size_t level = 2; level <= 6; ++level) {
        out += ",";
        if (auto it = report.by_level.find(level); it != report.by_level.end()) {
          out += ratio(metric == 0 ? it->second.isr : it->second.miou);
        }
      }
      out += "," + ratio(metric == 0 ? report.overall.isr : report.overall.miou);
    }
    out += "," + ratio(report.overall.sr) + "\n";
  }
  return out;
}

}  // namespace layoutjoint
