// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/layoutjoint.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "layoutjoint/depth.hpp"
#include "layoutjoint/error.hpp"
#include "layoutjoint/eval.hpp"
#include "layoutjoint/layout.hpp"
#include "layoutjoint/layout_json.hpp"
#include "layoutjoint/mask.hpp"
#include "layoutjoint/pgm.hpp"
#include "layoutjoint/pipeline.hpp"
#include "layoutjoint/state_dump.hpp"

using namespace layoutjoint;
using nlohmann::json;

struct lj_layout {
  ValidatedLayout value;
};

struct lj_mask {
  SegmentMap segments;
  PhaseSchedule schedule;
  int step = 0;
  int resolution = 0;
  MaskConfig config;
  JointAttentionMask mask;
};

struct lj_render {
  ValidatedLayout layout;
  RenderOptions options;
  double iou_threshold = kDefaultIouThreshold;
  RenderResult result;
};

struct lj_depth {
  DepthMap value;
};

struct lj_suite {
  std::vector<Layout> layouts;
};

struct lj_report {
  EvalReport value;
};

namespace {

thread_local std::string g_last_error;

lj_status fail(lj_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
lj_status guarded(F&& body) {
  try {
    body();
    return LJ_OK;
  } catch (const Error& e) {
    return fail(static_cast<lj_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LJ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LJ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LJ_ERR_INTERNAL, "unknown failure");
  }
}

void require(bool condition, const char* message) {
  if (!condition) throw Error(ErrorCode::kInvalidArgument, message);
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

lj_options defaults() {
  lj_options o;
  lj_options_init(&o);
  return o;
}

const lj_options& or_defaults(const lj_options* options, lj_options& storage) {
  if (options != nullptr) return *options;
  storage = defaults();
  return storage;
}

MaskConfig mask_config(const lj_options& o) {
  MaskConfig c;
  c.i2i_control = o.i2i_control != 0;
  c.i2t_control = o.i2t_control != 0;
  c.t2i_control = o.t2i_control != 0;
  c.t2t_control = o.t2t_control != 0;
  c.detail_renderer = o.detail_renderer != 0;
  c.global_reads_instance_text = o.global_reads_instance_text != 0;
  return c;
}

AttributeVocab vocab_of(const lj_options& o) {
  return o.attributes == nullptr ? AttributeVocab() : AttributeVocab::parse(o.attributes);
}

int effective_resolution(const lj_options& o, int layout_resolution) {
  if (o.resolution < 0) throw Error(ErrorCode::kNonPositiveResolution, "resolution must be positive");
  return o.resolution == 0 ? layout_resolution : o.resolution;
}

PhaseSchedule schedule_of(const lj_options& o, int resolution) {
  if (o.total_steps < 0) throw Error(ErrorCode::kInvalidArgument, "total_steps must not be negative");
  if (o.gamma < 0) return PhaseSchedule::for_resolution(resolution, o.total_steps);
  return PhaseSchedule(o.total_steps, o.gamma);
}

RenderOptions render_options(const lj_options& o, int resolution) {
  require(o.seg_len >= 1, "seg_len must be at least 1");
  require(o.embed_dim >= 2, "embed_dim must be at least 2");
  require(o.heads >= 1, "heads must be at least 1");
  RenderOptions r;
  r.grid_h = r.grid_w = grid_for_resolution(resolution, o.patch_size);
  r.seg_len = static_cast<std::size_t>(o.seg_len);
  r.embedding.dim = static_cast<std::size_t>(o.embed_dim);
  r.embedding.vocab = vocab_of(o);
  r.heads = static_cast<std::size_t>(o.heads);
  r.seed = o.seed;
  r.schedule = schedule_of(o, resolution);
  r.mask = mask_config(o);
  return r;
}

json config_json(const MaskConfig& c) {
  return {{"i2i_control", c.i2i_control},
          {"i2t_control", c.i2t_control},
          {"t2i_control", c.t2i_control},
          {"t2t_control", c.t2t_control},
          {"detail_renderer", c.detail_renderer},
          {"global_reads_instance_text", c.global_reads_instance_text}};
}

json segments_json(const SegmentMap& seg) {
  json out = json::array();
  for (const Segment& s : seg.segments) {
    out.push_back({{"instance", s.instance}, {"offset", s.offset}, {"length", s.length}});
  }
  return out;
}

std::size_t max_or_default(std::size_t max_instances) {
  return max_instances == 0 ? kDefaultMaxInstances : max_instances;
}

}  // namespace

extern "C" {

void lj_options_init(lj_options* options) {
  if (options == nullptr) return;
  *options = lj_options{};
  options->total_steps = 20;
  options->gamma = -1;
  options->patch_size = kDefaultPatchSize;
  options->seg_len = 8;
  options->embed_dim = 32;
  options->heads = 1;
  options->seed = 0;
  options->i2i_control = 1;
  options->i2t_control = 1;
  options->t2i_control = 1;
  options->t2t_control = 1;
  options->detail_renderer = 1;
  options->global_reads_instance_text = 0;
  options->attributes = nullptr;
  options->iou_threshold = kDefaultIouThreshold;
  options->jobs = 1;
  options->max_instances = kDefaultMaxInstances;
  options->resolution = 0;
}

const char* lj_version(void) { return "1.0.0"; }

const char* lj_last_error(void) { return g_last_error.c_str(); }

const char* lj_status_name(lj_status status) {
  if (status == LJ_OK) return "Ok";
  if (status == LJ_ERR_INTERNAL) return "Internal";
  if (status >= LJ_ERR_EMPTY_INSTANCE_TEXT && status <= LJ_ERR_FORMAT) {
    return to_string(static_cast<ErrorCode>(status));
  }
  return "Unknown";
}

void lj_string_free(char* s) { std::free(s); }

// ---- layouts ---------------------------------------------------------------

lj_status lj_layout_parse(const char* text, size_t max_instances, lj_layout** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new lj_layout{validate_layout(parse_layout_json(text), max_or_default(max_instances))};
  });
}

lj_status lj_layout_load(const char* path, size_t max_instances, lj_layout** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    Layout raw = load_layout_file(path);
    try {
      *out = new lj_layout{validate_layout(std::move(raw), max_or_default(max_instances))};
    } catch (const Error& e) {
      throw Error(e.code(), std::string(path) + ": " + e.detail());
    }
  });
}

void lj_layout_free(lj_layout* layout) { delete layout; }

size_t lj_layout_instance_count(const lj_layout* layout) { return layout == nullptr ? 0 : layout->value.size(); }

int lj_layout_resolution(const lj_layout* layout) { return layout == nullptr ? 0 : layout->value.resolution(); }

lj_status lj_layout_box(const lj_layout* layout, size_t index, double box[4]) {
  return guarded([&] {
    require(layout != nullptr && box != nullptr, "null argument");
    require(index < layout->value.size(), "instance index out of range");
    const BoundingBox& b = layout->value.instances()[index].box;
    box[0] = b.x0;
    box[1] = b.y0;
    box[2] = b.x1;
    box[3] = b.y1;
  });
}

lj_status lj_layout_to_json(const lj_layout* layout, char** out) {
  return guarded([&] {
    require(layout != nullptr && out != nullptr, "null argument");
    *out = duplicate(layout_to_json(layout->value.layout()));
  });
}

lj_status lj_box_iou(const double a[4], const double b[4], double* out) {
  return guarded([&] {
    require(a != nullptr && b != nullptr && out != nullptr, "null argument");
    *out = box_iou({a[0], a[1], a[2], a[3]}, {b[0], b[1], b[2], b[3]});
  });
}

lj_status lj_gamma_for_resolution(int resolution, int* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = gamma_for_resolution(resolution);
  });
}

lj_status lj_resolve_schedule(const lj_layout* layout, const lj_options* options, int* gamma, int* total_steps) {
  return guarded([&] {
    require(layout != nullptr, "null argument");
    lj_options storage;
    const lj_options& o = or_defaults(options, storage);
    const PhaseSchedule s = schedule_of(o, effective_resolution(o, layout->value.resolution()));
    if (gamma != nullptr) *gamma = s.gamma();
    if (total_steps != nullptr) *total_steps = s.total_steps();
  });
}

// ---- masks -----------------------------------------------------------------

lj_status lj_mask_build(const lj_layout* layout, const lj_options* options, int step, lj_mask** out) {
  return guarded([&] {
    require(layout != nullptr && out != nullptr, "null argument");
    lj_options storage;
    const lj_options& o = or_defaults(options, storage);
    const int resolution = effective_resolution(o, layout->value.resolution());
    const RenderOptions r = render_options(o, resolution);
    auto m = std::make_unique<lj_mask>();
    m->segments = build_segment_map(layout->value, rasterize(layout->value, r.grid_h, r.grid_w), r.seg_len);
    m->schedule = r.schedule;
    m->step = step;
    m->resolution = resolution;
    m->config = r.mask;
    m->mask = build_mask(m->segments, m->schedule, step, m->config);
    *out = m.release();
  });
}

void lj_mask_free(lj_mask* mask) { delete mask; }

size_t lj_mask_side(const lj_mask* mask) { return mask == nullptr ? 0 : mask->mask.side(); }

size_t lj_mask_text_len(const lj_mask* mask) { return mask == nullptr ? 0 : mask->mask.text_len(); }

int lj_mask_allowed(const lj_mask* mask, size_t query, size_t key) {
  if (mask == nullptr || query >= mask->mask.side() || key >= mask->mask.side()) return -1;
  return mask->mask.allowed(query, key) ? 1 : 0;
}

lj_status lj_mask_write_pgm(const lj_mask* mask, const char* path) {
  return guarded([&] {
    require(mask != nullptr && path != nullptr, "null argument");
    write_file(path, encode_pgm(mask_to_image(mask->mask)));
  });
}

lj_status lj_mask_sidecar_json(const lj_mask* mask, char** out) {
  return guarded([&] {
    require(mask != nullptr && out != nullptr, "null argument");
    const SegmentMap& seg = mask->segments;
    json doc;
    doc["side"] = mask->mask.side();
    doc["text_len"] = seg.text_len;
    doc["image_len"] = seg.image_len;
    doc["seg_len"] = seg.seg_len;
    doc["grid"] = {{"h", seg.grid_h}, {"w", seg.grid_w}};
    doc["resolution"] = mask->resolution;
    doc["segments"] = segments_json(seg);
    doc["image_owner"] = seg.image_owner;
    doc["step"] = mask->step;
    doc["total_steps"] = mask->schedule.total_steps();
    doc["gamma"] = mask->schedule.gamma();
    doc["phase"] = to_string(phase_of(mask->schedule, mask->step));
    doc["config"] = config_json(mask->config);
    doc["allowed_cells"] = mask->mask.count_allowed();
    *out = duplicate(doc.dump(2) + "\n");
  });
}

// ---- sampler ---------------------------------------------------------------

lj_status lj_render_layout(const lj_layout* layout, const lj_options* options, int keep_history, lj_render** out) {
  return guarded([&] {
    require(layout != nullptr && out != nullptr, "null argument");
    lj_options storage;
    const lj_options& o = or_defaults(options, storage);
    RenderOptions r = render_options(o, effective_resolution(o, layout->value.resolution()));
    r.keep_history = keep_history != 0;
    auto render = std::unique_ptr<lj_render>(new lj_render{layout->value, r, o.iou_threshold, {}});
    render->result = render_layout(render->layout, r);
    *out = render.release();
  });
}

void lj_render_free(lj_render* render) { delete render; }

lj_status lj_render_to_json(const lj_render* render, char** out) {
  return guarded([&] {
    require(render != nullptr && out != nullptr, "null argument");
    const RenderOptions& r = render->options;
    const RenderResult& res = render->result;
    json doc;
    doc["grid"] = {{"h", r.grid_h}, {"w", r.grid_w}};
    doc["seed"] = r.seed;
    doc["total_steps"] = r.schedule.total_steps();
    doc["gamma"] = r.schedule.gamma();
    doc["config"] = config_json(r.mask);
    doc["attributes"] = r.embedding.vocab.words();
    doc["region_owner"] = res.region.owner;
    doc["decoded"] = res.decoded;
    json instances = json::array();
    for (const Instance& inst : render->layout.instances()) {
      json item = {{"id", inst.id}, {"text", inst.text}, {"box", {inst.box.x0, inst.box.y0, inst.box.x1, inst.box.y1}}};
      if (r.embedding.vocab.index_of(inst.attribute) >= 0) {
        const InstanceVerdict v =
            judge_instance(inst, res.decoded, r.grid_h, r.grid_w, r.embedding.vocab, render->iou_threshold);
        item["attribute"] = v.target_attribute;
        item["iou"] = v.iou;
        item["position_ok"] = v.position_ok;
        item["attribute_ok"] = v.attribute_ok;
        item["success"] = v.success;
        if (v.predicted) {
          item["predicted_box"] = {v.predicted->x0, v.predicted->y0, v.predicted->x1, v.predicted->y1};
        } else {
          item["predicted_box"] = nullptr;
        }
      } else {
        item["attribute"] = nullptr;
      }
      instances.push_back(std::move(item));
    }
    doc["instances"] = std::move(instances);
    *out = duplicate(doc.dump(2) + "\n");
  });
}

lj_status lj_render_decoded(const lj_render* render, int* labels, size_t cap, size_t* count) {
  return guarded([&] {
    require(render != nullptr, "null argument");
    require(labels != nullptr || cap == 0, "null label buffer");
    const std::vector<int>& decoded = render->result.decoded;
    std::copy_n(decoded.begin(), std::min(cap, decoded.size()), labels);
    if (count != nullptr) *count = decoded.size();
  });
}

lj_status lj_render_write_states(const lj_render* render, const char* path) {
  return guarded([&] {
    require(render != nullptr && path != nullptr, "null argument");
    const RenderResult& res = render->result;
    require(render->options.keep_history, "render was created without keep_history");
    std::vector<StateSnapshot> snapshots;
    snapshots.push_back({0, res.initial});
    for (std::size_t i = 0; i < res.state.history.size(); ++i) {
      snapshots.push_back({static_cast<std::uint32_t>(i + 1), res.state.history[i]});
    }
    write_file(path, encode_state_dump(snapshots, res.segments.text_len));
  });
}

// ---- depth stage -----------------------------------------------------------

lj_status lj_depth_from_layout(const lj_layout* layout, int height, int width, lj_depth** out) {
  return guarded([&] {
    require(layout != nullptr && out != nullptr, "null argument");
    require(height > 0 && width > 0, "depth size must be positive");
    *out = new lj_depth{layout_to_depth(layout->value, height, width)};
  });
}

lj_status lj_depth_load_pgm(const char* path, lj_depth** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    const std::string bytes = read_file(path);
    try {
      *out = new lj_depth{depth_from_image(decode_pgm(bytes))};
    } catch (const Error& e) {
      throw Error(e.code(), std::string(path) + ": " + e.detail());
    }
  });
}

void lj_depth_free(lj_depth* depth) { delete depth; }

lj_status lj_depth_size(const lj_depth* depth, int* height, int* width) {
  return guarded([&] {
    require(depth != nullptr, "null argument");
    if (height != nullptr) *height = depth->value.h;
    if (width != nullptr) *width = depth->value.w;
  });
}

double lj_depth_at(const lj_depth* depth, int row, int col) {
  if (depth == nullptr || row < 0 || col < 0 || row >= depth->value.h || col >= depth->value.w) return -1.0;
  return depth->value.at(row, col);
}

lj_status lj_depth_write_pgm(const lj_depth* depth, const char* path) {
  return guarded([&] {
    require(depth != nullptr && path != nullptr, "null argument");
    write_file(path, encode_pgm(depth_to_image(depth->value)));
  });
}

lj_status lj_depth_refine(const lj_depth* depth, const lj_layout* layout, lj_layout** out, char** notes) {
  return guarded([&] {
    require(depth != nullptr && layout != nullptr && out != nullptr, "null argument");
    RefineResult refined = refine_layout(layout->value, depth->value);
    std::string joined;
    for (const std::string& note : refined.notes) joined += note + "\n";
    char* notes_out = notes != nullptr ? duplicate(joined) : nullptr;
    *out = new lj_layout{std::move(refined.layout)};
    if (notes != nullptr) *notes = notes_out;
  });
}

// ---- evaluation ------------------------------------------------------------

lj_status lj_suite_generate(size_t count, int min_instances, int max_instances, uint64_t seed, int resolution,
                            const lj_options* options, lj_suite** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    lj_options storage;
    SuiteOptions s;
    s.count = count;
    s.min_instances = min_instances;
    s.max_instances = max_instances;
    s.seed = seed;
    s.resolution = resolution;
    s.vocab = vocab_of(or_defaults(options, storage));
    *out = new lj_suite{generate_suite(s)};
  });
}

lj_status lj_suite_new(lj_suite** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = new lj_suite{};
  });
}

lj_status lj_suite_add(lj_suite* suite, const lj_layout* layout) {
  return guarded([&] {
    require(suite != nullptr && layout != nullptr, "null argument");
    suite->layouts.push_back(layout->value.layout());
  });
}

size_t lj_suite_size(const lj_suite* suite) { return suite == nullptr ? 0 : suite->layouts.size(); }

void lj_suite_free(lj_suite* suite) { delete suite; }

lj_status lj_evaluate(const lj_suite* suite, const lj_options* options, const char* config_name, lj_report** out) {
  return guarded([&] {
    require(suite != nullptr && out != nullptr, "null argument");
    require(!suite->layouts.empty(), "suite is empty");
    lj_options storage;
    const lj_options& o = or_defaults(options, storage);
    require(o.jobs >= 1, "jobs must be at least 1");
    EvalOptions e;
    e.render = render_options(o, effective_resolution(o, suite->layouts.front().resolution));
    e.iou_threshold = o.iou_threshold;
    e.jobs = static_cast<std::size_t>(o.jobs);
    *out = new lj_report{evaluate_suite(suite->layouts, e.render.mask, e, config_name ? config_name : "custom")};
  });
}

void lj_report_free(lj_report* report) { delete report; }

lj_status lj_report_metrics(const lj_report* report, double* miou, double* isr, double* sr) {
  return guarded([&] {
    require(report != nullptr, "null argument");
    if (miou != nullptr) *miou = report->value.overall.miou;
    if (isr != nullptr) *isr = report->value.overall.isr;
    if (sr != nullptr) *sr = report->value.overall.sr;
  });
}

lj_status lj_report_to_json(const lj_report* report, char** out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "null argument");
    *out = duplicate(report_to_json(report->value));
  });
}

lj_status lj_reports_to_csv(const lj_report* const* reports, size_t count, char** out) {
  return guarded([&] {
    require(out != nullptr && (reports != nullptr || count == 0), "null argument");
    std::vector<EvalReport> copies;
    copies.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      require(reports[i] != nullptr, "null report");
      copies.push_back(reports[i]->value);
    }
    *out = duplicate(reports_to_csv(copies));
  });
}

size_t lj_ablation_count(void) { return ablation_rows().size(); }

lj_status lj_ablation_apply(size_t index, lj_options* options, const char** name) {
  static const std::vector<AblationRow> rows = ablation_rows();
  return guarded([&] {
    require(options != nullptr, "null argument");
    require(index < rows.size(), "ablation index out of range");
    const MaskConfig& c = rows[index].config;
    options->i2i_control = c.i2i_control;
    options->i2t_control = c.i2t_control;
    options->t2i_control = c.t2i_control;
    options->t2t_control = c.t2t_control;
    options->detail_renderer = c.detail_renderer;
    if (name != nullptr) *name = rows[index].name.c_str();
  });
}

}  // extern "C"
