// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance <path-to-layoutjoint-cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "layoutjoint/attention.hpp"
#include "layoutjoint/depth.hpp"
#include "layoutjoint/error.hpp"
#include "layoutjoint/eval.hpp"
#include "layoutjoint/layout.hpp"
#include "layoutjoint/layout_json.hpp"
#include "layoutjoint/mask.hpp"
#include "layoutjoint/pipeline.hpp"
#include "layoutjoint/tokens.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace layoutjoint;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// ---- 1 ----------------------------------------------------------------------

void mask_oracle_equivalence() {
  const auto t0 = Clock::now();
  oracle::Rng rng(101);
  std::size_t mismatched = 0;
  std::size_t masks = 0;
  for (int c = 0; c < 500; ++c) {
    const int n = rng.range(1, 6);
    const int grid_h = c % 10 == 0 ? 32 : rng.range(1, 32);
    const int grid_w = c % 10 == 0 ? 32 : rng.range(1, 32);
    const std::size_t seg_len = static_cast<std::size_t>(rng.range(1, 8));
    Layout raw = oracle::random_layout(rng, n);

    PhaseSchedule schedule;
    int strict_steps = 0;
    if (c % 2 == 0) {
      const int resolutions[] = {512, 768, 1024};
      raw.resolution = resolutions[rng.range(0, 2)];
      schedule = PhaseSchedule::for_resolution(raw.resolution, 20);
      strict_steps = oracle::strict_steps(raw.resolution);
    } else {
      strict_steps = rng.range(0, 20);
      schedule = PhaseSchedule(20, strict_steps);
    }
    const bool global_reads = c % 4 == 1;

    const ValidatedLayout layout = validate_layout(raw);
    const SegmentMap seg = build_segment_map(layout, rasterize(layout, grid_h, grid_w), seg_len);
    const std::vector<oracle::Token> toks = oracle::tokens(raw, grid_h, grid_w, seg_len);
    std::vector<std::uint8_t> pad(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) pad[i] = toks[i].pad;

    for (unsigned bits = 0; bits < 32; ++bits) {
      const MaskConfig cfg = oracle::config_from_bits(bits, global_reads);
      for (int strict = 0; strict < 2; ++strict) {
        const std::vector<std::uint8_t> expected = oracle::mask_cells(toks, strict != 0, cfg);
        for (int step = 0; step < 20; ++step) {
          if ((step < strict_steps) != (strict != 0)) continue;
          const JointAttentionMask m = build_mask(seg, schedule, step, cfg);
          ++masks;
          if (m.side() != toks.size()) {
            mismatched += expected.size();
            continue;
          }
          if (std::memcmp(m.cells().data(), expected.data(), expected.size()) != 0) {
            for (std::size_t i = 0; i < expected.size(); ++i) mismatched += m.cells()[i] != expected[i];
          }
          for (std::size_t i = 0; i < pad.size(); ++i) mismatched += m.is_pad(i) != (pad[i] != 0);
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  report(1, "mask oracle equivalence", mismatched == 0 && masks == 500u * 20u * 32u && secs < 60.0,
         fmt("500 cases, %zu masks, %zu mismatching cells, %.1f s (limit 60 s)", masks, mismatched, secs));
}

// ---- 2 ----------------------------------------------------------------------

void gamma_schedule() {
  bool ok = true;
  std::string detail;
  for (int res : {512, 768, 1024}) {
    const PhaseSchedule s = PhaseSchedule::for_resolution(res, 20);
    int strict = 0;
    for (int step = 0; step < s.total_steps(); ++step) strict += phase_of(s, step) == Phase::kStrict;
    const int want = res == 512 ? 4 : res == 768 ? 3 : 2;
    ok = ok && strict == want && s.total_steps() == 20;
    detail += fmt("%d->%d/20 ", res, strict);
  }
  report(2, "gamma schedule", ok, detail + "(expected 4, 3, 2)");
}

// ---- 3 ----------------------------------------------------------------------

void attention_oracle() {
  oracle::Rng rng(303);
  double max_diff = 0.0;
  double max_row_err = 0.0;
  std::size_t forbidden_nonzero = 0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t side = static_cast<std::size_t>(rng.range(1, 24));
    const std::size_t text_len = static_cast<std::size_t>(rng.range(0, static_cast<int>(side)));
    const std::size_t dim = static_cast<std::size_t>(rng.range(2, 8));
    const std::size_t attr = static_cast<std::size_t>(rng.range(0, static_cast<int>(dim) - 1));
    std::vector<std::size_t> head_options;
    for (std::size_t h = 1; h <= dim; ++h) {
      if (dim % h == 0) head_options.push_back(h);
    }
    const std::size_t heads = head_options[static_cast<std::size_t>(rng.range(0, static_cast<int>(head_options.size()) - 1))];
    const AttentionParams params = AttentionParams::create(dim, attr, heads, rng.next());

    std::vector<std::uint8_t> pad(side, 0);
    for (std::size_t i = 0; i < text_len; ++i) pad[i] = rng.range(0, 3) == 0;
    pad[side - 1] = 0;
    const double density = rng.uniform(0.05, 1.0);
    std::vector<std::uint8_t> cells(side * side, 0);
    for (std::size_t q = 0; q < side; ++q) {
      if (pad[q]) continue;
      bool any = false;
      for (std::size_t k = 0; k < side; ++k) {
        if (!pad[k] && rng.uniform() < density) cells[q * side + k] = 1, any = true;
      }
      if (!any) cells[q * side + side - 1] = 1;
    }
    const JointAttentionMask mask = JointAttentionMask::from_cells(side, text_len, cells, pad);
    EmbeddingBlock x(side, dim, attr);
    const double spread = rng.uniform(0.1, 6.0);
    for (double& v : x.values) v = rng.uniform(-spread, spread);

    const EmbeddingBlock got = masked_attention(x, mask, params);
    std::vector<double> ref_w;
    const EmbeddingBlock want = oracle::attention(x, mask, params, &ref_w);
    for (std::size_t i = 0; i < got.values.size(); ++i) {
      max_diff = std::max(max_diff, std::fabs(got.values[i] - want.values[i]));
    }
    const std::vector<double> w = attention_weights(x, mask, params, 0);
    for (std::size_t q = 0; q < side; ++q) {
      if (pad[q]) continue;
      double sum = 0.0;
      for (std::size_t k = 0; k < side; ++k) {
        const double v = w[q * side + k];
        if (!mask.allowed(q, k) && v != 0.0) ++forbidden_nonzero;
        max_diff = std::max(max_diff, std::fabs(v - ref_w[q * side + k]));
        sum += v;
      }
      max_row_err = std::max(max_row_err, std::fabs(sum - 1.0));
    }
  }
  report(3, "attention oracle", max_diff <= 1e-12 && forbidden_nonzero == 0 && max_row_err <= 1e-9,
         fmt("200 cases, max |diff| %.3g (limit 1e-12), forbidden nonzero %zu, max |row sum - 1| %.3g (limit 1e-9)",
             max_diff, forbidden_nonzero, max_row_err));
}

// ---- 4 ----------------------------------------------------------------------

bool rows_identical(const EmbeddingBlock& a, const EmbeddingBlock& b, std::size_t row) {
  return std::memcmp(a.row(row).data(), b.row(row).data(), a.dim * sizeof(double)) == 0;
}

void isolation_property() {
  oracle::Rng rng(404);
  std::size_t image_violations = 0;
  std::size_t text_violations = 0;
  std::size_t image_checks = 0;
  std::size_t text_checks = 0;
  const MaskConfig cfg;
  for (int c = 0; c < 100; ++c) {
    const int n = rng.range(2, 6);
    const int grid = rng.range(6, 12);
    const ValidatedLayout layout = validate_layout(oracle::random_layout(rng, n));
    const SegmentMap seg = build_segment_map(layout, rasterize(layout, grid, grid), 6);
    const AttentionParams params = AttentionParams::create(16, 6, c % 2 ? 2 : 1, rng.next());
    AttributeVocab vocab({"a", "b", "c", "d", "e", "f"});
    const EmbeddingBlock initial = embed(seg, rng.next(), EmbeddingOptions{16, vocab});
    const PhaseSchedule schedule(20, 4);

    auto in_scope = [&](std::size_t pos, int inst) {
      return seg.is_text(pos) ? seg.text_segment[pos] == inst : seg.owner_of_image(pos) == inst;
    };
    auto perturb = [&](EmbeddingBlock block, int inst) {
      for (std::size_t r = 0; r < block.rows; ++r) {
        if (in_scope(r, inst) || seg.is_pad(r)) continue;
        for (double& v : block.row(r)) v += rng.uniform(-2.0, 2.0);
      }
      return block;
    };

    // Image tokens of instance i over the whole STRICT phase.
    std::vector<EmbeddingBlock> base{initial};
    for (int step = 0; step < schedule.gamma(); ++step) {
      base.push_back(sampler_step(seg, base.back(), schedule, step, cfg, params));
    }
    for (int inst = 1; inst <= n; ++inst) {
      EmbeddingBlock state = perturb(initial, inst);
      for (int step = 0; step < schedule.gamma(); ++step) {
        state = sampler_step(seg, state, schedule, step, cfg, params);
        for (std::size_t r = seg.text_len; r < seg.total(); ++r) {
          if (seg.owner_of_image(r) != inst) continue;
          ++image_checks;
          image_violations += !rows_identical(state, base[static_cast<std::size_t>(step) + 1], r);
        }
      }
    }

    // Text tokens of instance i for a single step from an arbitrary state,
    // at every step of both phases.
    for (int step = 0; step < schedule.total_steps(); ++step) {
      EmbeddingBlock state = initial;
      for (std::size_t r = 0; r < state.rows; ++r) {
        if (seg.is_pad(r)) continue;
        for (double& v : state.row(r)) v += rng.uniform(-1.0, 1.0);
      }
      const EmbeddingBlock next = sampler_step(seg, state, schedule, step, cfg, params);
      for (int inst = 1; inst <= n; ++inst) {
        const EmbeddingBlock other = sampler_step(seg, perturb(state, inst), schedule, step, cfg, params);
        for (std::size_t r = 0; r < seg.text_len; ++r) {
          if (seg.text_segment[r] != inst || seg.is_pad(r)) continue;
          ++text_checks;
          text_violations += !rows_identical(next, other, r);
        }
      }
    }
  }
  report(4, "isolation property", image_violations == 0 && text_violations == 0 && image_checks > 0 && text_checks > 0,
         fmt("100 layouts, STRICT image-token checks %zu (violations %zu), per-step text-token checks %zu over all 20 "
             "steps (violations %zu)",
             image_checks, image_violations, text_checks, text_violations));
}

// ---- 5 ----------------------------------------------------------------------

void ablation_direction() {
  const auto t0 = Clock::now();
  SuiteOptions so;
  so.count = 200;
  so.seed = 2026;
  const std::vector<Layout> suite = generate_suite(so);

  std::size_t thin = 0;
  std::size_t overlapping = 0;
  for (const Layout& l : suite) {
    std::vector<std::string> attrs;
    for (const Instance& inst : l.instances) attrs.push_back(inst.attribute);
    std::sort(attrs.begin(), attrs.end());
    thin += std::unique(attrs.begin(), attrs.end()) - attrs.begin() < 2;
    for (std::size_t i = 0; i < l.instances.size(); ++i) {
      for (std::size_t j = i + 1; j < l.instances.size(); ++j) {
        overlapping += oracle::iou(l.instances[i].box, l.instances[j].box) > 0.0;
      }
    }
  }

  EvalOptions eo;
  eo.render = RenderOptions::for_resolution(512);
  eo.render.seed = 7;
  eo.jobs = std::max(1u, std::thread::hardware_concurrency());
  MaskConfig all;
  MaskConfig no_renderer;
  no_renderer.detail_renderer = false;
  MaskConfig no_t2t;
  no_t2t.t2t_control = false;
  const EvalReport r_all = evaluate_suite(suite, all, eo, "w/ all");
  const EvalReport r_none = evaluate_suite(suite, no_renderer, eo, "w/o detail renderer");
  const EvalReport r_t2t = evaluate_suite(suite, no_t2t, eo, "w/o T2T control");
  EvalOptions one_strict = eo;
  one_strict.render.schedule = PhaseSchedule(20, 1);
  const EvalReport r_g1 = evaluate_suite(suite, all, one_strict, "w/ all, 1 STRICT step");
  const double secs = seconds_since(t0);

  const bool pass = thin == 0 && overlapping == 0 && r_all.overall.isr > r_none.overall.isr &&
                    r_all.overall.isr > r_t2t.overall.isr && r_all.overall.isr == 1.0 && r_g1.overall.isr == 1.0 &&
                    secs < 300.0;
  report(5, "ablation direction", pass,
         fmt("200 layouts (overlapping pairs %zu, layouts with <2 attributes %zu); ISR all %.4f, w/o detail renderer "
             "%.4f, w/o T2T %.4f, all with 1 STRICT step %.4f; %.1f s (limit 300 s)",
             overlapping, thin, r_all.overall.isr, r_none.overall.isr, r_t2t.overall.isr, r_g1.overall.isr, secs));
}

// ---- 6 ----------------------------------------------------------------------

InstanceVerdict verdict(bool success, double iou) {
  InstanceVerdict v;
  v.iou = iou;
  v.position_ok = success;
  v.attribute_ok = success;
  v.success = success;
  return v;
}

void metric_definitions() {
  bool ok = true;
  std::string detail;
  const BoundingBox unit{0, 0, 1, 1};
  const double same = box_iou(unit, unit);
  const double half = box_iou(unit, {0.5, 0, 1, 1});
  ok = ok && same == 1.0 && half == 0.5;
  detail += fmt("IoU(identical)=%g, IoU((0,0,1,1),(0.5,0,1,1))=%g", same, half);

  LayoutResult lr;
  for (bool s : {true, true, false, false}) lr.verdicts.push_back(verdict(s, s ? 1.0 : 0.0));
  const EvalReport fixture = summarize("fixture", MaskConfig{}, {lr});
  ok = ok && fixture.overall.isr == 0.5 && fixture.overall.sr == 0.0;
  detail += fmt(", ISR(T,T,F,F)=%g SR=%g", fixture.overall.isr, fixture.overall.sr);

  oracle::Rng rng(606);
  std::size_t violations = 0;
  std::size_t recompute_errors = 0;
  auto check = [&](const EvalReport& r, const std::vector<LayoutResult>& layouts) {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    for (const auto& [k, m] : r.by_level) {
      if (m.sr > m.isr || !in_unit(m.sr) || !in_unit(m.isr) || !in_unit(m.miou)) ++violations;
    }
    std::size_t inst = 0, succ = 0, full = 0;
    double iou_sum = 0.0;
    for (const LayoutResult& l : layouts) {
      bool all_ok = true;
      for (const InstanceVerdict& v : l.verdicts) {
        ++inst;
        succ += v.success;
        iou_sum += v.iou;
        all_ok = all_ok && v.success;
      }
      full += all_ok;
    }
    if (r.overall.isr != static_cast<double>(succ) / inst || r.overall.sr != static_cast<double>(full) / layouts.size() ||
        std::fabs(r.overall.miou - iou_sum / inst) > 1e-12) {
      ++recompute_errors;
    }
  };
  for (int c = 0; c < 100; ++c) {
    const bool single_level = c < 50;
    const int level = rng.range(1, 6);
    std::vector<LayoutResult> layouts(static_cast<std::size_t>(rng.range(1, 20)));
    const double p = rng.uniform();
    for (std::size_t i = 0; i < layouts.size(); ++i) {
      layouts[i].layout_index = i;
      const int n = single_level ? level : rng.range(1, 6);
      for (int k = 0; k < n; ++k) layouts[i].verdicts.push_back(verdict(rng.uniform() < p, rng.uniform()));
    }
    const EvalReport r = summarize("random", MaskConfig{}, layouts);
    check(r, layouts);
    if (single_level && r.overall.sr > r.overall.isr) ++violations;
  }
  ok = ok && violations == 0 && recompute_errors == 0;
  detail += fmt(", SR<=ISR violations %zu on 50 random single-level reports and every level of 50 mixed reports, "
                "brute-force recomputation mismatches %zu",
                violations, recompute_errors);
  report(6, "metric definitions", ok, detail);
}

// ---- 7 ----------------------------------------------------------------------

void depth_stage() {
  constexpr int kPixels = 512;
  SuiteOptions so;
  so.count = 50;
  so.seed = 707;
  const std::vector<Layout> suite = generate_suite(so);
  std::size_t painter_mismatch = 0;
  std::size_t not_idempotent = 0;
  std::size_t off_by_more = 0;
  std::size_t grew = 0;
  double worst = 0.0;
  for (const Layout& raw : suite) {
    const ValidatedLayout exact = validate_layout(raw);
    const DepthMap depth = layout_to_depth(exact, kPixels, kPixels);
    painter_mismatch += !(depth == oracle::depth(raw, kPixels, kPixels));

    const RefineResult same = refine_layout(exact, depth);
    for (std::size_t i = 0; i < raw.instances.size(); ++i) {
      not_idempotent += !(same.layout.instances()[i].box == raw.instances[i].box);
    }

    Layout padded = raw;
    for (Instance& inst : padded.instances) {
      const double px = 0.1 * inst.box.width();
      const double py = 0.1 * inst.box.height();
      inst.box = {std::max(0.0, inst.box.x0 - px), std::max(0.0, inst.box.y0 - py), std::min(1.0, inst.box.x1 + px),
                  std::min(1.0, inst.box.y1 + py)};
    }
    const RefineResult tight = refine_layout(validate_layout(padded), depth);
    for (std::size_t i = 0; i < raw.instances.size(); ++i) {
      const BoundingBox& want = raw.instances[i].box;
      const BoundingBox& got = tight.layout.instances()[i].box;
      const BoundingBox& pad = padded.instances[i].box;
      const double err = std::max({std::fabs(got.x0 - want.x0), std::fabs(got.y0 - want.y0),
                                   std::fabs(got.x1 - want.x1), std::fabs(got.y1 - want.y1)});
      worst = std::max(worst, err * kPixels);
      off_by_more += err > 1.0 / kPixels + 1e-12;
      grew += got.x0 < pad.x0 || got.y0 < pad.y0 || got.x1 > pad.x1 || got.y1 > pad.y1;
    }
  }
  report(7, "depth stage", painter_mismatch == 0 && not_idempotent == 0 && off_by_more == 0 && grew == 0,
         fmt("50 cases at %dx%d px: painter-oracle mismatches %zu, non-idempotent boxes %zu, padded edges off by >1 px "
             "%zu (worst %.3f px), enlarged boxes %zu",
             kPixels, kPixels, painter_mismatch, not_idempotent, off_by_more, worst, grew));
}

// ---- 8 ----------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void cli_determinism(const std::string& cli) {
  if (cli.empty()) {
    report(8, "CLI determinism", false, "no CLI path given");
    return;
  }
  const fs::path root = fs::temp_directory_path() / ("layoutjoint_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root / "layouts");
  SuiteOptions so;
  so.count = 3;
  so.seed = 88;
  const std::vector<Layout> sample = generate_suite(so);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    std::ofstream(root / "layouts" / ("l" + std::to_string(i) + ".json")) << layout_to_json(sample[i]);
  }
  Layout padded = sample[0];
  for (Instance& inst : padded.instances) {
    inst.box = {std::max(0.0, inst.box.x0 - 0.02), std::max(0.0, inst.box.y0 - 0.02), std::min(1.0, inst.box.x1 + 0.02),
                std::min(1.0, inst.box.y1 + 0.02)};
  }
  std::ofstream(root / "padded.json") << layout_to_json(padded);
  const std::string layout = (root / "layouts" / "l0.json").string();
  const std::string exact_depth_dir = (root / "exact_depth").string();

  struct Command {
    std::string name;
    std::string args;
  };
  const std::vector<Command> commands = {
      {"build-mask", "build-mask " + layout + " --seed 5"},
      {"build-mask-768", "build-mask " + layout + " --resolution 768 --no-t2t"},
      {"build-mask-off", "build-mask " + layout + " --no-detail-renderer"},
      {"run", "run " + layout + " --seed 11 --dump-states"},
      {"evaluate-suite", "evaluate --suite-count 8 --seed 7 --jobs 2"},
      {"evaluate-dir", "evaluate --layouts " + (root / "layouts").string() + " --seed 3"},
      {"evaluate-grid", "evaluate --ablation-grid --suite-count 4 --seed 9"},
      {"ablate", "ablate --suite-count 4 --seed 1 --jobs 2"},
      {"depth", "depth " + layout + " --refine"},
      {"depth-padded", "depth " + (root / "padded.json").string() + " --refine --depth-in " + exact_depth_dir +
                           "/depth.pgm"},
  };
  if (std::system(("\"" + cli + "\" depth " + layout + " --out " + exact_depth_dir + " > /dev/null").c_str()) != 0) {
    report(8, "CLI determinism", false, "could not produce the reference depth map");
    return;
  }

  std::size_t files = 0;
  std::vector<std::string> failures;
  for (const Command& cmd : commands) {
    std::vector<std::vector<std::pair<std::string, std::string>>> runs;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = root / (cmd.name + "_" + std::to_string(run));
      const std::string line = "\"" + cli + "\" " + cmd.args + " --out " + out.string() + " > /dev/null 2>&1";
      if (std::system(line.c_str()) != 0) {
        failures.push_back(cmd.name + " exited nonzero");
        break;
      }
      std::vector<std::pair<std::string, std::string>> contents;
      for (const auto& entry : fs::directory_iterator(out)) contents.emplace_back(entry.path().filename(), slurp(entry));
      std::sort(contents.begin(), contents.end());
      runs.push_back(std::move(contents));
    }
    if (runs.size() != 2) continue;
    if (runs[0].empty() || runs[0] != runs[1]) failures.push_back(cmd.name + " differs between runs");
    files += runs[0].size();
  }
  fs::remove_all(root);
  std::string detail = fmt("%zu commands, %zu output files compared byte for byte", commands.size(), files);
  for (const std::string& f : failures) detail += "; " + f;
  report(8, "CLI determinism", failures.empty(), detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  try {
    mask_oracle_equivalence();
    gamma_schedule();
    attention_oracle();
    isolation_property();
    ablation_direction();
    metric_definitions();
    depth_stage();
    cli_determinism(cli);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
