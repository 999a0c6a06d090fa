// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "layoutjoint/layout.hpp"
#include "layoutjoint/mask.hpp"
#include "layoutjoint/pipeline.hpp"
#include "layoutjoint/tokens.hpp"

namespace layoutjoint {

inline constexpr double kDefaultIouThreshold = 0.5;

struct InstanceVerdict {
  int instance_id = 0;
  std::string target_attribute;
  std::optional<BoundingBox> predicted;
  double iou = 0.0;
  bool position_ok = false;   // iou >= threshold
  bool attribute_ok = false;  // plurality label in the predicted box is the target
  bool success = false;       // position_ok && attribute_ok
};

struct LayoutResult {
  std::size_t layout_index = 0;
  std::vector<InstanceVerdict> verdicts;

  bool all_success() const;
};

struct LevelMetrics {
  std::size_t layouts = 0;
  std::size_t instances = 0;
  double miou = 0.0;
  double isr = 0.0;
  double sr = 0.0;
};

/// MIoU: mean instance IoU. ISR: fraction of successful instances. SR:
/// fraction of layouts whose instances all succeed. Levels are keyed by
/// instance count.
struct EvalReport {
  std::string config_name;
  MaskConfig config;
  double iou_threshold = kDefaultIouThreshold;
  std::vector<LayoutResult> layouts;
  LevelMetrics overall;
  std::map<std::size_t, LevelMetrics> by_level;
};

/// Aggregates stored verdicts; layouts are kept in the order given.
EvalReport summarize(std::string config_name, const MaskConfig& config, std::vector<LayoutResult> layouts,
                     double iou_threshold = kDefaultIouThreshold);

/// Bounding box of the largest 4-connected component of tokens decoded as
/// `attribute` (first in row-major order on ties); nullopt when none.
std::optional<BoundingBox> predicted_region(std::span<const int> decoded, int grid_h, int grid_w, int attribute);

InstanceVerdict judge_instance(const Instance& instance, std::span<const int> decoded, int grid_h, int grid_w,
                               const AttributeVocab& vocab, double iou_threshold = kDefaultIouThreshold);

struct SuiteOptions {
  std::size_t count = 100;
  int min_instances = 2;
  int max_instances = 6;
  std::uint64_t seed = 0;
  int resolution = 512;
  AttributeVocab vocab;
};

/// Synthetic layouts: instance counts uniform over [min, max], boxes
/// pairwise separated by a gap (so pairwise IoU is 0), attributes drawn
/// without replacement while the vocabulary lasts, and a global text that
/// names the objects but no attribute.
std::vector<Layout> generate_suite(const SuiteOptions& options);

struct EvalOptions {
  RenderOptions render;
  double iou_threshold = kDefaultIouThreshold;
  std::size_t jobs = 1;
};

/// Renders and judges every layout under `config`. Layout k is rendered
/// with a seed derived from (render.seed, k); workers only change timing.
/// Throws kInvalidArgument on an empty suite or an instance whose attribute
/// is missing from the vocabulary.
EvalReport evaluate_suite(std::span<const Layout> suite, const MaskConfig& config, const EvalOptions& options,
                          std::string config_name = "custom");

struct AblationRow {
  std::string name;
  MaskConfig config;
};

/// w/o I2I, w/o I2T, w/o T2I, w/o T2T, w/o detail renderer, w/ all.
std::vector<AblationRow> ablation_rows();

std::string report_to_json(const EvalReport& report);
/// One row per report: config, ISR_L2..ISR_L6, ISR_AVG, MIoU_L2..MIoU_L6,
/// MIoU_AVG, SR.
std::string reports_to_csv(std::span<const EvalReport> reports);

}  // namespace layoutjoint
