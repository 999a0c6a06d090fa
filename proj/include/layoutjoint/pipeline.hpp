// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "layoutjoint/attention.hpp"
#include "layoutjoint/layout.hpp"
#include "layoutjoint/mask.hpp"
#include "layoutjoint/tokens.hpp"

namespace layoutjoint {

inline constexpr int kDefaultPatchSize = 32;

/// Patches per side for a square image: resolution / patch_size, at least 1.
int grid_for_resolution(int resolution, int patch_size = kDefaultPatchSize);

struct RenderOptions {
  int grid_h = 16;
  int grid_w = 16;
  std::size_t seg_len = 8;
  EmbeddingOptions embedding;
  std::size_t heads = 1;
  std::uint64_t seed = 0;
  PhaseSchedule schedule;
  MaskConfig mask;
  bool keep_history = false;

  /// Grid from the patch size and gamma from the resolution.
  static RenderOptions for_resolution(int resolution, int patch_size = kDefaultPatchSize, int total_steps = 20);
};

struct RenderResult {
  RegionGrid region;
  SegmentMap segments;
  EmbeddingBlock initial;  // state before step 0, kept with keep_history
  SamplerState state;
  std::vector<int> decoded;  // attribute index per image token
};

/// Rasterize, embed, run the sampler and decode the attribute map.
RenderResult render_layout(const ValidatedLayout& layout, const RenderOptions& options);

}  // namespace layoutjoint
