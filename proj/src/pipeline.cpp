// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/pipeline.hpp"

#include <algorithm>

#include "layoutjoint/error.hpp"

namespace layoutjoint {

int grid_for_resolution(int resolution, int patch_size) {
  if (resolution <= 0) throw Error(ErrorCode::kNonPositiveResolution, "resolution must be positive");
  if (patch_size <= 0) throw Error(ErrorCode::kInvalidArgument, "patch size must be positive");
  return std::max(1, resolution / patch_size);
}

RenderOptions RenderOptions::for_resolution(int resolution, int patch_size, int total_steps) {
  RenderOptions options;
  options.grid_h = options.grid_w = grid_for_resolution(resolution, patch_size);
  options.schedule = PhaseSchedule::for_resolution(resolution, total_steps);
  return options;
}

RenderResult render_layout(const ValidatedLayout& layout, const RenderOptions& options) {
  RenderResult result;
  result.region = rasterize(layout, options.grid_h, options.grid_w);
  result.segments = build_segment_map(layout, result.region, options.seg_len);
  EmbeddingBlock initial = embed(result.segments, mix_seed(options.seed ^ 0x656d626564ull), options.embedding);
  const AttentionParams params =
      AttentionParams::create(options.embedding.dim, options.embedding.vocab.size(), options.heads, options.seed);
  if (options.keep_history) result.initial = initial;
  result.state = run_sampler(result.segments, std::move(initial), options.schedule, options.mask, params,
                             options.keep_history);
  result.decoded = decode_attributes(result.state.block, result.segments);
  return result;
}

}  // namespace layoutjoint
