// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/mask.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstring>

#include "layoutjoint/error.hpp"

namespace layoutjoint {
namespace {

// Tokens are grouped into classes whose rows are identical: GLOBAL text,
// INSTANCE(i) text, and image tokens by owner. Rows are computed once per
// class and copied.
struct TokenClass {
  bool image = false;
  int index = 0;  // segment for text, owner for image
};

bool class_allows(const TokenClass& q, const TokenClass& k, Phase phase, const MaskConfig& cfg) {
  const bool strict = phase == Phase::kStrict;
  if (q.image && k.image) {
    if (!cfg.i2i_control || !strict) return true;
    return q.index == k.index;
  }
  if (q.image && !k.image) {
    if (!cfg.i2t_control) return true;
    if (q.index == 0) return k.index == 0;
    return k.index == q.index || (!strict && k.index == 0);
  }
  if (!q.image && k.image) {
    if (!cfg.t2i_control || q.index == 0) return true;
    return k.index == q.index;
  }
  if (!cfg.t2t_control) return true;
  if (q.index == 0) return k.index == 0 || cfg.global_reads_instance_text;
  return k.index == q.index;
}

}  // namespace

const char* to_string(Phase phase) { return phase == Phase::kStrict ? "STRICT" : "RELAXED"; }

PhaseSchedule::PhaseSchedule(int total_steps, int gamma) : total_steps_(total_steps), gamma_(gamma) {
  if (total_steps < 0) throw Error(ErrorCode::kInvalidArgument, "total_steps must be non-negative");
  if (gamma < 0 || gamma > total_steps) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must lie in [0, total_steps]");
  }
}

PhaseSchedule PhaseSchedule::for_resolution(int resolution, int total_steps) {
  return PhaseSchedule(total_steps, std::min(gamma_for_resolution(resolution), std::max(total_steps, 0)));
}

int gamma_for_resolution(int resolution) {
  if (resolution <= 0) throw Error(ErrorCode::kNonPositiveResolution, "resolution must be positive");
  struct Anchor {
    int resolution;
    int gamma;
  };
  // Ordered by descending gamma so that a distance tie keeps the larger one.
  constexpr std::array<Anchor, 3> anchors{{{512, 4}, {768, 3}, {1024, 2}}};
  int best = anchors[0].gamma;
  long best_dist = std::labs(static_cast<long>(resolution) - anchors[0].resolution);
  for (const Anchor& a : anchors) {
    const long dist = std::labs(static_cast<long>(resolution) - a.resolution);
    if (dist < best_dist) {
      best_dist = dist;
      best = a.gamma;
    }
  }
  return best;
}

Phase phase_of(const PhaseSchedule& schedule, int step) {
  if (step < 0 || step >= schedule.total_steps()) {
    throw Error(ErrorCode::kStepOutOfRange,
                "step " + std::to_string(step) + " outside [0, " + std::to_string(schedule.total_steps()) + ")");
  }
  return step < schedule.gamma() ? Phase::kStrict : Phase::kRelaxed;
}

JointAttentionMask JointAttentionMask::from_cells(std::size_t side, std::size_t text_len,
                                                  std::vector<std::uint8_t> cells, std::vector<std::uint8_t> pad) {
  if (cells.size() != side * side || pad.size() != side || text_len > side) {
    throw Error(ErrorCode::kDimensionMismatch, "mask cells do not match the declared side");
  }
  JointAttentionMask mask;
  mask.side_ = side;
  mask.text_len_ = text_len;
  mask.cells_ = std::move(cells);
  mask.pad_ = std::move(pad);
  return mask;
}

std::size_t JointAttentionMask::count_allowed() const {
  return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](std::uint8_t c) { return c != 0; }));
}

JointAttentionMask build_mask(const SegmentMap& seg, const PhaseSchedule& schedule, int step,
                              const MaskConfig& config) {
  const Phase phase = phase_of(schedule, step);
  const std::size_t side = seg.total();
  const int n = seg.instance_count;

  JointAttentionMask mask;
  mask.side_ = side;
  mask.text_len_ = seg.text_len;
  mask.cells_.assign(side * side, 0);
  mask.pad_.assign(side, 0);
  for (std::size_t p = 0; p < seg.text_len; ++p) mask.pad_[p] = seg.text_pad[p];

  // Class ids: text segment s -> s, image owner o -> n + 1 + o, PAD -> -1.
  const int class_count = 2 * n + 2;
  std::vector<int> class_of(side);
  for (std::size_t p = 0; p < seg.text_len; ++p) class_of[p] = seg.text_pad[p] ? -1 : seg.text_segment[p];
  for (std::size_t p = seg.text_len; p < side; ++p) class_of[p] = n + 1 + seg.owner_of_image(p);

  auto describe = [n](int cls) {
    return cls <= n ? TokenClass{false, cls} : TokenClass{true, cls - n - 1};
  };

  std::vector<std::uint8_t> row(side);
  std::vector<std::uint8_t> permits(static_cast<std::size_t>(class_count));
  std::vector<std::uint8_t> class_present(static_cast<std::size_t>(class_count), 0);
  for (int c : class_of) {
    if (c >= 0) class_present[static_cast<std::size_t>(c)] = 1;
  }

  for (int qc = 0; qc < class_count; ++qc) {
    if (!class_present[static_cast<std::size_t>(qc)]) continue;
    const TokenClass q = describe(qc);
    for (int kc = 0; kc < class_count; ++kc) {
      permits[static_cast<std::size_t>(kc)] =
          !config.detail_renderer || class_allows(q, describe(kc), phase, config) ? 1 : 0;
    }
    for (std::size_t k = 0; k < side; ++k) {
      row[k] = class_of[k] < 0 ? 0 : permits[static_cast<std::size_t>(class_of[k])];
    }
    for (std::size_t p = 0; p < side; ++p) {
      if (class_of[p] == qc) std::memcpy(mask.cells_.data() + p * side, row.data(), side);
    }
  }
  return mask;
}

}  // namespace layoutjoint
