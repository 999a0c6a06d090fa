// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "layoutjoint/tokens.hpp"

namespace layoutjoint {

enum class Phase { kStrict, kRelaxed };

const char* to_string(Phase phase);

/// Sampling steps 0..total_steps-1; the first `gamma` of them are STRICT.
class PhaseSchedule {
 public:
  PhaseSchedule() = default;
  /// Throws kInvalidArgument unless 0 <= gamma <= total_steps.
  PhaseSchedule(int total_steps, int gamma);

  /// gamma_for_resolution(resolution), clamped to total_steps.
  static PhaseSchedule for_resolution(int resolution, int total_steps = 20);

  int total_steps() const { return total_steps_; }
  int gamma() const { return gamma_; }

 private:
  int total_steps_ = 20;
  int gamma_ = 4;
};

/// 512 -> 4, 768 -> 3, 1024 -> 2. Other resolutions take the nearest anchor,
/// ties going to the larger gamma. Throws kNonPositiveResolution.
int gamma_for_resolution(int resolution);

/// STRICT iff step < gamma. Throws kStepOutOfRange.
Phase phase_of(const PhaseSchedule& schedule, int step);

/// Per-family switches for the renderer's attention constraints.
struct MaskConfig {
  bool i2i_control = true;      // image -> image
  bool i2t_control = true;      // image -> text
  bool t2i_control = true;      // text -> image
  bool t2t_control = true;      // text -> text
  bool detail_renderer = true;  // false: no constraints at all
  // Under t2t control, whether GLOBAL text rows may read instance text.
  bool global_reads_instance_text = false;

  bool operator==(const MaskConfig&) const = default;
};

/// Square boolean matrix over [text tokens | image tokens]; true means the
/// query row may attend to the key column. PAD rows and columns are false.
class JointAttentionMask {
 public:
  JointAttentionMask() = default;

  /// For tests and external masks: cells is side*side, row-major.
  static JointAttentionMask from_cells(std::size_t side, std::size_t text_len, std::vector<std::uint8_t> cells,
                                       std::vector<std::uint8_t> pad);

  std::size_t side() const { return side_; }
  std::size_t text_len() const { return text_len_; }
  std::size_t image_len() const { return side_ - text_len_; }
  bool is_pad(std::size_t pos) const { return pad_[pos] != 0; }
  bool allowed(std::size_t query, std::size_t key) const { return cells_[query * side_ + key] != 0; }
  std::span<const std::uint8_t> row(std::size_t query) const { return {cells_.data() + query * side_, side_}; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }
  std::size_t count_allowed() const;

  bool operator==(const JointAttentionMask&) const = default;

 private:
  friend JointAttentionMask build_mask(const SegmentMap&, const PhaseSchedule&, int, const MaskConfig&);

  std::size_t side_ = 0;
  std::size_t text_len_ = 0;
  std::vector<std::uint8_t> cells_;
  std::vector<std::uint8_t> pad_;
};

/// Attention mask for one sampling step.
///
/// Families, each replaced by "all permitted" when its switch is off:
///  - image->image: STRICT confines a token to image tokens of its own owner
///    (background included); RELAXED permits all.
///  - image->text: instance-i image tokens read INSTANCE(i) text, plus
///    GLOBAL text once RELAXED; background image tokens read GLOBAL only.
///  - text->image: INSTANCE(i) text reads image tokens owned by i at every
///    step; GLOBAL text reads every image token.
///  - text->text: INSTANCE(i) text reads its own segment only; GLOBAL text
///    reads GLOBAL text (and instance text if global_reads_instance_text).
/// Non-PAD self attention is always permitted. Throws kStepOutOfRange.
JointAttentionMask build_mask(const SegmentMap& seg, const PhaseSchedule& schedule, int step, const MaskConfig& config);

}  // namespace layoutjoint
