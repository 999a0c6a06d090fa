// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "layoutjoint/mask.hpp"
#include "layoutjoint/tokens.hpp"

namespace layoutjoint {

/// Query/key/value projections of one token stream, each dim x dim and
/// row-major, applied to row vectors: q = x * W.
struct StreamProjections {
  std::vector<double> query;
  std::vector<double> key;
  std::vector<double> value;
};

/// Joint attention weights. Text and image rows use separate projections,
/// as in a two-stream DiT block. Query and key projections are seeded
/// random orthogonal matrices. Value projections are orthogonal on the
/// content columns; on the attribute columns the text stream is the
/// identity and the image stream is zero, so attribute evidence enters
/// image tokens only through the text they are allowed to read.
struct AttentionParams {
  std::size_t dim = 32;
  std::size_t attribute_dims = 8;
  std::size_t heads = 1;
  std::uint64_t seed = 0;
  StreamProjections text;
  StreamProjections image;

  std::size_t head_dim() const { return dim / heads; }

  /// Throws kInvalidArgument unless attribute_dims < dim and heads divides dim.
  static AttentionParams create(std::size_t dim, std::size_t attribute_dims, std::size_t heads = 1,
                                std::uint64_t seed = 0);
};

/// Scaled dot-product attention where forbidden (query, key) pairs get weight
/// exactly zero. Softmax runs over the permitted keys only, with the row max
/// subtracted. All heads share the mask. PAD rows come out as zero.
/// Throws kDimensionMismatch or kEmptyRow.
EmbeddingBlock masked_attention(const EmbeddingBlock& block, const JointAttentionMask& mask,
                                const AttentionParams& params);

/// Dense side x side softmax weights of one head, as used by masked_attention.
std::vector<double> attention_weights(const EmbeddingBlock& block, const JointAttentionMask& mask,
                                      const AttentionParams& params, std::size_t head = 0);

struct SamplerState {
  int step = 0;  // steps completed
  EmbeddingBlock block;
  std::vector<EmbeddingBlock> history;  // state after each step, when kept
};

/// One sampling step: out = 0.5 * in + 0.5 * masked_attention(in).
EmbeddingBlock sampler_step(const SegmentMap& seg, const EmbeddingBlock& block, const PhaseSchedule& schedule,
                            int step, const MaskConfig& config, const AttentionParams& params);

/// Runs every step of the schedule, rebuilding the mask per step.
SamplerState run_sampler(const SegmentMap& seg, EmbeddingBlock initial, const PhaseSchedule& schedule,
                         const MaskConfig& config, const AttentionParams& params, bool keep_history = false);

inline constexpr int kNoAttribute = -1;

/// Per image token, the attribute index with the largest component of the
/// attribute sub-vector. kNoAttribute when the maximum is shared or is not
/// positive.
std::vector<int> decode_attributes(const EmbeddingBlock& block, const SegmentMap& seg);

}  // namespace layoutjoint
