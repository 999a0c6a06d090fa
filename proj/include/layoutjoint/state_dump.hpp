// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "layoutjoint/tokens.hpp"

namespace layoutjoint {

// Sampler state dump, all integers and reals little-endian:
//
//   offset  size  field
//   0       8     magic "LJSTATE1"
//   8       4     u32 snapshot count
//   12      4     u32 reserved (0)
//   16      8     u64 rows
//   24      8     u64 dim
//   32      8     u64 attribute_dims
//   40      8     u64 text_len
//   48      ...   per snapshot: u32 step, u32 reserved, rows*dim f64 row-major
//
// Snapshot `step` holds the state after that many sampling steps.
struct StateSnapshot {
  std::uint32_t step = 0;
  EmbeddingBlock block;
};

std::string encode_state_dump(const std::vector<StateSnapshot>& snapshots, std::uint64_t text_len);
std::vector<StateSnapshot> decode_state_dump(std::string_view bytes, std::uint64_t* text_len = nullptr);

}  // namespace layoutjoint
