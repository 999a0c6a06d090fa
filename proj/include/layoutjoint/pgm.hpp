// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "layoutjoint/depth.hpp"
#include "layoutjoint/mask.hpp"

namespace layoutjoint {

/// Binary graymap (P5). 16-bit samples are stored big-endian.
struct GrayImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> samples;  // row-major
};

std::string encode_pgm(const GrayImage& image);
/// Accepts P5 with maxval 1..65535 and '#' comments. Throws kFormatError.
GrayImage decode_pgm(std::string_view bytes);

/// side x side, 255 where attention is permitted.
GrayImage mask_to_image(const JointAttentionMask& mask);

/// maxval 65535, sample = round(depth * 65535).
GrayImage depth_to_image(const DepthMap& depth);
DepthMap depth_from_image(const GrayImage& image);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace layoutjoint
