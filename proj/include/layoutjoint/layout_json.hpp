// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "layoutjoint/layout.hpp"

namespace layoutjoint {

// Layout file schema:
//   {"global_text": str, "resolution": int, "pixel_coords": bool?,
//    "instances": [{"text": str, "attribute": str?, "box": [x0,y0,x1,y1]}]}
// With "pixel_coords": true the box values are divided by "resolution".
//
// Malformed documents raise Error(kInvalidLayout) whose message names the
// line/column for syntax errors or the offending field otherwise. The result
// is not validated; pass it through validate_layout.
Layout parse_layout_json(std::string_view text);

Layout load_layout_file(const std::filesystem::path& path);

/// Normalized coordinates, two-space indent, trailing newline.
std::string layout_to_json(const Layout& layout);

}  // namespace layoutjoint
