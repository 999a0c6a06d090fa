// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "layoutjoint/layout.hpp"

namespace layoutjoint {

/// Per-pixel depth in [0, 1], 1 nearest, row-major.
struct DepthMap {
  int h = 0;
  int w = 0;
  std::vector<double> values;

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * w + col]; }
  double& at(int row, int col) { return values[static_cast<std::size_t>(row) * w + col]; }

  bool operator==(const DepthMap&) const = default;
};

/// Procedural scene depth: background 0.1 + 0.2 * y, instances painted as
/// flat rectangles at 0.5 + 0.5 * rank / n. Rank n goes to the smallest box
/// (lower id on equal area), rank 1 to the largest; nearer boxes paint last.
/// Depends only on the boxes, never on the text.
DepthMap layout_to_depth(const ValidatedLayout& layout, int h, int w);

inline constexpr double kPlateauTolerance = 0.05;

struct RefineResult {
  ValidatedLayout layout;
  std::vector<int> kept_original;  // ids whose box held no pixel
  std::vector<std::string> notes;
};

/// Tightens each box to the largest 4-connected pixel component inside it
/// whose depth lies within kPlateauTolerance of the box's modal depth. Edges
/// the component reaches keep their original coordinate, so boxes never grow
/// and the operation is idempotent.
RefineResult refine_layout(const ValidatedLayout& layout, const DepthMap& depth);

}  // namespace layoutjoint
