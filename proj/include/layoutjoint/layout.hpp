// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace layoutjoint {

/// Axis-aligned box in normalized image coordinates, origin top-left.
struct BoundingBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }

  bool operator==(const BoundingBox&) const = default;
};

struct Instance {
  int id = 0;  // 1..n after validation
  std::string text;
  BoundingBox box;
  std::string attribute;  // empty when the instance has no target attribute
};

struct Layout {
  std::string global_text;
  std::vector<Instance> instances;
  int resolution = 512;
};

inline constexpr std::size_t kDefaultMaxInstances = 16;

/// A layout that passed validate_layout. Instance ids are dense, 1..n, in
/// input order.
class ValidatedLayout {
 public:
  const Layout& layout() const { return layout_; }
  const std::string& global_text() const { return layout_.global_text; }
  int resolution() const { return layout_.resolution; }
  std::size_t size() const { return layout_.instances.size(); }
  std::span<const Instance> instances() const { return layout_.instances; }
  // 1-based, matching the ids used by RegionGrid and SegmentMap.
  const Instance& instance(int id) const { return layout_.instances.at(static_cast<std::size_t>(id - 1)); }

 private:
  explicit ValidatedLayout(Layout layout) : layout_(std::move(layout)) {}
  friend ValidatedLayout validate_layout(Layout layout, std::size_t max_instances);

  Layout layout_;
};

/// Throws Error with kNoInstances, kTooManyInstances, kEmptyGlobalText,
/// kEmptyInstanceText, kOutOfRangeCoordinate or kDegenerateBox.
ValidatedLayout validate_layout(Layout layout, std::size_t max_instances = kDefaultMaxInstances);

/// Per-patch instance ownership on a grid_h x grid_w patch grid, row-major.
/// 0 is background.
struct RegionGrid {
  int grid_h = 0;
  int grid_w = 0;
  int instance_count = 0;
  std::vector<int> owner;

  int at(int row, int col) const { return owner[static_cast<std::size_t>(row) * grid_w + col]; }
  std::size_t patch_count() const { return owner.size(); }
};

/// True iff the center of cell (row, col) of an h x w grid lies inside
/// the box. Upper edges are open.
bool cell_center_inside(const BoundingBox& box, int row, int col, int h, int w);

/// Center-inclusion rasterization. Overlaps go to the smallest-area box,
/// ties to the lower id.
RegionGrid rasterize(const ValidatedLayout& layout, int grid_h, int grid_w);

double box_iou(const BoundingBox& a, const BoundingBox& b);

}  // namespace layoutjoint
