// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/layout.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "layoutjoint/error.hpp"

namespace layoutjoint {
namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

bool in_unit_range(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::string instance_label(std::size_t index) { return "instances[" + std::to_string(index) + "]"; }

}  // namespace

ValidatedLayout validate_layout(Layout layout, std::size_t max_instances) {
  if (layout.instances.empty()) {
    throw Error(ErrorCode::kNoInstances, "layout has no instances");
  }
  if (layout.instances.size() > max_instances) {
    throw Error(ErrorCode::kTooManyInstances,
                std::to_string(layout.instances.size()) + " instances exceed the maximum of " +
                    std::to_string(max_instances));
  }
  if (blank(layout.global_text)) {
    throw Error(ErrorCode::kEmptyGlobalText, "global_text is empty");
  }
  if (layout.resolution <= 0) {
    throw Error(ErrorCode::kNonPositiveResolution, "resolution must be positive");
  }
  for (std::size_t i = 0; i < layout.instances.size(); ++i) {
    Instance& inst = layout.instances[i];
    if (blank(inst.text)) {
      throw Error(ErrorCode::kEmptyInstanceText, instance_label(i) + ".text is empty");
    }
    const BoundingBox& b = inst.box;
    if (!in_unit_range(b.x0) || !in_unit_range(b.y0) || !in_unit_range(b.x1) || !in_unit_range(b.y1)) {
      throw Error(ErrorCode::kOutOfRangeCoordinate, instance_label(i) + ".box has a coordinate outside [0,1]");
    }
    if (!(b.x0 < b.x1) || !(b.y0 < b.y1)) {
      throw Error(ErrorCode::kDegenerateBox, instance_label(i) + ".box has non-positive area");
    }
    inst.id = static_cast<int>(i) + 1;
  }
  return ValidatedLayout(std::move(layout));
}

bool cell_center_inside(const BoundingBox& box, int row, int col, int h, int w) {
  const double cx = (col + 0.5) / w;
  const double cy = (row + 0.5) / h;
  return cx >= box.x0 && cx < box.x1 && cy >= box.y0 && cy < box.y1;
}

RegionGrid rasterize(const ValidatedLayout& layout, int grid_h, int grid_w) {
  if (grid_h < 1 || grid_w < 1) {
    throw Error(ErrorCode::kInvalidArgument, "grid dimensions must be at least 1");
  }
  RegionGrid grid;
  grid.grid_h = grid_h;
  grid.grid_w = grid_w;
  grid.instance_count = static_cast<int>(layout.size());
  grid.owner.assign(static_cast<std::size_t>(grid_h) * grid_w, 0);

  // Painter's order: largest area first, and within equal areas the higher
  // id first, so the last writer is the smallest box with the lowest id.
  std::vector<std::size_t> order(layout.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto instances = layout.instances();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double area_a = instances[a].box.area();
    const double area_b = instances[b].box.area();
    if (area_a != area_b) return area_a > area_b;
    return a > b;
  });

  for (std::size_t idx : order) {
    const Instance& inst = instances[idx];
    const BoundingBox& box = inst.box;
    // Candidate span from the box edges, widened by one cell and then
    // trimmed by the exact center test.
    const int c_lo = std::max(0, static_cast<int>(std::floor(box.x0 * grid_w - 0.5)) - 1);
    const int c_hi = std::min(grid_w - 1, static_cast<int>(std::ceil(box.x1 * grid_w - 0.5)) + 1);
    const int r_lo = std::max(0, static_cast<int>(std::floor(box.y0 * grid_h - 0.5)) - 1);
    const int r_hi = std::min(grid_h - 1, static_cast<int>(std::ceil(box.y1 * grid_h - 0.5)) + 1);
    for (int r = r_lo; r <= r_hi; ++r) {
      for (int c = c_lo; c <= c_hi; ++c) {
        if (cell_center_inside(box, r, c, grid_h, grid_w)) {
          grid.owner[static_cast<std::size_t>(r) * grid_w + c] = inst.id;
        }
      }
    }
  }
  return grid;
}

double box_iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double iy = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace layoutjoint
