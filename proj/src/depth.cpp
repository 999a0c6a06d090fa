// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/depth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "layoutjoint/error.hpp"

namespace layoutjoint {
namespace {

struct PixelRect {
  int r0 = 0, r1 = -1, c0 = 0, c1 = -1;  // inclusive
  bool empty() const { return r1 < r0 || c1 < c0; }
};

bool center_within(int index, int n, double lo, double hi) {
  const double center = (index + 0.5) / n;
  return center >= lo && center < hi;
}

// Pixels whose centers fall inside the box form a rectangle.
PixelRect pixels_inside(const BoundingBox& box, int h, int w) {
  PixelRect rect;
  rect.c0 = w;
  rect.r0 = h;
  for (int c = 0; c < w; ++c) {
    if (center_within(c, w, box.x0, box.x1)) {
      rect.c0 = std::min(rect.c0, c);
      rect.c1 = c;
    }
  }
  for (int r = 0; r < h; ++r) {
    if (center_within(r, h, box.y0, box.y1)) {
      rect.r0 = std::min(rect.r0, r);
      rect.r1 = r;
    }
  }
  return rect;
}

long quantize(double depth) { return std::lround(std::clamp(depth, 0.0, 1.0) * 65535.0); }

}  // namespace

DepthMap layout_to_depth(const ValidatedLayout& layout, int h, int w) {
  if (h < 1 || w < 1) throw Error(ErrorCode::kInvalidArgument, "depth map dimensions must be at least 1");
  DepthMap depth;
  depth.h = h;
  depth.w = w;
  depth.values.resize(static_cast<std::size_t>(h) * w);
  for (int r = 0; r < h; ++r) {
    const double y = (r + 0.5) / h;
    for (int c = 0; c < w; ++c) depth.at(r, c) = 0.1 + 0.2 * y;
  }

  const auto instances = layout.instances();
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double area_a = instances[a].box.area();
    const double area_b = instances[b].box.area();
    if (area_a != area_b) return area_a > area_b;
    return a > b;
  });

  const double n = static_cast<double>(instances.size());
  for (std::size_t rank0 = 0; rank0 < order.size(); ++rank0) {
    const BoundingBox& box = instances[order[rank0]].box;
    const double value = 0.5 + 0.5 * static_cast<double>(rank0 + 1) / n;
    const PixelRect rect = pixels_inside(box, h, w);
    for (int r = rect.r0; r <= rect.r1; ++r) {
      for (int c = rect.c0; c <= rect.c1; ++c) depth.at(r, c) = value;
    }
  }
  return depth;
}

RefineResult refine_layout(const ValidatedLayout& layout, const DepthMap& depth) {
  if (depth.h < 1 || depth.w < 1 || depth.values.size() != static_cast<std::size_t>(depth.h) * depth.w) {
    throw Error(ErrorCode::kDimensionMismatch, "depth map is malformed");
  }
  const int h = depth.h;
  const int w = depth.w;
  Layout refined = layout.layout();
  std::vector<int> kept;
  std::vector<std::string> notes;

  for (Instance& inst : refined.instances) {
    const BoundingBox box = inst.box;
    const PixelRect rect = pixels_inside(box, h, w);
    if (rect.empty()) {
      kept.push_back(inst.id);
      notes.push_back("instance " + std::to_string(inst.id) + ": box covers no pixel center; kept original box");
      continue;
    }

    // Modal quantized depth, ties to the nearer value.
    std::map<long, std::size_t> histogram;
    for (int r = rect.r0; r <= rect.r1; ++r) {
      for (int c = rect.c0; c <= rect.c1; ++c) ++histogram[quantize(depth.at(r, c))];
    }
    long modal = 0;
    std::size_t modal_count = 0;
    for (const auto& [level, count] : histogram) {
      if (count >= modal_count) {
        modal = level;
        modal_count = count;
      }
    }
    const double modal_depth = static_cast<double>(modal) / 65535.0;

    const int rh = rect.r1 - rect.r0 + 1;
    const int rw = rect.c1 - rect.c0 + 1;
    std::vector<std::uint8_t> on(static_cast<std::size_t>(rh) * rw, 0);
    for (int r = 0; r < rh; ++r) {
      for (int c = 0; c < rw; ++c) {
        on[static_cast<std::size_t>(r) * rw + c] =
            std::fabs(depth.at(rect.r0 + r, rect.c0 + c) - modal_depth) <= kPlateauTolerance ? 1 : 0;
      }
    }

    // Largest 4-connected component; first in scan order on ties.
    std::vector<int> label(on.size(), -1);
    std::vector<std::size_t> stack;
    std::size_t best_size = 0;
    PixelRect best;
    int next_label = 0;
    for (std::size_t start = 0; start < on.size(); ++start) {
      if (!on[start] || label[start] >= 0) continue;
      PixelRect bounds{rh, -1, rw, -1};
      std::size_t size = 0;
      label[start] = next_label;
      stack.assign(1, start);
      while (!stack.empty()) {
        const std::size_t idx = stack.back();
        stack.pop_back();
        ++size;
        const int r = static_cast<int>(idx) / rw;
        const int c = static_cast<int>(idx) % rw;
        bounds.r0 = std::min(bounds.r0, r);
        bounds.r1 = std::max(bounds.r1, r);
        bounds.c0 = std::min(bounds.c0, c);
        bounds.c1 = std::max(bounds.c1, c);
        const int dr[4] = {-1, 1, 0, 0};
        const int dc[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
          const int nr = r + dr[k];
          const int nc = c + dc[k];
          if (nr < 0 || nr >= rh || nc < 0 || nc >= rw) continue;
          const std::size_t nidx = static_cast<std::size_t>(nr) * rw + nc;
          if (on[nidx] && label[nidx] < 0) {
            label[nidx] = next_label;
            stack.push_back(nidx);
          }
        }
      }
      ++next_label;
      if (size > best_size) {
        best_size = size;
        best = bounds;
      }
    }

    // The modal pixel itself is always on, so a component exists.
    BoundingBox tight = box;
    if (best.c0 > 0) tight.x0 = std::max(box.x0, static_cast<double>(rect.c0 + best.c0) / w);
    if (best.c1 < rw - 1) tight.x1 = std::min(box.x1, static_cast<double>(rect.c0 + best.c1 + 1) / w);
    if (best.r0 > 0) tight.y0 = std::max(box.y0, static_cast<double>(rect.r0 + best.r0) / h);
    if (best.r1 < rh - 1) tight.y1 = std::min(box.y1, static_cast<double>(rect.r0 + best.r1 + 1) / h);
    inst.box = tight;
  }
  return RefineResult{validate_layout(std::move(refined), std::max(layout.size(), kDefaultMaxInstances)), std::move(kept),
                      std::move(notes)};
}

}  // namespace layoutjoint
