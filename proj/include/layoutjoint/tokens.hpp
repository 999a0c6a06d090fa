// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "layoutjoint/layout.hpp"

namespace layoutjoint {

inline constexpr std::string_view kPadToken = "<pad>";

/// Lowercased whitespace tokens, truncated or padded with kPadToken to
/// exactly max_len entries.
std::vector<std::string> tokenize(std::string_view text, std::size_t max_len);

/// Closed set of attribute words. Each word owns one slot of the attribute
/// sub-vector carried by every embedding row.
class AttributeVocab {
 public:
  AttributeVocab();  // the eight default colors
  explicit AttributeVocab(std::vector<std::string> words);

  /// Comma separated list, e.g. "red,green,blue".
  static AttributeVocab parse(std::string_view list);

  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::string& word(std::size_t index) const { return words_.at(index); }
  /// -1 when the word is not an attribute.
  int index_of(std::string_view word) const;

  bool operator==(const AttributeVocab&) const = default;

 private:
  std::vector<std::string> words_;
};

/// One text segment: the global text (instance == 0) or instance i.
struct Segment {
  int instance = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
};

/// Token bookkeeping for the joint sequence: text tokens first (global,
/// then instances 1..n, each seg_len long), then image patches row-major.
struct SegmentMap {
  std::size_t seg_len = 0;
  std::size_t text_len = 0;
  std::size_t image_len = 0;
  int grid_h = 0;
  int grid_w = 0;
  int instance_count = 0;

  std::vector<Segment> segments;         // global first, then 1..n
  std::vector<int> text_segment;         // per text token: 0 = global, i = instance i
  std::vector<std::uint8_t> text_pad;    // per text token
  std::vector<std::string> text_tokens;  // per text token
  std::vector<int> image_owner;          // per image token, from the RegionGrid

  std::size_t total() const { return text_len + image_len; }
  bool is_text(std::size_t pos) const { return pos < text_len; }
  bool is_pad(std::size_t pos) const { return pos < text_len && text_pad[pos] != 0; }
  int owner_of_image(std::size_t pos) const { return image_owner[pos - text_len]; }
};

SegmentMap build_segment_map(const ValidatedLayout& layout, const RegionGrid& region, std::size_t seg_len);

/// Row-major tokens x dim matrix. The last attribute_dims columns are the
/// attribute sub-vector.
struct EmbeddingBlock {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::size_t attribute_dims = 0;
  std::vector<double> values;

  EmbeddingBlock() = default;
  EmbeddingBlock(std::size_t rows_, std::size_t dim_, std::size_t attribute_dims_)
      : rows(rows_), dim(dim_), attribute_dims(attribute_dims_), values(rows_ * dim_, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * dim + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * dim + c]; }
  std::span<double> row(std::size_t r) { return {values.data() + r * dim, dim}; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * dim, dim}; }
  std::size_t content_dims() const { return dim - attribute_dims; }

  bool operator==(const EmbeddingBlock&) const = default;
};

struct EmbeddingOptions {
  std::size_t dim = 32;
  AttributeVocab vocab;
};

/// Keyed-hash embedding of (token, position, seed) into [-1, 1] on the
/// content columns. Attribute words also get a one-hot attribute
/// sub-vector; PAD rows are zero; image rows carry a zero sub-vector.
EmbeddingBlock embed(const SegmentMap& seg, std::uint64_t seed, const EmbeddingOptions& options = {});

/// splitmix64 finalizer; exposed for callers that derive per-case seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace layoutjoint
