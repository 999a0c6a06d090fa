// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/tokens.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "layoutjoint/error.hpp"

namespace layoutjoint {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Top 53 bits to [-1, 1).
double to_signed_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

constexpr std::string_view kImageToken = "<img>";

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::vector<std::string> tokenize(std::string_view text, std::size_t max_len) {
  if (max_len < 1) throw Error(ErrorCode::kInvalidArgument, "max_len must be at least 1");
  std::vector<std::string> tokens;
  tokens.reserve(max_len);
  std::size_t i = 0;
  while (i < text.size() && tokens.size() < max_len) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.push_back(lowercase(text.substr(start, i - start)));
  }
  tokens.resize(max_len, std::string(kPadToken));
  return tokens;
}

AttributeVocab::AttributeVocab()
    : words_{"red", "orange", "yellow", "green", "blue", "purple", "black", "white"} {}

AttributeVocab::AttributeVocab(std::vector<std::string> words) : words_(std::move(words)) {
  if (words_.empty()) throw Error(ErrorCode::kInvalidArgument, "attribute vocabulary is empty");
  std::set<std::string> seen;
  for (auto& w : words_) {
    w = lowercase(w);
    if (w.empty() || w == kPadToken || w.find_first_of(" \t\r\n") != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "invalid attribute word '" + w + "'");
    }
    if (!seen.insert(w).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate attribute word '" + w + "'");
    }
  }
}

AttributeVocab AttributeVocab::parse(std::string_view list) {
  std::vector<std::string> words;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    std::string_view item = list.substr(start, end - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    words.emplace_back(item);
    start = end + 1;
  }
  return AttributeVocab(std::move(words));
}

int AttributeVocab::index_of(std::string_view word) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] == word) return static_cast<int>(i);
  }
  return -1;
}

SegmentMap build_segment_map(const ValidatedLayout& layout, const RegionGrid& region, std::size_t seg_len) {
  if (seg_len < 1) throw Error(ErrorCode::kInvalidArgument, "seg_len must be at least 1");
  if (region.instance_count != static_cast<int>(layout.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "region grid was built for a different layout");
  }
  SegmentMap seg;
  seg.seg_len = seg_len;
  seg.instance_count = static_cast<int>(layout.size());
  seg.grid_h = region.grid_h;
  seg.grid_w = region.grid_w;
  seg.text_len = seg_len * (layout.size() + 1);
  seg.image_len = region.patch_count();
  seg.image_owner = region.owner;

  seg.text_segment.reserve(seg.text_len);
  seg.text_pad.reserve(seg.text_len);
  seg.text_tokens.reserve(seg.text_len);
  auto append = [&](int instance, std::string_view text) {
    seg.segments.push_back(Segment{instance, seg.text_tokens.size(), seg_len});
    for (auto& tok : tokenize(text, seg_len)) {
      seg.text_segment.push_back(instance);
      seg.text_pad.push_back(tok == kPadToken ? 1 : 0);
      seg.text_tokens.push_back(std::move(tok));
    }
  };
  append(0, layout.global_text());
  for (const Instance& inst : layout.instances()) append(inst.id, inst.text);
  return seg;
}

EmbeddingBlock embed(const SegmentMap& seg, std::uint64_t seed, const EmbeddingOptions& options) {
  const std::size_t attr_dims = options.vocab.size();
  if (options.dim <= attr_dims) {
    throw Error(ErrorCode::kInvalidArgument, "embedding dim must exceed the attribute vocabulary size");
  }
  EmbeddingBlock block(seg.total(), options.dim, attr_dims);
  const std::size_t content = block.content_dims();
  const std::uint64_t seed_key = mix_seed(seed);

  auto fill_content = [&](std::size_t row, std::string_view token) {
    const std::uint64_t key = mix_seed(fnv1a(token) ^ mix_seed(static_cast<std::uint64_t>(row) ^ seed_key));
    for (std::size_t j = 0; j < content; ++j) {
      block.at(row, j) = to_signed_unit(mix_seed(key + j * 0x9e3779b97f4a7c15ull));
    }
  };

  for (std::size_t p = 0; p < seg.text_len; ++p) {
    if (seg.text_pad[p]) continue;
    const std::string& tok = seg.text_tokens[p];
    fill_content(p, tok);
    if (int a = options.vocab.index_of(tok); a >= 0) {
      block.at(p, content + static_cast<std::size_t>(a)) = 1.0;
    }
  }
  for (std::size_t p = seg.text_len; p < seg.total(); ++p) fill_content(p, kImageToken);
  return block;
}

}  // namespace layoutjoint
