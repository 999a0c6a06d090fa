// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/state_dump.hpp"

#include <bit>
#include <cstring>

#include "layoutjoint/error.hpp"

namespace layoutjoint {
namespace {

constexpr char kMagic[8] = {'L', 'J', 'S', 'T', 'A', 'T', 'E', '1'};

template <typename T>
void put_le(std::string& out, T value) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t u(std::size_t width) {
    if (bytes_.size() - pos_ < width) throw Error(ErrorCode::kFormatError, "state dump is truncated");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += width;
    return v;
  }
  double f64() { return std::bit_cast<double>(u(8)); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_state_dump(const std::vector<StateSnapshot>& snapshots, std::uint64_t text_len) {
  std::string out(kMagic, sizeof(kMagic));
  const std::uint64_t rows = snapshots.empty() ? 0 : snapshots.front().block.rows;
  const std::uint64_t dim = snapshots.empty() ? 0 : snapshots.front().block.dim;
  const std::uint64_t attr = snapshots.empty() ? 0 : snapshots.front().block.attribute_dims;
  put_le(out, static_cast<std::uint32_t>(snapshots.size()));
  put_le(out, std::uint32_t{0});
  put_le(out, rows);
  put_le(out, dim);
  put_le(out, attr);
  put_le(out, text_len);
  for (const StateSnapshot& s : snapshots) {
    if (s.block.rows != rows || s.block.dim != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "snapshots differ in shape");
    }
    put_le(out, s.step);
    put_le(out, std::uint32_t{0});
    for (double v : s.block.values) put_le(out, v);
  }
  return out;
}

std::vector<StateSnapshot> decode_state_dump(std::string_view bytes, std::uint64_t* text_len) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kFormatError, "not a state dump");
  }
  Reader in(bytes.substr(sizeof(kMagic)));
  const auto count = static_cast<std::uint32_t>(in.u(4));
  in.u(4);
  const std::uint64_t rows = in.u(8);
  const std::uint64_t dim = in.u(8);
  const std::uint64_t attr = in.u(8);
  const std::uint64_t tl = in.u(8);
  if (text_len) *text_len = tl;
  if (dim != 0 && rows > in.remaining() / (8 * dim)) throw Error(ErrorCode::kFormatError, "state dump is truncated");
  std::vector<StateSnapshot> snapshots;
  snapshots.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    StateSnapshot s;
    s.step = static_cast<std::uint32_t>(in.u(4));
    in.u(4);
    s.block = EmbeddingBlock(rows, dim, attr);
    for (double& v : s.block.values) v = in.f64();
    snapshots.push_back(std::move(s));
  }
  return snapshots;
}

}  // namespace layoutjoint
