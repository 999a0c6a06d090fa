// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "layoutjoint/error.hpp"

namespace layoutjoint {
namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kFormatError, "PGM: " + what); }

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) bad("malformed header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > (1L << 30)) bad("header value too large");
      ++pos_;
    }
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_pgm(const GrayImage& image) {
  if (image.maxval < 1 || image.maxval > 65535) bad("maxval out of range");
  if (image.samples.size() != static_cast<std::size_t>(image.width) * image.height) bad("sample count mismatch");
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n" +
                    std::to_string(image.maxval) + "\n";
  const bool wide = image.maxval > 255;
  out.reserve(out.size() + image.samples.size() * (wide ? 2 : 1));
  for (std::uint16_t s : image.samples) {
    if (wide) out.push_back(static_cast<char>(s >> 8));
    out.push_back(static_cast<char>(s & 0xff));
  }
  return out;
}

GrayImage decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') bad("not a binary graymap (P5)");
  HeaderReader reader(bytes);
  reader.advance(2);
  GrayImage image;
  image.width = static_cast<int>(reader.number());
  image.height = static_cast<int>(reader.number());
  image.maxval = static_cast<int>(reader.number());
  if (image.width < 1 || image.height < 1) bad("empty image");
  if (image.maxval < 1 || image.maxval > 65535) bad("maxval out of range");
  // Exactly one whitespace byte separates the header from the raster.
  if (reader.pos() >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[reader.pos()]))) {
    bad("missing raster separator");
  }
  reader.advance(1);
  const bool wide = image.maxval > 255;
  const std::size_t count = static_cast<std::size_t>(image.width) * image.height;
  const std::size_t need = count * (wide ? 2 : 1);
  if (bytes.size() - reader.pos() < need) bad("truncated raster");
  image.samples.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + reader.pos());
  for (std::size_t i = 0; i < count; ++i) {
    image.samples[i] = wide ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]) : p[i];
    if (image.samples[i] > image.maxval) bad("sample exceeds maxval");
  }
  return image;
}

GrayImage mask_to_image(const JointAttentionMask& mask) {
  GrayImage image;
  image.width = image.height = static_cast<int>(mask.side());
  image.maxval = 255;
  image.samples.resize(mask.cells().size());
  std::transform(mask.cells().begin(), mask.cells().end(), image.samples.begin(),
                 [](std::uint8_t c) { return static_cast<std::uint16_t>(c ? 255 : 0); });
  return image;
}

GrayImage depth_to_image(const DepthMap& depth) {
  GrayImage image;
  image.width = depth.w;
  image.height = depth.h;
  image.maxval = 65535;
  image.samples.resize(depth.values.size());
  std::transform(depth.values.begin(), depth.values.end(), image.samples.begin(), [](double d) {
    return static_cast<std::uint16_t>(std::lround(std::clamp(d, 0.0, 1.0) * 65535.0));
  });
  return image;
}

DepthMap depth_from_image(const GrayImage& image) {
  DepthMap depth;
  depth.w = image.width;
  depth.h = image.height;
  depth.values.resize(image.samples.size());
  std::transform(image.samples.begin(), image.samples.end(), depth.values.begin(),
                 [&](std::uint16_t s) { return static_cast<double>(s) / image.maxval; });
  return depth;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to '" + path.string() + "'");
}

}  // namespace layoutjoint
