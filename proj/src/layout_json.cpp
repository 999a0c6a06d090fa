// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/layout_json.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "layoutjoint/error.hpp"

namespace layoutjoint {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::kInvalidLayout, message); }

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing field \"" + key + "\"");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) fail(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

}  // namespace

Layout parse_layout_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail("syntax error at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!doc.is_object()) fail("document root must be an object");

  Layout layout;
  layout.global_text = require_string(doc, "global_text", "layout");

  if (auto it = doc.find("resolution"); it != doc.end()) {
    if (!it->is_number_integer()) fail("layout.resolution: expected an integer");
    const auto res = it->get<long long>();
    if (res <= 0 || res > 1 << 20) fail("layout.resolution: must be a positive pixel count");
    layout.resolution = static_cast<int>(res);
  }

  bool pixel_coords = false;
  if (auto it = doc.find("pixel_coords"); it != doc.end()) {
    if (!it->is_boolean()) fail("layout.pixel_coords: expected a boolean");
    pixel_coords = it->get<bool>();
  }

  const json& instances = require(doc, "instances", "layout");
  if (!instances.is_array()) fail("layout.instances: expected an array");
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const std::string where = "instances[" + std::to_string(i) + "]";
    const json& item = instances[i];
    if (!item.is_object()) fail(where + ": expected an object");
    Instance inst;
    inst.id = static_cast<int>(i) + 1;
    inst.text = require_string(item, "text", where);
    if (auto it = item.find("attribute"); it != item.end() && !it->is_null()) {
      if (!it->is_string()) fail(where + ".attribute: expected a string");
      inst.attribute = it->get<std::string>();
    }
    const json& box = require(item, "box", where);
    if (!box.is_array() || box.size() != 4) fail(where + ".box: expected [x0, y0, x1, y1]");
    double v[4];
    for (std::size_t k = 0; k < 4; ++k) {
      if (!box[k].is_number()) fail(where + ".box[" + std::to_string(k) + "]: expected a number");
      v[k] = box[k].get<double>();
      if (pixel_coords) v[k] /= layout.resolution;
    }
    inst.box = BoundingBox{v[0], v[1], v[2], v[3]};
    layout.instances.push_back(std::move(inst));
  }
  return layout;
}

Layout load_layout_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open layout file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_layout_json(buf.str());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidLayout) throw;
    throw Error(ErrorCode::kInvalidLayout, path.string() + ": " + e.detail());
  }
}

std::string layout_to_json(const Layout& layout) {
  json doc;
  doc["global_text"] = layout.global_text;
  doc["resolution"] = layout.resolution;
  json instances = json::array();
  for (const Instance& inst : layout.instances) {
    json item;
    item["text"] = inst.text;
    if (!inst.attribute.empty()) item["attribute"] = inst.attribute;
    item["box"] = {inst.box.x0, inst.box.y0, inst.box.x1, inst.box.y1};
    instances.push_back(std::move(item));
  }
  doc["instances"] = std::move(instances);
  return doc.dump(2) + "\n";
}

}  // namespace layoutjoint
