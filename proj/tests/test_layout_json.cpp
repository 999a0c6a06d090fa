// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "layoutjoint/error.hpp"
#include "layoutjoint/layout_json.hpp"

using namespace layoutjoint;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_layout_json(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidLayout);
    return e.detail();
  }
  FAIL("expected an error");
  return {};
}

}  // namespace

TEST_CASE("parse a normalized layout") {
  const Layout l = parse_layout_json(R"({"global_text": "two things", "resolution": 768,
      "instances": [{"text": "a red cup", "attribute": "red", "box": [0.1, 0.2, 0.3, 0.4]},
                    {"text": "a dog", "box": [0, 0, 1, 1]}]})");
  CHECK(l.global_text == "two things");
  CHECK(l.resolution == 768);
  REQUIRE(l.instances.size() == 2);
  CHECK(l.instances[0].attribute == "red");
  CHECK(l.instances[0].box == BoundingBox{0.1, 0.2, 0.3, 0.4});
  CHECK(l.instances[1].attribute.empty());
}

TEST_CASE("pixel coordinates are normalized by the resolution") {
  const Layout l = parse_layout_json(R"({"global_text": "g", "resolution": 512, "pixel_coords": true,
      "instances": [{"text": "t", "box": [0, 128, 256, 512]}]})");
  CHECK(l.instances[0].box == BoundingBox{0.0, 0.25, 0.5, 1.0});
}

TEST_CASE("syntax errors report line and column") {
  const std::string msg = message_of("{\n  \"global_text\": \"g\",\n  \"instances\": [,]\n}");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("field errors name the field") {
  CHECK(message_of(R"({"instances": []})").find("global_text") != std::string::npos);
  CHECK(message_of(R"({"global_text": "g", "instances": [{"text": "t", "box": [0, 0, 1]}]})")
            .find("instances[0].box") != std::string::npos);
  CHECK(message_of(R"({"global_text": "g", "instances": [{"text": "t", "box": [0, 0, "x", 1]}]})")
            .find("instances[0].box[2]") != std::string::npos);
  CHECK(message_of(R"({"global_text": 3, "instances": []})").find("global_text") != std::string::npos);
  CHECK(message_of(R"({"global_text": "g", "resolution": -5, "instances": []})").find("resolution") !=
        std::string::npos);
  CHECK(message_of("[1, 2]").find("root") != std::string::npos);
}

TEST_CASE("missing file is an IoError naming the path") {
  try {
    load_layout_file("/nonexistent/dir/layout.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIoError);
    CHECK(std::string(e.what()).find("/nonexistent/dir/layout.json") != std::string::npos);
  }
}

TEST_CASE("file errors are prefixed with the path") {
  const auto path = std::filesystem::temp_directory_path() / "layoutjoint_bad_layout.json";
  std::ofstream(path) << "{\"global_text\": \"g\"}";
  try {
    load_layout_file(path);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidLayout);
    CHECK(e.detail().find(path.string()) == 0);
  }
  std::filesystem::remove(path);
}

TEST_CASE("layout_to_json round trips") {
  Layout l;
  l.global_text = "a scene";
  l.resolution = 1024;
  l.instances.push_back({1, "a green kite", {0.125, 0.25, 0.5, 0.75}, "green"});
  l.instances.push_back({2, "a vase", {0.6, 0.1, 0.9, 0.3}, ""});
  const std::string text = layout_to_json(l);
  CHECK(text.back() == '\n');
  const Layout back = parse_layout_json(text);
  CHECK(back.global_text == l.global_text);
  CHECK(back.resolution == 1024);
  REQUIRE(back.instances.size() == 2);
  CHECK(back.instances[0].box == l.instances[0].box);
  CHECK(back.instances[0].attribute == "green");
  CHECK(back.instances[1].attribute.empty());
  CHECK(layout_to_json(back) == text);
}
