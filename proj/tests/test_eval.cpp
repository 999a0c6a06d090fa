// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include "doctest.h"
#include "layoutjoint/error.hpp"
#include "layoutjoint/eval.hpp"
#include "layoutjoint/layout_json.hpp"
#include "oracles.hpp"

using namespace layoutjoint;

namespace {

InstanceVerdict verdict(bool success, double iou) {
  InstanceVerdict v;
  v.iou = iou;
  v.position_ok = v.attribute_ok = v.success = success;
  return v;
}

}  // namespace

TEST_CASE("predicted_region matches component enumeration") {
  oracle::Rng rng(51);
  for (int c = 0; c < 300; ++c) {
    const int h = rng.range(1, 12), w = rng.range(1, 12);
    std::vector<int> grid(static_cast<std::size_t>(h) * w);
    for (int& v : grid) v = rng.range(-1, 2);
    for (int attr = -1; attr <= 3; ++attr) {
      const auto got = predicted_region(grid, h, w, attr);
      const auto want = oracle::largest_component(grid, h, w, attr);
      REQUIRE(got.has_value() == want.has_value());
      if (got) CHECK(*got == *want);
    }
  }
  CHECK_THROWS_AS(predicted_region(std::vector<int>(3), 2, 2, 0), Error);
}

TEST_CASE("judge_instance") {
  const AttributeVocab vocab;
  // 4x4 map: red (0) fills the left half, blue (4) the top-right quadrant.
  std::vector<int> map(16, kNoAttribute);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 2; ++c) map[r * 4 + c] = 0;
  }
  for (int r = 0; r < 2; ++r) {
    for (int c = 2; c < 4; ++c) map[r * 4 + c] = 4;
  }
  const Instance red{1, "a red cup", {0.0, 0.0, 0.5, 1.0}, "red"};
  InstanceVerdict v = judge_instance(red, map, 4, 4, vocab);
  CHECK(v.iou == 1.0);
  CHECK(v.success);

  const Instance shifted{1, "a red cup", {0.0, 0.0, 0.5, 0.25}, "red"};
  v = judge_instance(shifted, map, 4, 4, vocab);
  CHECK(v.iou == 0.25);
  CHECK_FALSE(v.position_ok);
  CHECK(v.attribute_ok);
  CHECK_FALSE(v.success);
  CHECK(judge_instance(shifted, map, 4, 4, vocab, 0.2).success);

  const Instance green{2, "a green dog", {0.5, 0.5, 1.0, 1.0}, "green"};
  v = judge_instance(green, map, 4, 4, vocab);
  CHECK_FALSE(v.predicted.has_value());
  CHECK(v.iou == 0.0);
  CHECK_FALSE(v.success);
}

TEST_CASE("plurality attribute check inside the predicted box") {
  const AttributeVocab vocab;
  // The red component's box also covers more blue cells than red ones.
  std::vector<int> map = {0, 4, 4,
                          0, 4, 4,
                          0, 0, 0};
  const Instance red{1, "red", {0.0, 0.0, 1.0, 1.0}, "red"};
  InstanceVerdict v = judge_instance(red, map, 3, 3, vocab);
  CHECK(v.position_ok);
  CHECK(v.attribute_ok);
  map = {0, 4, 4, 0, 4, 4, 0, 4, 0};
  v = judge_instance(red, map, 3, 3, vocab);
  CHECK_FALSE(v.position_ok);
  // Red L-shape: its box is the whole grid, holding 7 red and 9 blue cells.
  map = {0, 4, 4, 4, 0, 4, 4, 4, 0, 4, 4, 4, 0, 0, 0, 0};
  v = judge_instance(red, map, 4, 4, vocab);
  CHECK(v.position_ok);
  CHECK_FALSE(v.attribute_ok);
}

TEST_CASE("summarize fixtures") {
  LayoutResult lr;
  for (bool s : {true, true, false, false}) lr.verdicts.push_back(verdict(s, s ? 0.8 : 0.2));
  const EvalReport r = summarize("fixture", MaskConfig{}, {lr});
  CHECK(r.overall.isr == 0.5);
  CHECK(r.overall.sr == 0.0);
  CHECK(r.overall.miou == doctest::Approx(0.5));
  CHECK(r.by_level.at(4).isr == 0.5);

  LayoutResult ok;
  ok.verdicts = {verdict(true, 1.0), verdict(true, 1.0)};
  const EvalReport all = summarize("all", MaskConfig{}, {ok, ok, ok, ok});
  CHECK(all.overall.isr == 1.0);
  CHECK(all.overall.sr == 1.0);
}

TEST_CASE("SR can exceed ISR only across instance-count levels") {
  LayoutResult single;
  single.verdicts = {verdict(true, 1.0)};
  LayoutResult big;
  for (int i = 0; i < 10; ++i) big.verdicts.push_back(verdict(false, 0.0));
  const EvalReport r = summarize("mixed", MaskConfig{}, {single, big});
  CHECK(r.overall.sr == 0.5);
  CHECK(r.overall.isr == doctest::Approx(1.0 / 11.0));
  for (const auto& [k, m] : r.by_level) CHECK(m.sr <= m.isr);
}

TEST_CASE("generate_suite") {
  SuiteOptions o;
  o.count = 60;
  o.seed = 5;
  const auto a = generate_suite(o);
  const auto b = generate_suite(o);
  REQUIRE(a.size() == 60);
  std::set<std::size_t> sizes;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(layout_to_json(a[k]) == layout_to_json(b[k]));
    const ValidatedLayout v = validate_layout(a[k]);
    sizes.insert(v.size());
    CHECK(v.size() >= 2);
    CHECK(v.size() <= 6);
    std::set<std::string> attrs;
    for (const Instance& inst : v.instances()) {
      CHECK(o.vocab.index_of(inst.attribute) >= 0);
      attrs.insert(inst.attribute);
      CHECK(a[k].global_text.find(inst.attribute) == std::string::npos);
    }
    CHECK(attrs.size() == v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = i + 1; j < v.size(); ++j) {
        CHECK(box_iou(v.instances()[i].box, v.instances()[j].box) <= 0.3);
      }
    }
  }
  CHECK(sizes.size() == 5);
  o.seed = 6;
  CHECK(layout_to_json(generate_suite(o)[0]) != layout_to_json(a[0]));
  o.min_instances = 1;
  CHECK_THROWS_AS(generate_suite(o), Error);
  o.min_instances = 2;
  o.count = 0;
  CHECK_THROWS_AS(generate_suite(o), Error);
}

TEST_CASE("evaluate_suite is independent of the worker count") {
  SuiteOptions so;
  so.count = 6;
  so.seed = 12;
  const auto suite = generate_suite(so);
  EvalOptions eo;
  eo.render = RenderOptions::for_resolution(512);
  eo.render.seed = 4;
  eo.jobs = 1;
  const EvalReport one = evaluate_suite(suite, MaskConfig{}, eo, "w/ all");
  eo.jobs = 3;
  const EvalReport three = evaluate_suite(suite, MaskConfig{}, eo, "w/ all");
  CHECK(report_to_json(one) == report_to_json(three));
  CHECK(one.overall.isr == 1.0);
  REQUIRE(one.layouts.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) CHECK(one.layouts[k].layout_index == k);

  CHECK_THROWS_AS(evaluate_suite({}, MaskConfig{}, eo), Error);
  auto bad = suite;
  bad[0].instances[0].attribute = "plaid";
  CHECK_THROWS_AS(evaluate_suite(bad, MaskConfig{}, eo), Error);
}

TEST_CASE("ablation rows and CSV") {
  const auto rows = ablation_rows();
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].name == "w/o I2I control");
  CHECK_FALSE(rows[0].config.i2i_control);
  CHECK_FALSE(rows[3].config.t2t_control);
  CHECK_FALSE(rows[4].config.detail_renderer);
  CHECK(rows[5].name == "w/ all");
  CHECK(rows[5].config == MaskConfig{});

  LayoutResult two;
  two.verdicts = {verdict(true, 0.9), verdict(false, 0.1)};
  LayoutResult three;
  three.verdicts = {verdict(true, 1.0), verdict(true, 1.0), verdict(true, 0.5)};
  std::vector<EvalReport> reports{summarize("a, b", MaskConfig{}, {two, three})};
  const std::string csv = reports_to_csv(reports);
  CHECK(csv ==
        "config,ISR_L2,ISR_L3,ISR_L4,ISR_L5,ISR_L6,ISR_AVG,MIoU_L2,MIoU_L3,MIoU_L4,MIoU_L5,MIoU_L6,MIoU_AVG,SR\n"
        "\"a, b\",0.5000,1.0000,,,,0.8000,0.5000,0.8333,,,,0.7000,0.5000\n");
}

TEST_CASE("report JSON flags the attribute proxy") {
  LayoutResult lr;
  lr.verdicts = {verdict(true, 1.0)};
  const std::string json = report_to_json(summarize("x", MaskConfig{}, {lr}));
  CHECK(json.find("\"attribute_check\"") != std::string::npos);
  CHECK(json.find("\"L1\"") != std::string::npos);
}
