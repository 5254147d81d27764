#include <cmath>
#include <numeric>
#include <random>

#include "compare.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "ige/graph_extract.hpp"
#include "ige/io.hpp"
#include "ige/merge_engine.hpp"
#include "reference.hpp"

using namespace ige;

namespace {

Node big_node(NodeId id, Color color) {
  Node n;
  n.id = id;
  n.size = 1000;
  n.color = color;
  for (int c = 0; c < 3; ++c) n.color_sum[c] = color[c] * 1000;
  n.perimeter = 100;
  return n;
}

Edge edge_between(const ImageGraph& g, NodeId a, NodeId b) {
  Edge e;
  e.src = a;
  e.dst = b;
  e.shared_pixels = 1;
  e.color_distance = color_distance(g.nodes[std::size_t(a)].color, g.nodes[std::size_t(b)].color);
  return e;
}

Image gray_row(std::vector<double> values) {
  std::vector<double> data;
  for (double v : values) data.insert(data.end(), {v, v, v});
  return Image(1, int(values.size()), std::move(data));
}

}  // namespace

TEST_CASE("color_distance") {
  CHECK(color_distance({0, 0, 0}, {0, 0, 0}) == 0.0);
  CHECK(color_distance({0, 0, 0}, {1, 1, 1}) == doctest::Approx(1.7320508075688772).epsilon(1e-15));
  CHECK(color_distance({0.2, 0.5, 0.9}, {0.1, 0.7, 0.6}) == doctest::Approx(0.37416573867739413).epsilon(1e-14));
  CHECK(color_distance({0.2, 0.5, 0.9}, {0.1, 0.7, 0.6}) == color_distance({0.1, 0.7, 0.6}, {0.2, 0.5, 0.9}));
}

TEST_CASE("size_adjustment anchors") {
  // Frozen from a 30-digit evaluation of (1 + e^{-a(s - b/r)})^{-1/r}.
  CHECK(size_adjustment(1, 1, 1.0, 0.04, 10.0) == doctest::Approx(0.41095956594133490).epsilon(1e-13));
  CHECK(size_adjustment(1, 5, 0.5, 0.04, 10.0) == doctest::Approx(0.10153544297019520).epsilon(1e-13));
  CHECK(size_adjustment(5, 1, 0.5, 0.04, 10.0) == size_adjustment(1, 5, 0.5, 0.04, 10.0));
  // Large patches: the exponential vanishes.
  for (double r : {1.0, 0.6, 0.2}) CHECK(size_adjustment(100000, 200000, r, 0.04, 10.0) == doctest::Approx(1.0));
  // Independent long-double oracle over a grid.
  for (std::int64_t s : {1, 2, 7, 30, 120, 900}) {
    for (double r : {0.1, 0.35, 0.6, 0.9, 1.0}) {
      const double oracle = double(reference::phi(s, s + 3, r, 0.04L, 10.0L));
      CHECK(size_adjustment(s, s + 3, r, 0.04, 10.0) == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
}

TEST_CASE("adjusted_distance") {
  const FilterParams p;
  CHECK(adjusted_distance({0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}, 1, 9, 0.7, p) == 0.0);
  CHECK(adjusted_distance({0, 0, 0}, {1, 0, 0}, 1, 1, 1.0, p) == doctest::Approx(0.41095956594133490).epsilon(1e-13));
  CHECK(adjusted_distance({0, 0, 0}, {0.5, 0, 0}, 1 << 20, 1 << 21, 1.0, p) == doctest::Approx(0.5));
}

TEST_CASE("merge_threshold") {
  CHECK(merge_threshold(0.03, 1.0, ThresholdForm::T2, 0.1) == 0.03);
  CHECK(merge_threshold(0.03, 0.6, ThresholdForm::T2, 0.1) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(merge_threshold(0.03, 0.5, ThresholdForm::T1, 0.1) == doctest::Approx(0.06).epsilon(1e-15));
  CHECK(merge_threshold(0.03, 1.0, ThresholdForm::T1, 0.1) == 0.03);
  CHECK(merge_threshold(0.03, 0.1, ThresholdForm::T2, 0.1) > 0.0);
  CHECK_THROWS_AS(merge_threshold(0.03, 0.05, ThresholdForm::T2, 0.1), ParameterError);
  CHECK_THROWS_AS(merge_threshold(0.03, 0.0, ThresholdForm::T1, 0.1), ParameterError);
  CHECK_THROWS_AS(merge_threshold(0.03, 1.2, ThresholdForm::T1, 0.1), ParameterError);
}

TEST_CASE("merging-rule constraints hold on finite-difference grids") {
  int violations = 0;
  // tau decreasing in r.
  for (auto form : {ThresholdForm::T1, ThresholdForm::T2}) {
    for (double r = 0.1; r < 1.0 - 1e-9; r += 0.01) {
      const double next = std::min(1.0, r + 0.01);
      violations += !(merge_threshold(0.03, next, form, 0.1) - merge_threshold(0.03, r, form, 0.1) < 0.0);
    }
  }
  for (std::int64_t s = 1; s <= 500; ++s) {
    for (int k = 10; k < 100; ++k) {
      const double r = k / 100.0;
      const double here = size_adjustment(s, s, r, 0.04, 10.0);
      // Increasing in r (C1) and in the smaller size (C2).
      violations += !(size_adjustment(s, s, r + 0.01, 0.04, 10.0) - here > 0.0);
      violations += !(size_adjustment(s + 1, s + 1, r, 0.04, 10.0) - here > 0.0);
    }
  }
  // Increasing in color distance (C3).
  const FilterParams p;
  for (double d = 0.0; d < 1.7; d += 0.05) {
    const double a = adjusted_distance({0, 0, 0}, {d, 0, 0}, 4, 9, 0.7, p);
    const double b = adjusted_distance({0, 0, 0}, {d + 0.01, 0, 0}, 4, 9, 0.7, p);
    violations += !(b > a);
  }
  CHECK(violations == 0);
}

TEST_CASE("select_candidates") {
  FilterParams p;
  p.threshold = ThresholdForm::T1;
  p.d0 = 0.05;

  SUBCASE("no qualifying pair") {
    const auto g = img2graph(testing::checkerboard(3, 3));
    const auto c = select_candidates(g, 1.0, p);
    CHECK(std::all_of(c.begin(), c.end(), [](NodeId n) { return n == kNoNode; }));
  }
  SUBCASE("identical neighbors pick each other") {
    ImageGraph g;
    g.nodes = {big_node(0, {0.4, 0.4, 0.4}), big_node(1, {0.4, 0.4, 0.4})};
    g.edges = {edge_between(g, 0, 1)};
    CHECK(select_candidates(g, 1.0, p) == std::vector<NodeId>{1, 0});
  }
  SUBCASE("star picks the closest neighbor") {
    ImageGraph g;
    g.nodes = {big_node(0, {0.5, 0.5, 0.5}), big_node(1, {0.53, 0.5, 0.5}), big_node(2, {0.51, 0.5, 0.5}),
               big_node(3, {0.52, 0.5, 0.5})};
    g.edges = {edge_between(g, 0, 1), edge_between(g, 0, 2), edge_between(g, 0, 3)};
    const auto c = select_candidates(g, 1.0, p);
    // Brute force over the center's three edges.
    NodeId best = kNoNode;
    double best_d = 1e9;
    for (NodeId n : {1, 2, 3}) {
      const double d = color_distance(g.nodes[0].color, g.nodes[std::size_t(n)].color);
      if (d < best_d) best = n, best_d = d;
    }
    CHECK(best == 2);
    CHECK(c[0] == best);
    CHECK(c[1] == 0);
    CHECK(c[2] == 0);
    CHECK(c[3] == 0);
  }
  SUBCASE("ties go to the smaller id") {
    ImageGraph g;
    g.nodes = {big_node(0, {0.5, 0.5, 0.5}), big_node(1, {0.515625, 0.5, 0.5}), big_node(2, {0.484375, 0.5, 0.5})};
    g.edges = {edge_between(g, 0, 1), edge_between(g, 0, 2)};
    REQUIRE(g.edges[0].color_distance == g.edges[1].color_distance);
    CHECK(select_candidates(g, 1.0, p)[0] == 1);
  }
  SUBCASE("threshold is strict") {
    ImageGraph g;
    g.nodes = {big_node(0, {0.0, 0.0, 0.0}), big_node(1, {0.0625, 0.0, 0.0})};
    g.edges = {edge_between(g, 0, 1)};
    p.d0 = 0.0625;  // d_a == tau exactly (phi is 1 in double precision here)
    REQUIRE(size_adjustment(1000, 1000, 1.0, p.alpha, p.beta) == 1.0);
    CHECK(select_candidates(g, 1.0, p)[0] == kNoNode);
  }
}

TEST_CASE("merge_step examples") {
  FilterParams p;

  SUBCASE("uniform image is a fixed point") {
    const auto g = img2graph(Image::filled(4, 4, {0.1, 0.2, 0.3}));
    const auto [next, report] = merge_step(g, 0.9, p);
    CHECK(report.merges_performed == 0);
    CHECK(next.nodes == g.nodes);
    CHECK(next.edges == g.edges);
    CHECK(next.labels == g.labels);
  }
  SUBCASE("equal-color nodes of sizes 3 and 5 merge") {
    const Image x = Image::filled(1, 8, {0.5, 0.5, 0.5});
    const auto g = build_graph(LabelMatrix{1, 8, {0, 0, 0, 1, 1, 1, 1, 1}}, x, 1.0);
    REQUIRE(g.nodes.size() == 2);
    const auto [next, report] = merge_step(g, 0.9, p);
    REQUIRE(next.nodes.size() == 1);
    CHECK(next.nodes[0].size == 8);
    CHECK(next.nodes[0].color == Color{0.5, 0.5, 0.5});
    CHECK(report.merges_performed == 1);
    CHECK(report.node_count_after == 1);
  }
  SUBCASE("merged color is the exact pixel mean") {
    const Image x = gray_row({0.0, 0.4, 0.4, 0.4});
    const auto g = img2graph(x);
    REQUIRE(g.nodes.size() == 2);
    FilterParams loose;
    loose.threshold = ThresholdForm::T1;
    loose.d0 = 1.0;
    const auto [next, report] = merge_step(g, 0.9, loose);
    REQUIRE(next.nodes.size() == 1);
    CHECK(next.nodes[0].size == 4);
    for (double c : next.nodes[0].color) CHECK(c == doctest::Approx((0.0 + 3 * 0.4) / 4).epsilon(1e-15));
  }
  SUBCASE("chains contract transitively") {
    // A-B-C with A picking B and C picking B; all three collapse in one step.
    const Image x = gray_row({0.50, 0.52, 0.54});
    FilterParams q;
    q.threshold = ThresholdForm::T1;
    q.d0 = 0.06;
    const auto [next, report] = merge_step(img2graph(x), 1.0, q);
    CHECK(next.nodes.size() == 1);
  }
}

TEST_CASE("merge_step conserves mass and never adds nodes") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const Image x = testing::random_image(rng, 12, 10, 0.3, 0.5);
    FilterParams p;
    p.d0 = 0.05;
    auto g = img2graph(x);
    Color mass{};
    for (const auto& n : g.nodes) {
      for (int c = 0; c < 3; ++c) mass[c] += n.color_sum[c];
    }
    for (double r : resolution_schedule(p)) {
      const std::size_t before = g.nodes.size();
      const auto candidates = select_candidates(g, r, p);
      const bool any = std::any_of(candidates.begin(), candidates.end(), [](NodeId n) { return n != kNoNode; });
      auto [next, report] = merge_step(g, r, p);
      CHECK(next.nodes.size() <= before);
      if (any) CHECK(next.nodes.size() < before);
      std::int64_t size = 0;
      Color now{};
      for (const auto& n : next.nodes) {
        size += n.size;
        for (int c = 0; c < 3; ++c) now[c] += n.color_sum[c];
      }
      CHECK(size == 120);
      for (int c = 0; c < 3; ++c) CHECK(now[c] == doctest::Approx(mass[c]).epsilon(1e-12));
      // Colors come from sums over the original pixels.
      for (const auto& n : next.nodes) {
        Color direct{};
        for (std::size_t i = 0; i < next.labels.labels.size(); ++i) {
          if (next.labels.labels[i] != n.id) continue;
          for (int c = 0; c < 3; ++c) direct[c] += x.data()[i * 3 + c];
        }
        for (int c = 0; c < 3; ++c) CHECK(std::abs(n.color[c] - direct[c] / double(n.size)) <= 1e-6);
      }
      g = std::move(next);
    }
  }
}

TEST_CASE("merge_step matches the exhaustive reference on random 6x6 images") {
  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> d0(0.03, 0.5);
  for (int trial = 0; trial < 150; ++trial) {
    const Image x = testing::random_palette_image(rng, 6, 6, 3);
    FilterParams p;
    p.d0 = d0(rng);
    p.threshold = trial % 3 == 0 ? ThresholdForm::T1 : ThresholdForm::T2;
    auto g = img2graph(x);
    auto ref = reference::flood_fill_graph(x);
    for (double r : resolution_schedule(p)) {
      g = merge_step(g, r, p).first;
      ref = reference::merge_step(x, ref, r, p);
      const auto diff = testing::diff_against_reference(g, ref);
      REQUIRE_MESSAGE(diff.empty(), "trial " << trial << " r=" << r << ": " << diff);
    }
  }
}

TEST_CASE("resolution_schedule") {
  FilterParams p;
  const auto s = resolution_schedule(p);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == doctest::Approx(0.9));
  CHECK(s[1] == doctest::Approx(0.8));
  CHECK(s[2] == doctest::Approx(0.7));
  CHECK(s[3] == 0.6);

  p.target_resolution = 0.65;
  const auto t = resolution_schedule(p);
  REQUIRE(t.size() == 4);  // 0.9 0.8 0.7 0.65
  CHECK(t[2] == doctest::Approx(0.7));
  CHECK(t[3] == 0.65);

  p.target_resolution = 0.9;
  CHECK(resolution_schedule(p) == std::vector<double>{0.9});

  p.target_resolution = 0.05;
  CHECK_THROWS_AS(resolution_schedule(p), ParameterError);
}

TEST_CASE("filter") {
  SUBCASE("uniform image passes through") {
    const Image x = Image::filled(5, 7, {0.25, 0.5, 0.75});
    const auto result = filter(x, {});
    CHECK(result.filtered == x);
    CHECK(result.graph.nodes.size() == 1);
    for (const auto& s : result.steps) CHECK(s.node_count_after == 1);
  }
  SUBCASE("default schedule runs four steps ending at r*") {
    std::mt19937 rng(3);
    const auto result = filter(testing::textured_image(rng, 32, 32), {});
    REQUIRE(result.steps.size() == 4);
    double before = 1.0;
    for (const auto& s : result.steps) {
      CHECK(s.resolution_before == doctest::Approx(before));
      CHECK(s.resolution_after == doctest::Approx(before - 0.1));
      before = s.resolution_after;
    }
    CHECK(result.graph.resolution == 0.6);
    CHECK(result.steps[3].threshold_value == doctest::Approx(0.15));
  }
  SUBCASE("bad parameters propagate") {
    FilterParams p;
    p.target_resolution = 0.05;
    CHECK_THROWS_AS(filter(Image::filled(2, 2, {0, 0, 0}), p), ParameterError);
  }
  SUBCASE("output is independent of the thread count") {
    std::mt19937 rng(8);
    const Image x = testing::textured_image(rng, 70, 45);
    const auto base = filter(x, {}, {1});
    for (int threads : {2, 8}) {
      const auto other = filter(x, {}, {threads});
      CHECK(other.filtered == base.filtered);
      CHECK(other.graph == base.graph);
    }
  }
  SUBCASE("lower target resolution never has more nodes") {
    std::mt19937 rng(12);
    const Image x = testing::textured_image(rng, 48, 48);
    FilterParams hi, lo;
    hi.target_resolution = 0.8;
    lo.target_resolution = 0.4;
    CHECK(filter(x, lo).graph.nodes.size() <= filter(x, hi).graph.nodes.size());
  }
}
