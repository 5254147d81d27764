#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "ige/merge_engine.hpp"
#include "ige/types.hpp"

namespace ige {

namespace {

Violation violation(std::string kind, std::string message) {
  return {std::move(kind), std::move(message)};
}

std::string where(int y, int x) { return "(" + std::to_string(y) + "," + std::to_string(x) + ")"; }

}  // namespace

std::optional<Violation> validate(const ImageGraph& g) {
  const LabelMatrix& lm = g.labels;
  const std::size_t p = g.nodes.size();
  if (lm.height < 1 || lm.width < 1 || lm.labels.size() != lm.pixel_count()) {
    return violation("bad shape", "label matrix is " + std::to_string(lm.height) + "x" +
                                      std::to_string(lm.width) + " with " +
                                      std::to_string(lm.labels.size()) + " entries");
  }
  if (!(g.resolution > 0.0 && g.resolution <= 1.0)) {
    return violation("bad resolution", "resolution " + std::to_string(g.resolution) + " outside ]0,1]");
  }
  for (std::size_t i = 0; i < p; ++i) {
    if (g.nodes[i].id != NodeId(i)) {
      return violation("node ids not contiguous",
                       "node at index " + std::to_string(i) + " has id " + std::to_string(g.nodes[i].id));
    }
  }

  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const Edge& e = g.edges[k];
    if (e.src < 0 || e.dst < 0 || std::size_t(e.src) >= p || std::size_t(e.dst) >= p) {
      return violation("dangling edge", "edge #" + std::to_string(k) + " (" + std::to_string(e.src) + "," +
                                            std::to_string(e.dst) + ") references a missing node");
    }
  }

  // Pixel-level recount.
  std::vector<std::int64_t> counted(p, 0);
  for (int y = 0; y < lm.height; ++y) {
    for (int x = 0; x < lm.width; ++x) {
      const NodeId l = lm.at(y, x);
      if (l < 0 || std::size_t(l) >= p) {
        return violation("unknown label", "pixel " + where(y, x) + " carries label " + std::to_string(l));
      }
      ++counted[std::size_t(l)];
    }
  }
  std::int64_t total = 0;
  for (const Node& n : g.nodes) total += n.size;
  if (total != std::int64_t(lm.pixel_count())) {
    return violation("partition broken", "node sizes sum to " + std::to_string(total) + ", image has " +
                                             std::to_string(lm.pixel_count()) + " pixels");
  }
  for (std::size_t i = 0; i < p; ++i) {
    const Node& n = g.nodes[i];
    if (n.size < 1 || counted[i] != n.size) {
      return violation("partition broken", "node " + std::to_string(i) + " has size " +
                                               std::to_string(n.size) + " but " +
                                               std::to_string(counted[i]) + " labelled pixels");
    }
    for (int c = 0; c < 3; ++c) {
      const double mean = n.color_sum[c] / double(n.size);
      if (std::abs(mean - n.color[c]) > 1e-9 || n.color[c] < 0.0 || n.color[c] > 1.0) {
        return violation("bad color", "node " + std::to_string(i) + " channel " + std::to_string(c));
      }
    }
  }

  // 4-connectivity of every label: one flood fill per node from its first pixel.
  std::vector<char> seen(lm.pixel_count(), 0);
  std::vector<char> started(p, 0);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < lm.pixel_count(); ++start) {
    const NodeId l = lm.labels[start];
    if (seen[start]) continue;
    if (started[std::size_t(l)]) {
      return violation("disconnected node", "label " + std::to_string(l) + " has a second component at " +
                                                where(int(start / lm.width), int(start % lm.width)));
    }
    started[std::size_t(l)] = 1;
    seen[start] = 1;
    stack.assign(1, start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int y = int(i / lm.width);
      const int x = int(i % lm.width);
      const auto visit = [&](int yy, int xx) {
        if (yy < 0 || xx < 0 || yy >= lm.height || xx >= lm.width) return;
        const std::size_t j = std::size_t(yy) * lm.width + xx;
        if (!seen[j] && lm.labels[j] == l) {
          seen[j] = 1;
          stack.push_back(j);
        }
      };
      visit(y - 1, x);
      visit(y + 1, x);
      visit(y, x - 1);
      visit(y, x + 1);
    }
  }

  // Adjacency and perimeters recomputed from labels.
  std::map<std::pair<NodeId, NodeId>, std::int64_t> shared;
  std::vector<std::int64_t> perimeter(p, 0);
  for (int y = 0; y < lm.height; ++y) {
    for (int x = 0; x < lm.width; ++x) {
      const NodeId l = lm.at(y, x);
      const auto side = [&](int yy, int xx, bool count_pair) {
        if (yy < 0 || xx < 0 || yy >= lm.height || xx >= lm.width) {
          ++perimeter[std::size_t(l)];
          return;
        }
        const NodeId o = lm.at(yy, xx);
        if (o == l) return;
        ++perimeter[std::size_t(l)];
        if (count_pair) ++shared[{std::min(l, o), std::max(l, o)}];
      };
      side(y - 1, x, false);
      side(y, x - 1, false);
      side(y + 1, x, true);
      side(y, x + 1, true);
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    if (perimeter[i] != g.nodes[i].perimeter) {
      return violation("bad perimeter", "node " + std::to_string(i) + " stores " +
                                            std::to_string(g.nodes[i].perimeter) + ", labels give " +
                                            std::to_string(perimeter[i]));
    }
  }

  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const Edge& e = g.edges[k];
    const std::string id = "edge #" + std::to_string(k) + " (" + std::to_string(e.src) + "," +
                           std::to_string(e.dst) + ")";
    if (e.src >= e.dst) return violation("non-canonical edge", id + " is not stored with src < dst");
    if (k > 0) {
      const Edge& prev = g.edges[k - 1];
      if (std::pair(prev.src, prev.dst) >= std::pair(e.src, e.dst)) {
        return violation("unsorted edges", id + " is duplicated or out of order");
      }
    }
    const auto it = shared.find({e.src, e.dst});
    if (it == shared.end()) return violation("phantom edge", id + " joins nodes that do not touch");
    if (it->second != e.shared_pixels) {
      return violation("bad shared count", id + " stores " + std::to_string(e.shared_pixels) +
                                               ", labels give " + std::to_string(it->second));
    }
    const double dc = color_distance(g.nodes[std::size_t(e.src)].color, g.nodes[std::size_t(e.dst)].color);
    if (std::abs(dc - e.color_distance) > 1e-9) {
      return violation("stale color distance", id);
    }
    const double fs = double(e.shared_pixels) / double(g.nodes[std::size_t(e.src)].perimeter);
    const double fd = double(e.shared_pixels) / double(g.nodes[std::size_t(e.dst)].perimeter);
    if (std::abs(fs - e.perimeter_fraction_src) > 1e-12 || std::abs(fd - e.perimeter_fraction_dst) > 1e-12 ||
        fs > 1.0 || fd > 1.0) {
      return violation("bad perimeter fraction", id);
    }
  }
  if (g.edges.size() != shared.size()) {
    return violation("missing edge", std::to_string(shared.size()) + " touching pairs but " +
                                         std::to_string(g.edges.size()) + " edges");
  }
  return std::nullopt;
}

}  // namespace ige
