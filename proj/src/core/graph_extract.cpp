#include "ige/graph_extract.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "ige/disjoint_set.hpp"
#include "ige/merge_engine.hpp"
#include "ige/parallel.hpp"

namespace ige {

namespace {

bool same_color(std::span<const double> data, std::size_t a, std::size_t b) {
  return data[a * 3] == data[b * 3] && data[a * 3 + 1] == data[b * 3 + 1] &&
         data[a * 3 + 2] == data[b * 3 + 2];
}

std::uint64_t pair_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

struct PairCount {
  std::uint64_t key;
  std::int64_t count;
};

// Sorts keys and collapses duplicates into counts.
std::vector<PairCount> run_length(std::vector<std::uint64_t>& keys) {
  std::sort(keys.begin(), keys.end());
  std::vector<PairCount> out;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    out.push_back({keys[i], std::int64_t(j - i)});
    i = j;
  }
  return out;
}

// Boundary sides of pixel (y, x): neighbors with another label, plus image border.
int boundary_sides(const LabelMatrix& lm, int y, int x) {
  const NodeId l = lm.at(y, x);
  int sides = 0;
  sides += (y == 0 || lm.at(y - 1, x) != l);
  sides += (y + 1 == lm.height || lm.at(y + 1, x) != l);
  sides += (x == 0 || lm.at(y, x - 1) != l);
  sides += (x + 1 == lm.width || lm.at(y, x + 1) != l);
  return sides;
}

void check_labels(const LabelMatrix& labels, std::size_t node_count) {
  if (labels.height < 1 || labels.width < 1 || labels.labels.size() != labels.pixel_count()) {
    throw ParameterError("label matrix shape is inconsistent");
  }
  for (NodeId l : labels.labels) {
    if (l < 0 || std::size_t(l) >= node_count) {
      throw ParameterError("label " + std::to_string(l) + " outside 0.." +
                           std::to_string(node_count) + ")");
    }
  }
}

}  // namespace

LabelMatrix label_components(const Image& x) {
  if (x.empty()) throw ParameterError("cannot label an empty image");
  const int h = x.height();
  const int w = x.width();
  const auto data = x.data();
  DisjointSet sets(x.pixel_count());
  for (int y = 0; y < h; ++y) {
    for (int xx = 0; xx < w; ++xx) {
      const std::size_t i = std::size_t(y) * w + xx;
      if (xx + 1 < w && same_color(data, i, i + 1)) sets.unite(std::uint32_t(i), std::uint32_t(i + 1));
      if (y + 1 < h && same_color(data, i, i + w)) sets.unite(std::uint32_t(i), std::uint32_t(i + w));
    }
  }

  // Canonical numbering: first-seen root in row-major order gets the next id.
  LabelMatrix out{h, w, std::vector<NodeId>(x.pixel_count())};
  std::vector<NodeId> root_label(x.pixel_count(), kNoNode);
  NodeId next = 0;
  for (std::size_t i = 0; i < x.pixel_count(); ++i) {
    const auto root = sets.find(std::uint32_t(i));
    if (root_label[root] == kNoNode) root_label[root] = next++;
    out.labels[i] = root_label[root];
  }
  return out;
}

std::vector<Node> accumulate_nodes(const LabelMatrix& labels, const Image& original,
                                   Parallelism par) {
  if (original.height() != labels.height || original.width() != labels.width) {
    throw ParameterError("label matrix and image shapes differ");
  }
  NodeId max_label = -1;
  for (NodeId l : labels.labels) max_label = std::max(max_label, l);
  const std::size_t p = std::size_t(max_label + 1);
  check_labels(labels, p);

  // Each block emits one record per horizontal run of equal labels, in pixel
  // order; runs are then folded into the nodes in block order.
  struct Run {
    NodeId label;
    std::int64_t count;
    Color sum;
  };
  const std::size_t blocks = detail::block_count(labels.height);
  std::vector<std::vector<Run>> runs(blocks);
  const auto data = original.data();
  detail::parallel_blocks(blocks, par.threads, [&](std::size_t b) {
    const auto [first, last] = detail::block_rows(b, labels.height);
    auto& out = runs[b];
    for (int y = first; y < last; ++y) {
      for (int x = 0; x < labels.width; ++x) {
        const std::size_t i = std::size_t(y) * labels.width + x;
        const NodeId l = labels.labels[i];
        if (out.empty() || out.back().label != l || x == 0) out.push_back({l, 0, {0.0, 0.0, 0.0}});
        auto& run = out.back();
        ++run.count;
        for (int c = 0; c < 3; ++c) run.sum[c] += data[i * 3 + c];
      }
    }
  });

  std::vector<Node> nodes(p);
  for (std::size_t i = 0; i < p; ++i) nodes[i].id = NodeId(i);
  for (const auto& block : runs) {
    for (const auto& run : block) {
      auto& n = nodes[std::size_t(run.label)];
      n.size += run.count;
      for (int c = 0; c < 3; ++c) n.color_sum[c] += run.sum[c];
    }
  }
  const auto perimeters = compute_perimeters(labels, p, par);
  for (std::size_t i = 0; i < p; ++i) {
    auto& n = nodes[i];
    if (n.size == 0) throw ParameterError("label " + std::to_string(i) + " has no pixels");
    for (int c = 0; c < 3; ++c) n.color[c] = n.color_sum[c] / double(n.size);
    n.perimeter = perimeters[i];
  }
  return nodes;
}

std::vector<std::int64_t> compute_perimeters(const LabelMatrix& labels, std::size_t node_count,
                                             Parallelism par) {
  const std::size_t blocks = detail::block_count(labels.height);
  std::vector<std::vector<std::pair<NodeId, std::int64_t>>> partial(blocks);
  detail::parallel_blocks(blocks, par.threads, [&](std::size_t b) {
    const auto [first, last] = detail::block_rows(b, labels.height);
    auto& out = partial[b];
    for (int y = first; y < last; ++y) {
      for (int x = 0; x < labels.width; ++x) {
        const int sides = boundary_sides(labels, y, x);
        if (sides == 0) continue;
        const NodeId l = labels.at(y, x);
        if (!out.empty() && out.back().first == l) {
          out.back().second += sides;
        } else {
          out.emplace_back(l, sides);
        }
      }
    }
  });
  std::vector<std::int64_t> perimeter(node_count, 0);
  for (const auto& block : partial) {
    for (const auto& [l, sides] : block) perimeter[std::size_t(l)] += sides;
  }
  return perimeter;
}

std::vector<Edge> extract_edges(const LabelMatrix& labels, std::span<const Node> nodes,
                                Parallelism par) {
  check_labels(labels, nodes.size());
  const int h = labels.height;
  const int w = labels.width;
  const std::size_t blocks = detail::block_count(h);
  std::vector<std::vector<PairCount>> partial(blocks);
  detail::parallel_blocks(blocks, par.threads, [&](std::size_t b) {
    const auto [first, last] = detail::block_rows(b, h);
    std::vector<std::uint64_t> keys;
    for (int y = first; y < last; ++y) {
      for (int x = 0; x < w; ++x) {
        const NodeId l = labels.at(y, x);
        if (x + 1 < w && labels.at(y, x + 1) != l) keys.push_back(pair_key(l, labels.at(y, x + 1)));
        if (y + 1 < h && labels.at(y + 1, x) != l) keys.push_back(pair_key(l, labels.at(y + 1, x)));
      }
    }
    partial[b] = run_length(keys);
  });

  std::vector<PairCount> all;
  for (const auto& block : partial) all.insert(all.end(), block.begin(), block.end());
  std::sort(all.begin(), all.end(), [](const PairCount& a, const PairCount& b) { return a.key < b.key; });

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < all.size();) {
    Edge e;
    e.src = NodeId(all[i].key >> 32);
    e.dst = NodeId(all[i].key & 0xffffffffu);
    std::size_t j = i;
    while (j < all.size() && all[j].key == all[i].key) e.shared_pixels += all[j++].count;
    i = j;
    const Node& a = nodes[std::size_t(e.src)];
    const Node& b = nodes[std::size_t(e.dst)];
    e.color_distance = color_distance(a.color, b.color);
    e.perimeter_fraction_src = double(e.shared_pixels) / double(a.perimeter);
    e.perimeter_fraction_dst = double(e.shared_pixels) / double(b.perimeter);
    edges.push_back(e);
  }
  return edges;
}

std::vector<Edge> extract_edges(const LabelMatrix& labels, const Image& x, Parallelism par) {
  const auto nodes = accumulate_nodes(labels, x, par);
  return extract_edges(labels, nodes, par);
}

ImageGraph build_graph(LabelMatrix labels, const Image& original, double resolution,
                       Parallelism par) {
  ImageGraph g;
  g.nodes = accumulate_nodes(labels, original, par);
  g.edges = extract_edges(labels, g.nodes, par);
  g.resolution = resolution;
  g.labels = std::move(labels);
  return g;
}

ImageGraph img2graph(const Image& x, Parallelism par) {
  if (x.empty()) throw ParameterError("cannot extract a graph from an empty image");
  return build_graph(label_components(x), x, 1.0, par);
}

}  // namespace ige
