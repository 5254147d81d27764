#include "ige/merge_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ige/disjoint_set.hpp"
#include "ige/graph_extract.hpp"
#include "ige/io.hpp"
#include "ige/parallel.hpp"

namespace ige {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

constexpr std::size_t kEdgeChunk = 4096;
constexpr std::size_t kPixelChunk = 1 << 14;

}  // namespace

double color_distance(const Color& p, const Color& q) {
  const double dr = p[0] - q[0];
  const double dg = p[1] - q[1];
  const double db = p[2] - q[2];
  return std::sqrt(dr * dr + dg * dg + db * db);
}

double size_adjustment(std::int64_t s_i, std::int64_t s_j, double r, double alpha, double beta) {
  const double s_min = double(std::min(s_i, s_j));
  const double z = -alpha * (s_min - beta / r);
  return std::exp(-softplus(z) / r);
}

double adjusted_distance(const Color& c_i, const Color& c_j, std::int64_t s_i, std::int64_t s_j,
                         double r, const FilterParams& params) {
  return color_distance(c_i, c_j) * size_adjustment(s_i, s_j, r, params.alpha, params.beta);
}

double merge_threshold(double d0, double r, ThresholdForm form, double r_m) {
  if (!(r > 0.0 && r <= 1.0)) {
    throw ParameterError("resolution " + std::to_string(r) + " outside ]0,1]");
  }
  switch (form) {
    case ThresholdForm::T1:
      return d0 / r;
    case ThresholdForm::T2:
      if (r < r_m) {
        throw ParameterError("threshold T2 is undefined below r_m=" + std::to_string(r_m) +
                             " (r=" + std::to_string(r) + ")");
      }
      // Grouped so that r = 1 gives exactly d0.
      return d0 * (((1.0 - r) + r_m) / r_m);
  }
  throw ParameterError("unknown threshold form");
}

std::vector<NodeId> select_candidates(const ImageGraph& g, double r, const FilterParams& params,
                                      Parallelism par) {
  const double tau = merge_threshold(r, params);
  std::vector<double> da(g.edges.size());
  detail::parallel_ranges(g.edges.size(), kEdgeChunk, par.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const Edge& e = g.edges[k];
      const Node& a = g.nodes[std::size_t(e.src)];
      const Node& b = g.nodes[std::size_t(e.dst)];
      da[k] = e.color_distance * size_adjustment(a.size, b.size, r, params.alpha, params.beta);
    }
  });

  std::vector<NodeId> chosen(g.nodes.size(), kNoNode);
  std::vector<double> best(g.nodes.size(), 0.0);
  const auto offer = [&](NodeId node, NodeId other, double d) {
    auto& c = chosen[std::size_t(node)];
    auto& b = best[std::size_t(node)];
    if (c == kNoNode || d < b || (d == b && other < c)) {
      c = other;
      b = d;
    }
  };
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    if (!(da[k] < tau)) continue;
    offer(g.edges[k].src, g.edges[k].dst, da[k]);
    offer(g.edges[k].dst, g.edges[k].src, da[k]);
  }
  return chosen;
}

ImageGraph contract(const ImageGraph& g, std::span<const NodeId> candidates, double r,
                    Parallelism par) {
  const std::size_t p = g.nodes.size();
  if (candidates.size() != p) throw ParameterError("candidate map does not cover every node");
  DisjointSet sets(p);
  for (std::size_t i = 0; i < p; ++i) {
    if (candidates[i] != kNoNode) sets.unite(std::uint32_t(i), std::uint32_t(candidates[i]));
  }

  // New ids follow the smallest old id of each group, which keeps the
  // row-major first-pixel numbering.
  std::vector<NodeId> new_id(p);
  std::vector<NodeId> root_id(p, kNoNode);
  NodeId next = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const auto root = sets.find(std::uint32_t(i));
    if (root_id[root] == kNoNode) root_id[root] = next++;
    new_id[i] = root_id[root];
  }

  ImageGraph out;
  out.resolution = r;
  out.nodes.resize(std::size_t(next));
  for (std::size_t i = 0; i < out.nodes.size(); ++i) out.nodes[i].id = NodeId(i);
  for (std::size_t i = 0; i < p; ++i) {
    Node& n = out.nodes[std::size_t(new_id[i])];
    n.size += g.nodes[i].size;
    for (int c = 0; c < 3; ++c) n.color_sum[c] += g.nodes[i].color_sum[c];
  }
  for (Node& n : out.nodes) {
    for (int c = 0; c < 3; ++c) n.color[c] = n.color_sum[c] / double(n.size);
  }

  out.labels = LabelMatrix{g.labels.height, g.labels.width, std::vector<NodeId>(g.labels.labels.size())};
  detail::parallel_ranges(out.labels.labels.size(), kPixelChunk, par.threads,
                          [&](std::size_t lo, std::size_t hi) {
                            for (std::size_t i = lo; i < hi; ++i) {
                              out.labels.labels[i] = new_id[std::size_t(g.labels.labels[i])];
                            }
                          });

  const auto perimeters = compute_perimeters(out.labels, out.nodes.size(), par);
  for (std::size_t i = 0; i < out.nodes.size(); ++i) out.nodes[i].perimeter = perimeters[i];
  out.edges = extract_edges(out.labels, out.nodes, par);
  return out;
}

std::pair<ImageGraph, MergeStepReport> merge_step(const ImageGraph& g, double r,
                                                  const FilterParams& params, Parallelism par) {
  MergeStepReport report;
  report.resolution_before = g.resolution;
  report.resolution_after = r;
  report.threshold_value = merge_threshold(r, params);

  const auto candidates = select_candidates(g, r, params, par);
  const bool any = std::any_of(candidates.begin(), candidates.end(), [](NodeId c) { return c != kNoNode; });
  if (!any) {
    ImageGraph same = g;
    same.resolution = r;
    report.node_count_after = same.nodes.size();
    return {std::move(same), report};
  }
  ImageGraph next = contract(g, candidates, r, par);
  report.merges_performed = g.nodes.size() - next.nodes.size();
  report.node_count_after = next.nodes.size();
  return {std::move(next), report};
}

std::vector<double> resolution_schedule(const FilterParams& params) {
  params.validate();
  const double steps = (1.0 - params.target_resolution) / params.step;
  const auto n = std::size_t(std::max(1.0, std::ceil(steps - 1e-9)));
  std::vector<double> schedule;
  schedule.reserve(n);
  for (std::size_t k = 1; k < n; ++k) {
    schedule.push_back(std::max(1.0 - double(k) * params.step, params.target_resolution));
  }
  schedule.push_back(params.target_resolution);
  return schedule;
}

FilterResult filter(const Image& x, const FilterParams& params, Parallelism par,
                    const StepObserver& observer) {
  const auto schedule = resolution_schedule(params);
  FilterResult result;
  result.graph = img2graph(x, par);
  for (const double r : schedule) {
    auto [next, report] = merge_step(result.graph, r, params, par);
    result.graph = std::move(next);
    if (observer) observer(result.graph, report);
    result.steps.push_back(report);
  }
  result.filtered = graph2img(result.graph);
  return result;
}

}  // namespace ige
