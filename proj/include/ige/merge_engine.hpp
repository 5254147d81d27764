#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ige/types.hpp"

namespace ige {

/// Euclidean distance between two RGB triples.
double color_distance(const Color& p, const Color& q);

/// Size/resolution adjustment
///   (1 + exp(-alpha * (min(s_i, s_j) - beta / r)))^(-1/r),
/// which lies in ]0, 1] and tends to 1 for large patches.
double size_adjustment(std::int64_t s_i, std::int64_t s_j, double r, double alpha, double beta);

/// Color distance scaled by size_adjustment.
double adjusted_distance(const Color& c_i, const Color& c_j, std::int64_t s_i, std::int64_t s_j,
                         double r, const FilterParams& params);

/// Merging threshold tau(d0, r). T1: d0 / r. T2: d0 * (1 - (r - r_m)) / r_m.
/// Throws ParameterError for r outside ]0,1], or r < r_m under T2.
double merge_threshold(double d0, double r, ThresholdForm form, double r_m);

inline double merge_threshold(double r, const FilterParams& p) {
  return merge_threshold(p.d0, r, p.threshold, p.r_m);
}

/// For every node, the neighbor with the smallest adjusted distance among
/// those strictly below the threshold (ties go to the smaller id), or kNoNode.
std::vector<NodeId> select_candidates(const ImageGraph& g, double r, const FilterParams& params,
                                      Parallelism par = {});

struct MergeStepReport {
  double resolution_before = 1.0;
  double resolution_after = 1.0;
  std::size_t merges_performed = 0;  // nodes absorbed during the step
  std::size_t node_count_after = 0;
  double threshold_value = 0.0;
};

/// Contracts the candidate forest at resolution r, then rebuilds node
/// statistics from exact color sums and the edge set from the new labels.
std::pair<ImageGraph, MergeStepReport> merge_step(const ImageGraph& g, double r,
                                                  const FilterParams& params, Parallelism par = {});

/// Contracts an explicit candidate map (as returned by select_candidates).
ImageGraph contract(const ImageGraph& g, std::span<const NodeId> candidates, double r,
                    Parallelism par = {});

/// Resolutions at which merge steps run: 1 - k*dr for k = 1..ceil((1-r*)/dr),
/// with the last one clamped to r*.
std::vector<double> resolution_schedule(const FilterParams& params);

struct FilterResult {
  Image filtered;
  ImageGraph graph;
  std::vector<MergeStepReport> steps;
};

/// Called after every merge step with the graph at the step's resolution.
using StepObserver = std::function<void(const ImageGraph&, const MergeStepReport&)>;

/// Full iterative filter: img2graph, merge steps down to r*, graph2img.
FilterResult filter(const Image& x, const FilterParams& params, Parallelism par = {},
                    const StepObserver& observer = {});

}  // namespace ige
