#pragma once

#include <span>
#include <vector>

#include "ige/types.hpp"

namespace ige {

/// Labels maximal 4-connected components of exactly-equal color. Labels are
/// numbered 0..p-1 in row-major order of each component's first pixel.
LabelMatrix label_components(const Image& x);

/// Size, color sum, mean color and perimeter of every label in `labels`.
/// Sums are reduced in a fixed block order, so the result does not depend on
/// the thread count.
std::vector<Node> accumulate_nodes(const LabelMatrix& labels, const Image& original,
                                   Parallelism par = {});

/// Pixel sides of each label that face another label or the image border.
std::vector<std::int64_t> compute_perimeters(const LabelMatrix& labels, std::size_t node_count,
                                             Parallelism par = {});

/// One canonical (src < dst) edge per touching label pair, sorted by
/// (src, dst), with color distance and perimeter fractions taken from `nodes`.
std::vector<Edge> extract_edges(const LabelMatrix& labels, std::span<const Node> nodes,
                                Parallelism par = {});

/// Convenience overload that derives node statistics from the image first.
std::vector<Edge> extract_edges(const LabelMatrix& labels, const Image& x, Parallelism par = {});

/// Builds the full graph over an existing compact labeling.
ImageGraph build_graph(LabelMatrix labels, const Image& original, double resolution,
                       Parallelism par = {});

/// Initial image-graph at resolution 1.
ImageGraph img2graph(const Image& x, Parallelism par = {});

}  // namespace ige
