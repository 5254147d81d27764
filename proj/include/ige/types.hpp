#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ige {

using NodeId = std::int32_t;
using Color = std::array<double, 3>;

inline constexpr int kChannels = 3;
inline constexpr NodeId kNoNode = -1;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter bundle or argument is outside its valid domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File contents are malformed or in an unsupported format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Image
// ---------------------------------------------------------------------------

/// Read-only view over an interleaved H x W x 3 buffer. Values are not
/// range-checked, so the denoiser can use it for unconstrained iterates.
struct ImageView {
  int height = 0;
  int width = 0;
  std::span<const double> values;

  std::size_t pixel_count() const { return std::size_t(height) * std::size_t(width); }
  double at(int y, int x, int c) const {
    return values[(std::size_t(y) * std::size_t(width) + std::size_t(x)) * kChannels + std::size_t(c)];
  }
};

/// Dense RGB image with every channel value in [0, 1], interleaved row-major.
class Image {
 public:
  Image() = default;
  /// Throws ParameterError on empty shape, wrong data length or out-of-range values.
  Image(int height, int width, std::vector<double> data);
  /// Image filled with one color.
  static Image filled(int height, int width, const Color& color);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return std::size_t(height_) * std::size_t(width_); }
  bool empty() const { return data_.empty(); }

  double at(int y, int x, int c) const { return data_[index(y, x) * kChannels + std::size_t(c)]; }
  Color pixel(int y, int x) const;
  Color pixel(std::size_t flat) const {
    return {data_[flat * 3], data_[flat * 3 + 1], data_[flat * 3 + 2]};
  }

  std::span<const double> data() const { return data_; }
  ImageView view() const { return {height_, width_, data_}; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int y, int x) const { return std::size_t(y) * std::size_t(width_) + std::size_t(x); }

  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Partition
// ---------------------------------------------------------------------------

/// Per-pixel node identifiers, row-major.
struct LabelMatrix {
  int height = 0;
  int width = 0;
  std::vector<NodeId> labels;

  std::size_t pixel_count() const { return std::size_t(height) * std::size_t(width); }
  NodeId at(int y, int x) const { return labels[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }

  friend bool operator==(const LabelMatrix&, const LabelMatrix&) = default;
};

struct Node {
  NodeId id = 0;
  std::int64_t size = 0;
  /// Per-channel sum of the original image over member pixels.
  Color color_sum{};
  /// color_sum / size
  Color color{};
  /// Pixel sides facing another node or the image border.
  std::int64_t perimeter = 0;

  friend bool operator==(const Node&, const Node&) = default;
};

/// Undirected adjacency between two touching nodes, stored with src < dst.
struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  /// Number of 4-adjacent pixel pairs straddling the two nodes.
  std::int64_t shared_pixels = 0;
  double color_distance = 0.0;
  double perimeter_fraction_src = 0.0;
  double perimeter_fraction_dst = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Region adjacency graph at a given resolution. Node ids equal their index
/// in `nodes`; edges are sorted by (src, dst).
struct ImageGraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  double resolution = 1.0;
  LabelMatrix labels;

  int height() const { return labels.height; }
  int width() const { return labels.width; }

  friend bool operator==(const ImageGraph&, const ImageGraph&) = default;
};

/// Effective number of pixels: the node count of the graph.
inline std::size_t node_count(const ImageGraph& g) { return g.nodes.size(); }

struct Violation {
  std::string kind;     // e.g. "dangling edge", "partition broken"
  std::string message;  // location details
};

/// Checks every ImageGraph invariant and returns the first violation found.
std::optional<Violation> validate(const ImageGraph& g);

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

enum class ThresholdForm { T1, T2 };

struct FilterParams {
  double target_resolution = 0.6;
  double step = 0.1;
  double d0 = 0.03;
  double alpha = 0.04;
  double beta = 10.0;
  ThresholdForm threshold = ThresholdForm::T2;
  double r_m = 0.1;

  /// Throws ParameterError when any field is outside its domain.
  void validate() const;
};

struct DenoiseParams {
  double lambda = 1.0;
  double sigmoid_alpha = 50.0;
  double step_size = 0.01;
  int max_iters = 200;
  double tv_weight = 1.0;
  double surf_weight = 1.0;

  void validate() const;
};

/// Worker-thread budget for the data-parallel phases. Results never depend on it.
struct Parallelism {
  int threads = 1;
};

}  // namespace ige
