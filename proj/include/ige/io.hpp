#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ige/types.hpp"

namespace ige {

/// Paints every pixel with the mean color of its node.
Image graph2img(const ImageGraph& g);

// ---------------------------------------------------------------------------
// Images: 8-bit RGB PNG and binary PPM (P6). Channel values map to bytes by
// round-half-up of v*255 and back by v/255.
// ---------------------------------------------------------------------------

enum class ImageFormat { Png, Ppm };

std::uint8_t quantize(double v);
Image from_bytes(int height, int width, std::span<const std::uint8_t> rgb);
std::vector<std::uint8_t> to_bytes(const Image& x);

/// Detects the format from the file's magic bytes.
Image read_image(const std::filesystem::path& path);
/// Picks the format from the extension (.png, .ppm); anything else is rejected.
void write_image(const Image& x, const std::filesystem::path& path);
void write_image(const Image& x, const std::filesystem::path& path, ImageFormat format);

std::vector<std::uint8_t> encode_png(const Image& x);
Image decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_ppm(const Image& x);
Image decode_ppm(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Graph export
// ---------------------------------------------------------------------------

inline constexpr const char* kGraphCsvHeader =
    "src,dst,color_distance,shared_pixels,perim_frac_src,perim_frac_dst,src_size,dst_size,"
    "src_r,src_g,src_b,dst_r,dst_g,dst_b";

struct GraphCsvRow {
  NodeId src = 0;
  NodeId dst = 0;
  double color_distance = 0.0;
  std::int64_t shared_pixels = 0;
  double perimeter_fraction_src = 0.0;
  double perimeter_fraction_dst = 0.0;
  std::int64_t src_size = 0;
  std::int64_t dst_size = 0;
  Color src_color{};
  Color dst_color{};

  friend bool operator==(const GraphCsvRow&, const GraphCsvRow&) = default;
};

/// One row per edge in (src, dst) order; reals printed with 6 decimals.
std::vector<GraphCsvRow> graph_rows(const ImageGraph& g);
void write_graph_csv(const ImageGraph& g, std::ostream& out);
void write_graph_csv(const ImageGraph& g, const std::filesystem::path& path);
std::vector<GraphCsvRow> read_graph_csv(std::istream& in);
std::vector<GraphCsvRow> read_graph_csv(const std::filesystem::path& path);

/// Pen width of an edge in DOT output: proportional to the larger perimeter fraction.
double dot_pen_width(const Edge& e);
void write_graph_dot(const ImageGraph& g, std::ostream& out);
void write_graph_dot(const ImageGraph& g, const std::filesystem::path& path);

/// Label matrix as H lines of W space-separated ids.
void write_labels(const LabelMatrix& labels, std::ostream& out);
void write_labels(const LabelMatrix& labels, const std::filesystem::path& path);

}  // namespace ige
