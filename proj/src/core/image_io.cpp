#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "ige/io.hpp"

namespace ige {

namespace fs = std::filesystem;

Image graph2img(const ImageGraph& g) {
  const LabelMatrix& lm = g.labels;
  std::vector<double> data(lm.pixel_count() * kChannels);
  for (std::size_t i = 0; i < lm.pixel_count(); ++i) {
    const Color& c = g.nodes.at(std::size_t(lm.labels[i])).color;
    std::copy(c.begin(), c.end(), data.begin() + std::ptrdiff_t(i * kChannels));
  }
  return Image(lm.height, lm.width, std::move(data));
}

std::uint8_t quantize(double v) {
  const double scaled = std::floor(v * 255.0 + 0.5);
  return std::uint8_t(std::clamp(scaled, 0.0, 255.0));
}

Image from_bytes(int height, int width, std::span<const std::uint8_t> rgb) {
  std::vector<double> data(rgb.size());
  std::transform(rgb.begin(), rgb.end(), data.begin(), [](std::uint8_t b) { return b / 255.0; });
  return Image(height, width, std::move(data));
}

std::vector<std::uint8_t> to_bytes(const Image& x) {
  std::vector<std::uint8_t> out(x.data().size());
  std::transform(x.data().begin(), x.data().end(), out.begin(), quantize);
  return out;
}

namespace {

std::vector<std::uint8_t> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path.string());
  return bytes;
}

void dump(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

bool is_png(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kMagic, 8) == 0;
}

bool is_ppm(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6';
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& x) {
  const auto pixels = to_bytes(x);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = png_uint_32(x.width());
  image.height = png_uint_32(x.height());
  image.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw FormatError(std::string("png encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw FormatError(std::string("png encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(std::string("png decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw FormatError("png decode failed: " + message);
  }
  return from_bytes(int(image.height), int(image.width), pixels);
}

std::vector<std::uint8_t> encode_ppm(const Image& x) {
  const std::string header = "P6\n" + std::to_string(x.width()) + " " + std::to_string(x.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto pixels = to_bytes(x);
  out.insert(out.end(), pixels.begin(), pixels.end());
  return out;
}

Image decode_ppm(std::span<const std::uint8_t> bytes) {
  if (!is_ppm(bytes)) throw FormatError("not a binary PPM (P6) file");
  std::size_t pos = 2;
  const auto next_int = [&]() -> long {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw FormatError("truncated PPM header");
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > (1L << 24)) throw FormatError("PPM header value too large");
    }
    return v;
  };
  const long width = next_int();
  const long height = next_int();
  const long maxval = next_int();
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError("truncated PPM header");
  ++pos;
  if (width < 1 || height < 1) throw FormatError("PPM has empty dimensions");
  if (maxval != 255) throw FormatError("only 8-bit PPM (maxval 255) is supported");
  const std::size_t need = std::size_t(width) * std::size_t(height) * 3;
  if (bytes.size() - pos < need) throw FormatError("truncated PPM pixel data");
  return from_bytes(int(height), int(width), bytes.subspan(pos, need));
}

Image read_image(const fs::path& path) {
  const auto bytes = slurp(path);
  try {
    if (is_png(bytes)) return decode_png(bytes);
    if (is_ppm(bytes)) return decode_ppm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  throw FormatError(path.string() + ": unsupported image format");
}

void write_image(const Image& x, const fs::path& path, ImageFormat format) {
  dump(path, format == ImageFormat::Png ? encode_png(x) : encode_ppm(x));
}

void write_image(const Image& x, const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  if (ext == ".png") return write_image(x, path, ImageFormat::Png);
  if (ext == ".ppm") return write_image(x, path, ImageFormat::Ppm);
  throw FormatError(path.string() + ": unsupported output extension '" + ext + "'");
}

}  // namespace ige
