#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ige/types.hpp"

namespace ige::testing {

inline Image checkerboard(int h, int w, const Color& a = {0, 0, 0}, const Color& b = {1, 1, 1}) {
  std::vector<double> data;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Color& c = ((x + y) % 2 == 0) ? a : b;
      data.insert(data.end(), c.begin(), c.end());
    }
  }
  return Image(h, w, std::move(data));
}

/// Vertical stripes of `stripe` columns alternating between two colors.
inline Image stripes(int h, int w, int stripe, const Color& a, const Color& b) {
  std::vector<double> data;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Color& c = ((x / stripe) % 2 == 0) ? a : b;
      data.insert(data.end(), c.begin(), c.end());
    }
  }
  return Image(h, w, std::move(data));
}

/// Image whose pixels are drawn from a palette of `colors` entries with
/// channels on the k/16 grid, so pixel sums are exact in double precision.
inline Image random_palette_image(std::mt19937& rng, int h, int w, int colors) {
  std::uniform_int_distribution<int> level(0, 16);
  std::vector<Color> palette(static_cast<std::size_t>(colors));
  for (auto& c : palette) c = {level(rng) / 16.0, level(rng) / 16.0, level(rng) / 16.0};
  std::uniform_int_distribution<int> pick(0, colors - 1);
  // Blobby layout: copy a neighbor most of the time so components grow.
  std::bernoulli_distribution copy(0.5);
  std::vector<int> idx(std::size_t(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int v = pick(rng);
      if (copy(rng)) {
        if (x > 0 && (y == 0 || copy(rng))) {
          v = idx[std::size_t(y) * w + x - 1];
        } else if (y > 0) {
          v = idx[std::size_t(y - 1) * w + x];
        }
      }
      idx[std::size_t(y) * w + x] = v;
    }
  }
  std::vector<double> data;
  for (int i : idx) data.insert(data.end(), palette[std::size_t(i)].begin(), palette[std::size_t(i)].end());
  return Image(h, w, std::move(data));
}

/// Uniform noise in [lo, hi].
inline Image random_image(std::mt19937& rng, int h, int w, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> data(std::size_t(h) * w * 3);
  for (auto& v : data) v = u(rng);
  return Image(h, w, std::move(data));
}

/// Smooth gradients plus mild noise and a few flat blocks; filtering it yields
/// a handful of merge steps with non-trivial contractions.
inline Image textured_image(std::mt19937& rng, int h, int w) {
  std::uniform_real_distribution<double> noise(-0.03, 0.03);
  std::vector<double> data;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool block = (x / 8 + y / 8) % 3 == 0;
      Color c = block ? Color{0.8, 0.2, 0.1}
                      : Color{0.2 + 0.5 * x / double(w), 0.3 + 0.4 * y / double(h), 0.5};
      for (auto& v : c) v = std::clamp(v + noise(rng), 0.0, 1.0);
      data.insert(data.end(), c.begin(), c.end());
    }
  }
  return Image(h, w, std::move(data));
}

inline std::filesystem::path photo_dir() { return std::filesystem::path(IGE_TEST_DATA_DIR) / "photos"; }

inline std::vector<std::filesystem::path> photos() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(photo_dir())) {
    if (e.path().extension() == ".png") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ige_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ige::testing
