#include "ige/types.hpp"

#include <cmath>
#include <string>

namespace ige {

Image::Image(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height < 1 || width < 1) {
    throw ParameterError("image must be at least 1x1, got " + std::to_string(height) + "x" +
                         std::to_string(width));
  }
  if (data_.size() != std::size_t(height) * std::size_t(width) * kChannels) {
    throw ParameterError("image data length " + std::to_string(data_.size()) + " does not match " +
                         std::to_string(height) + "x" + std::to_string(width) + "x3");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double v = data_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ParameterError("image value " + std::to_string(v) + " at index " + std::to_string(i) +
                           " outside [0,1]");
    }
  }
}

Image Image::filled(int height, int width, const Color& color) {
  std::vector<double> data;
  if (height > 0 && width > 0) {
    data.reserve(std::size_t(height) * std::size_t(width) * kChannels);
    for (std::size_t i = 0; i < std::size_t(height) * std::size_t(width); ++i) {
      data.insert(data.end(), color.begin(), color.end());
    }
  }
  return Image(height, width, std::move(data));
}

Color Image::pixel(int y, int x) const { return pixel(index(y, x)); }

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

}  // namespace

void FilterParams::validate() const {
  require(target_resolution > 0.0 && target_resolution < 1.0,
          "target resolution must lie in ]0,1[, got " + std::to_string(target_resolution));
  require(step > 0.0 && step < 1.0, "resolution step must lie in ]0,1[, got " + std::to_string(step));
  // Small slack so that e.g. r*=0.9, dr=0.1 is not rejected by rounding in 1-0.9.
  require(step <= 1.0 - target_resolution + 1e-12,
          "resolution step " + std::to_string(step) + " exceeds 1 - target resolution");
  require(d0 > 0.0 && std::isfinite(d0), "d0 must be positive");
  require(alpha > 0.0 && std::isfinite(alpha), "alpha must be positive");
  require(beta >= 0.0 && std::isfinite(beta), "beta must be non-negative");
  if (threshold == ThresholdForm::T2) {
    require(r_m > 0.0 && r_m < 1.0, "r_m must lie in ]0,1[, got " + std::to_string(r_m));
    require(target_resolution >= r_m,
            "threshold T2 needs target resolution >= r_m (" + std::to_string(r_m) + "), got " +
                std::to_string(target_resolution));
  }
}

void DenoiseParams::validate() const {
  require(lambda >= 0.0 && std::isfinite(lambda), "lambda must be non-negative");
  require(sigmoid_alpha > 0.0 && std::isfinite(sigmoid_alpha), "sigmoid alpha must be positive");
  require(step_size > 0.0 && std::isfinite(step_size), "step size must be positive");
  require(max_iters >= 0, "iteration budget must be non-negative");
  require(tv_weight >= 0.0 && surf_weight >= 0.0, "loss weights must be non-negative");
}

}  // namespace ige
