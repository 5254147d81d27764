#pragma once

#include <cmath>
#include <vector>

#include "ige/denoiser.hpp"

namespace ige::testing {

/// Central-difference gradient of the denoising objective. Coordinates within
/// `guard` of a TV kink (equal neighbor channel values) come back as NaN.
inline std::vector<double> numeric_gradient(const Image& theta, const Image& x, const DenoiseParams& p, double h,
                                            double guard) {
  std::vector<double> v(theta.data().begin(), theta.data().end());
  std::vector<double> g(v.size());
  const int w = theta.width(), hgt = theta.height();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t pix = k / 3;
    const int c = int(k % 3);
    const int y = int(pix / std::size_t(w)), xx = int(pix % std::size_t(w));
    bool near_kink = false;
    const int dy[4] = {-1, 1, 0, 0}, dx[4] = {0, 0, -1, 1};
    for (int n = 0; n < 4; ++n) {
      const int yy = y + dy[n], xn = xx + dx[n];
      if (yy < 0 || xn < 0 || yy >= hgt || xn >= w) continue;
      near_kink |= std::abs(theta.at(y, xx, c) - theta.at(yy, xn, c)) < guard;
    }
    if (near_kink) {
      g[k] = std::nan("");
      continue;
    }
    const double saved = v[k];
    v[k] = saved + h;
    const double up = denoise_objective({hgt, w, v}, x.view(), p);
    v[k] = saved - h;
    const double down = denoise_objective({hgt, w, v}, x.view(), p);
    v[k] = saved;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

/// Largest relative error max|a - n| / max(|n|, 1) over the checked components.
inline double gradient_error(const std::vector<double>& analytic, const std::vector<double>& numeric,
                             int* checked = nullptr) {
  double worst = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    if (std::isnan(numeric[k])) continue;
    ++n;
    worst = std::max(worst, std::abs(analytic[k] - numeric[k]) / std::max(std::abs(numeric[k]), 1.0));
  }
  if (checked) *checked = n;
  return worst;
}

}  // namespace ige::testing
