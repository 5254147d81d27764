#include "ige/denoiser.hpp"

#include <algorithm>
#include <cmath>

#include "ige/parallel.hpp"

namespace ige {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct PairTerms {
  double tv = 0.0;
  double surf = 0.0;
};

// TV and surface terms of one neighbor pair.
PairTerms pair_terms(const ImageView& t, std::size_t i, std::size_t j, double sigmoid_alpha) {
  PairTerms out;
  double sq = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double d = t.values[i * 3 + c] - t.values[j * 3 + c];
    out.tv += std::abs(d);
    sq += d * d;
  }
  out.surf = 2.0 * (sigmoid(sigmoid_alpha * std::sqrt(sq)) - 0.5);
  return out;
}

// Sums the pair terms owned by each row block (right and down neighbors), in block order.
PairTerms sum_pairs(const ImageView& t, double sigmoid_alpha, Parallelism par) {
  const std::size_t blocks = detail::block_count(t.height);
  std::vector<PairTerms> partial(blocks);
  detail::parallel_blocks(blocks, par.threads, [&](std::size_t b) {
    const auto [first, last] = detail::block_rows(b, t.height);
    PairTerms acc;
    for (int y = first; y < last; ++y) {
      for (int x = 0; x < t.width; ++x) {
        const std::size_t i = std::size_t(y) * t.width + x;
        if (x + 1 < t.width) {
          const auto p = pair_terms(t, i, i + 1, sigmoid_alpha);
          acc.tv += p.tv;
          acc.surf += p.surf;
        }
        if (y + 1 < t.height) {
          const auto p = pair_terms(t, i, i + std::size_t(t.width), sigmoid_alpha);
          acc.tv += p.tv;
          acc.surf += p.surf;
        }
      }
    }
    partial[b] = acc;
  });
  PairTerms total;
  for (const auto& p : partial) {
    total.tv += p.tv;
    total.surf += p.surf;
  }
  return total;
}

double fidelity(const ImageView& theta, const ImageView& x, Parallelism par) {
  const std::size_t blocks = detail::block_count(theta.height);
  std::vector<double> partial(blocks, 0.0);
  detail::parallel_blocks(blocks, par.threads, [&](std::size_t b) {
    const auto [first, last] = detail::block_rows(b, theta.height);
    double acc = 0.0;
    for (std::size_t k = std::size_t(first) * theta.width * 3; k < std::size_t(last) * theta.width * 3; ++k) {
      const double d = x.values[k] - theta.values[k];
      acc += d * d;
    }
    partial[b] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void check_shapes(const ImageView& theta, const ImageView& x) {
  if (theta.height != x.height || theta.width != x.width || theta.values.size() != x.values.size() ||
      theta.values.size() != theta.pixel_count() * 3) {
    throw ParameterError("denoiser operands have mismatched shapes");
  }
}

}  // namespace

double tv_loss(const ImageView& theta, Parallelism par) { return sum_pairs(theta, 1.0, par).tv; }

double surface_loss(const ImageView& theta, double sigmoid_alpha, Parallelism par) {
  if (!(sigmoid_alpha > 0.0)) throw ParameterError("sigmoid alpha must be positive");
  return sum_pairs(theta, sigmoid_alpha, par).surf;
}

double denoise_objective(const ImageView& theta, const ImageView& x, const DenoiseParams& params,
                         Parallelism par) {
  check_shapes(theta, x);
  const auto pairs = sum_pairs(theta, params.sigmoid_alpha, par);
  return params.tv_weight * pairs.tv + params.surf_weight * pairs.surf + params.lambda * fidelity(theta, x, par);
}

double denoise_gradient(const ImageView& theta, const ImageView& x, const DenoiseParams& params,
                        std::span<double> grad, Parallelism par) {
  check_shapes(theta, x);
  if (grad.size() != theta.values.size()) throw ParameterError("gradient buffer has the wrong length");
  const int h = theta.height;
  const int w = theta.width;
  const double a = params.sigmoid_alpha;
  // Gather form: each pixel sums the contributions of its own neighbor pairs,
  // so blocks never write outside their rows.
  detail::parallel_blocks(detail::block_count(h), par.threads, [&](std::size_t b) {
    const auto [first, last] = detail::block_rows(b, h);
    for (int y = first; y < last; ++y) {
      for (int xx = 0; xx < w; ++xx) {
        const std::size_t i = std::size_t(y) * w + xx;
        double g[3];
        for (int c = 0; c < 3; ++c) g[c] = 2.0 * params.lambda * (theta.values[i * 3 + c] - x.values[i * 3 + c]);
        const auto neighbor = [&](int yy, int xn) {
          if (yy < 0 || xn < 0 || yy >= h || xn >= w) return;
          const std::size_t j = std::size_t(yy) * w + xn;
          double diff[3];
          double sq = 0.0;
          for (int c = 0; c < 3; ++c) {
            diff[c] = theta.values[i * 3 + c] - theta.values[j * 3 + c];
            sq += diff[c] * diff[c];
          }
          const double norm = std::sqrt(sq);
          double surf_scale = 0.0;
          if (norm > 0.0) {
            const double s = sigmoid(a * norm);
            surf_scale = params.surf_weight * 2.0 * a * s * (1.0 - s) / norm;
          }
          for (int c = 0; c < 3; ++c) g[c] += params.tv_weight * sign(diff[c]) + surf_scale * diff[c];
        };
        neighbor(y - 1, xx);
        neighbor(y + 1, xx);
        neighbor(y, xx - 1);
        neighbor(y, xx + 1);
        for (int c = 0; c < 3; ++c) grad[i * 3 + c] = g[c];
      }
    }
  });
  return denoise_objective(theta, x, params, par);
}

DenoiseResult denoise(const Image& x, const DenoiseParams& params, Parallelism par) {
  params.validate();
  const ImageView xv = x.view();
  DenoiseResult result;
  DenoiseState& st = result.state;
  st.theta.assign(x.data().begin(), x.data().end());
  const auto view_of = [&](const std::vector<double>& v) { return ImageView{x.height(), x.width(), v}; };

  std::vector<double> grad(st.theta.size());
  std::vector<double> trial(st.theta.size());
  double step = params.step_size;
  double loss = denoise_gradient(view_of(st.theta), xv, params, grad, par);
  st.loss_history.push_back(loss);
  for (int it = 0; it < params.max_iters; ++it) {
    for (std::size_t k = 0; k < trial.size(); ++k) trial[k] = st.theta[k] - step * grad[k];
    const double trial_loss = denoise_objective(view_of(trial), xv, params, par);
    if (trial_loss <= loss) {
      std::swap(st.theta, trial);
      loss = denoise_gradient(view_of(st.theta), xv, params, grad, par);
    } else {
      ++result.rejected_steps;
      step *= 0.5;
    }
    ++st.iteration;
    st.loss_history.push_back(loss);
  }
  result.final_step_size = step;

  std::vector<double> out(st.theta.size());
  std::transform(st.theta.begin(), st.theta.end(), out.begin(), [](double v) { return std::clamp(v, 0.0, 1.0); });
  result.output = Image(x.height(), x.width(), std::move(out));
  return result;
}

}  // namespace ige
