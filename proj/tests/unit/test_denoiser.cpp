#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "ige/denoiser.hpp"

using namespace ige;

TEST_CASE("tv_loss") {
  CHECK(tv_loss(Image::filled(3, 4, {0.2, 0.7, 0.1}).view()) == 0.0);
  CHECK(tv_loss(Image(2, 1, {0, 0, 0, 1, 1, 1}).view()) == 3.0);
  // One corner lit: two of the four neighbor pairs touch it, three channels each.
  CHECK(tv_loss(Image(2, 2, {1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0}).view()) == 6.0);
}

TEST_CASE("surface_loss") {
  CHECK(surface_loss(Image::filled(4, 4, {0.3, 0.3, 0.3}).view(), 50.0) == 0.0);
  CHECK(surface_loss(Image::filled(4, 4, {0.3, 0.3, 0.3}).view(), 1.0) == 0.0);
  // Single pair with difference norm 1: 2 * (sigmoid(50) - 1/2).
  const double pair = surface_loss(Image(1, 2, {0, 0, 0, 1, 0, 0}).view(), 50.0);
  CHECK(pair == doctest::Approx(2.0 * (1.0 / (1.0 + std::exp(-50.0)) - 0.5)).epsilon(1e-15));
  CHECK(pair == doctest::Approx(1.0));
  // Step-function limit counts changed pairs.
  CHECK(surface_loss(testing::checkerboard(4, 4).view(), 1e6) == doctest::Approx(24.0));
  CHECK_THROWS_AS(surface_loss(Image::filled(1, 1, {0, 0, 0}).view(), 0.0), ParameterError);
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937 rng(404);
  DenoiseParams p;
  for (int trial = 0; trial < 20; ++trial) {
    const Image x = testing::random_image(rng, 5, 5);
    const Image theta = testing::random_image(rng, 5, 5);
    std::vector<double> g(theta.data().size());
    denoise_gradient(theta.view(), x.view(), p, g);
    const auto fd = testing::numeric_gradient(theta, x, p, 1e-6, 1e-4);
    int checked = 0;
    CHECK_MESSAGE(testing::gradient_error(g, fd, &checked) <= 1e-4, "trial " << trial);
    CHECK(checked > 60);
  }
}

TEST_CASE("denoise") {
  std::mt19937 rng(77);

  SUBCASE("zero iterations return the input") {
    DenoiseParams p;
    p.max_iters = 0;
    const Image x = testing::random_image(rng, 6, 6);
    const auto r = denoise(x, p);
    CHECK(r.output == x);
    CHECK(r.state.loss_history.size() == 1);
  }
  SUBCASE("constant images are stationary") {
    const Image x = Image::filled(7, 5, {0.4, 0.1, 0.9});
    for (double lambda : {0.0, 1.0, 100.0}) {
      DenoiseParams p;
      p.lambda = lambda;
      p.max_iters = 25;
      CHECK(denoise(x, p).output == x);
    }
  }
  SUBCASE("large fidelity weight keeps the input") {
    DenoiseParams p;
    p.lambda = 1e6;
    const Image x = testing::random_image(rng, 8, 8);
    const auto r = denoise(x, p);
    for (std::size_t k = 0; k < x.data().size(); ++k) CHECK(std::abs(r.output.data()[k] - x.data()[k]) <= 1e-3);
  }
  SUBCASE("loss history never increases and has one entry per iteration") {
    DenoiseParams p;
    p.max_iters = 60;
    const Image x = testing::random_image(rng, 12, 9);
    const auto r = denoise(x, p);
    REQUIRE(r.state.loss_history.size() == std::size_t(r.state.iteration) + 1);
    CHECK(r.state.iteration == 60);
    for (std::size_t k = 1; k < r.state.loss_history.size(); ++k) {
      CHECK(r.state.loss_history[k] <= r.state.loss_history[k - 1]);
    }
    CHECK(r.state.loss_history.back() < r.state.loss_history.front());
  }
  SUBCASE("every rejected update halves the step") {
    DenoiseParams p;
    p.step_size = 0.05;
    p.max_iters = 40;
    const auto r = denoise(testing::random_image(rng, 6, 6), p);
    CHECK(r.rejected_steps > 0);
    CHECK(r.final_step_size == std::ldexp(p.step_size, -r.rejected_steps));
  }
  SUBCASE("result is independent of the thread count") {
    DenoiseParams p;
    p.max_iters = 20;
    const Image x = testing::random_image(rng, 40, 23);
    const auto base = denoise(x, p, {1});
    const auto other = denoise(x, p, {4});
    CHECK(other.output == base.output);
    CHECK(other.state.loss_history == base.state.loss_history);
  }
}
