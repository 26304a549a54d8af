#include <doctest.h>

#include <cmath>
#include <random>

#include "capsym/gauge.hpp"
#include "capsym/harmonic.hpp"

using namespace capsym;

TEST_CASE("gauge values on simple covectors") {
  CHECK(eval_gauge(GaugeDescriptor::capillary(0.5, 2), {0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval_gauge(GaugeDescriptor::euclidean(2), {3.0, 4.0}) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("obstacle gauge with flat drift matches the half-space gauge") {
  const auto cap = GaugeDescriptor::capillary(0.3, 3);
  const auto obs = GaugeDescriptor::obstacle(0.3, analytic_h_halfspace(0.3, 3));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const Vec at{0.2, -0.4, 1.1};
  for (int i = 0; i < 200; ++i) {
    const Vec xi{nd(rng), nd(rng), nd(rng)};
    CHECK(eval_gauge(obs, xi, &at) == doctest::Approx(eval_gauge(cap, xi)).epsilon(1e-14));
  }
}

TEST_CASE("gauge gradient") {
  const Vec g1 = grad_gauge(GaugeDescriptor::capillary(0.5, 2), {1.0, 0.0});
  CHECK(g1[0] == doctest::Approx(1.0));
  CHECK(g1[1] == doctest::Approx(-0.5));
  const Vec g2 = grad_gauge(GaugeDescriptor::euclidean(2), {0.0, 2.0});
  CHECK(g2[0] == doctest::Approx(0.0));
  CHECK(g2[1] == doctest::Approx(1.0));
}

TEST_CASE("Euler identity DF(xi).xi = F(xi)") {
  const auto g = GaugeDescriptor::capillary(-0.6, 3);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 100; ++i) {
    const Vec xi{nd(rng), nd(rng), nd(rng)};
    const Vec d = grad_gauge(g, xi);
    CHECK(d[0] * xi[0] + d[1] * xi[1] + d[2] * xi[2] == doctest::Approx(eval_gauge(g, xi)).epsilon(1e-13));
  }
}

TEST_CASE("dual gauge closed cases") {
  CHECK(eval_dual(GaugeDescriptor::capillary(0.0, 2), {3.0, -4.0}).value == doctest::Approx(5.0).epsilon(1e-15));
  // |x/t + lambda e_n| = 1 with x = e_n, lambda = 1/2 gives t = 2.
  CHECK(std::abs(eval_dual(GaugeDescriptor::capillary(0.5, 2), {0.0, 1.0}).value - 2.0) < 1e-10);
}

TEST_CASE("dual gauge agrees with brute-force polar supremum") {
  const auto g = GaugeDescriptor::capillary(0.7, 2);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    const Vec x{nd(rng), nd(rng)};
    double best = 0.0;
    const int M = 100000;
    for (int k = 0; k < M; ++k) {
      const double t = 2.0 * M_PI * k / M;
      const Vec xi{std::cos(t), std::sin(t)};
      best = std::max(best, (x[0] * xi[0] + x[1] * xi[1]) / eval_gauge(g, xi));
    }
    CHECK(std::abs(eval_dual(g, x).value - best) < 1e-4);
  }
}

TEST_CASE("polarity residuals") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::vector<Vec> xs(1000, Vec(2));
  for (auto& x : xs)
    for (double& v : x) v = nd(rng);
  CHECK(check_polarity(GaugeDescriptor::euclidean(2), xs).max_residual < 1e-12);
  CHECK(check_polarity(GaugeDescriptor::capillary(0.7, 2), xs).max_residual < 1e-8);
  const auto ball = GaugeDescriptor::obstacle(0.4, analytic_h_ball(0.4, 1.0, 2));
  const Vec at{1.5, 0.3};
  CHECK(check_polarity(ball, xs, &at).max_residual < 1e-8);
}

TEST_CASE("Wulff ball volume is a translated unit ball") {
  CHECK(std::abs(wulff_ball_volume(GaugeDescriptor::capillary(0.0, 2)) - M_PI) < 1e-8);
  CHECK(std::abs(wulff_ball_volume(GaugeDescriptor::capillary(0.5, 2)) - M_PI) < 1e-6);
  CHECK(std::abs(wulff_ball_volume(GaugeDescriptor::capillary(0.5, 3)) - 4.0 * M_PI / 3.0) < 1e-6);
  // Monte Carlo membership on the box [-1,1] x [-1.5,0.5] containing B_1(-e_n/2).
  const auto g = GaugeDescriptor::capillary(0.5, 2);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int N = 200000;
  int hits = 0;
  for (int i = 0; i < N; ++i) {
    const Vec x{-1.0 + 2.0 * u(rng), -1.5 + 2.0 * u(rng)};
    if (eval_dual(g, x).value <= 1.0) ++hits;
  }
  const double p = static_cast<double>(hits) / N;
  const double est = 4.0 * p, se = 4.0 * std::sqrt(p * (1 - p) / N);
  CHECK(std::abs(est - wulff_ball_volume(g)) < 3.0 * se);
}

TEST_CASE("invalid lambda is rejected") {
  CHECK_THROWS_AS(GaugeDescriptor::capillary(1.0, 2), InvalidInput);
  CHECK_THROWS_AS(GaugeDescriptor::capillary(-1.5, 3), InvalidInput);
}
