#include <doctest.h>

#include <cmath>

#include "capsym/harmonic.hpp"

using namespace capsym;

TEST_CASE("closed-form potentials") {
  const auto hs = analytic_h_halfspace(0.5, 2);
  const double x[2] = {1.0, 2.0};
  CHECK(hs->value(x) == doctest::Approx(-1.0));
  double gr[2];
  hs->gradient(x, gr);
  CHECK(gr[0] == 0.0);
  CHECK(gr[1] == doctest::Approx(-0.5));

  const auto b2 = analytic_h_ball(0.5, 1.0, 2);
  const double y[2] = {0.0, 4.0};
  b2->gradient(y, gr);
  CHECK(std::hypot(gr[0], gr[1]) == doctest::Approx(0.125));
}

TEST_CASE("potential gradients agree with finite differences and are harmonic") {
  for (int n : {2, 3}) {
    const auto b = analytic_h_ball(0.7, 1.3, n, Vec(n, 0.2));
    const double x[3] = {1.9, -0.7, 0.8};
    double gr[3];
    b->gradient(x, gr);
    const double d = 1e-5;
    double lap = 0.0;
    for (int a = 0; a < n; ++a) {
      double xp[3] = {x[0], x[1], x[2]}, xm[3] = {x[0], x[1], x[2]};
      xp[a] += d;
      xm[a] -= d;
      CHECK(std::abs((b->value(xp) - b->value(xm)) / (2 * d) - gr[a]) < 1e-8);
      lap += (b->value(xp) - 2 * b->value(x) + b->value(xm)) / (d * d);
    }
    CHECK(std::abs(lap) < 1e-4);
  }
}

TEST_CASE("ball potential meets the wall condition") {
  // grad h . nu = lambda on the sphere, nu the normal pointing into the ball.
  const double lam = 0.4, R = 1.5;
  const auto b = analytic_h_ball(lam, R, 3);
  for (int k = 0; k < 8; ++k) {
    const double t = 0.3 + k, s = 0.2 * k;
    const double x[3] = {R * std::sin(t) * std::cos(s), R * std::sin(t) * std::sin(s), R * std::cos(t)};
    double gr[3];
    b->gradient(x, gr);
    CHECK(-(gr[0] * x[0] + gr[1] * x[1] + gr[2] * x[2]) / R == doctest::Approx(lam).epsilon(1e-12));
  }
}

TEST_CASE("numerical solve reproduces the half-space potential") {
  const MaskedGrid g = build_domain(ConvexObstacle::half_space({0, 1}, 0), Region::box({-1, -1}, {1, 1}), 1.0 / 32);
  const auto ref = analytic_h_halfspace(0.6, 2);
  HarmonicOptions opt;
  opt.analytic_initial_guess = false;
  const HarmonicField f = solve_h(g, 0.6, OuterBC::MatchAnalytic, ref.get(), opt);
  double err = 0.0;
  for (int c : g.domain) {
    const Point x = g.center(c);
    double a[2], b[2];
    f.gradient(x.data(), a);
    ref->gradient(x.data(), b);
    err = std::max(err, std::hypot(a[0] - b[0], a[1] - b[1]));
  }
  CHECK(err <= 1e-8);
  CHECK(f.sup_gradient() == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("numerical solve outside a disk converges") {
  const double lam = 0.5;
  const auto ref = analytic_h_ball(lam, 1.0, 2);
  std::vector<double> errs;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const MaskedGrid g = build_domain(ConvexObstacle::ball({0, 0}, 1.0), Region::box({-3, -3}, {3, 3}), h);
    const HarmonicField f = solve_h(g, lam, OuterBC::MatchAnalytic, ref.get());
    double err = 0.0;
    for (int c : g.domain) {
      const Point x = g.center(c);
      if (std::hypot(x[0], x[1]) < 1.5) continue;
      double a[2], b[2];
      f.gradient(x.data(), a);
      ref->gradient(x.data(), b);
      err = std::max(err, std::hypot(a[0] - b[0], a[1] - b[1]));
    }
    errs.push_back(err);
  }
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < errs[1]);
  CHECK(errs[2] < 0.02);
}

TEST_CASE("flux identity for sets touching the obstacle") {
  const double h = 1.0 / 64;
  const MaskedGrid g = build_domain(ConvexObstacle::ball({0, 0}, 1.0), Region::box({-3, -3}, {3, 3}), h);
  const auto ref = analytic_h_ball(0.5, 1.0, 2);
  const CellSet set = CellSet::from_level(g, [](const double* x) { return std::hypot(x[0] - 1.0, x[1]) - 0.9; });
  const VerificationReport r = flux_identity_check(*ref, g, set, 0.5);
  CHECK(r.passed);
  CHECK(r.metadata["wet_area"].get<double>() > 0.5);
  const HarmonicField f = solve_h(g, 0.5, OuterBC::HomogeneousNeumann);
  CHECK(flux_identity_check(f, g, set, 0.5).passed);
}
