#include <doctest.h>

#include <cmath>
#include <limits>

#include "capsym/experiments.hpp"
#include "capsym/harmonic.hpp"
#include "capsym/rearrange.hpp"

using namespace capsym;

namespace {

MaskedGrid slab(double h) {
  return build_domain(ConvexObstacle::half_space({0, 1}, 0), Region::box({-1.5, 0}, {1.5, 1.2}), h);
}

}  // namespace

TEST_CASE("rearrangement preserves norms and distribution") {
  const MaskedGrid g = slab(1.0 / 32);
  const Field u = random_admissible_field(g, 17);
  const RadialProfile pr = decreasing_rearrangement(g, u);
  for (double q : {1.0, 2.0, 3.5, std::numeric_limits<double>::infinity()})
    CHECK(pr.norm(q) == doctest::Approx(field_norm(g, u, q)).epsilon(1e-12));
  for (std::size_t k = 1; k < pr.values.size(); ++k) CHECK(pr.values[k] <= pr.values[k - 1]);
  const LevelProfile a = distribution(g, u);
  const LevelProfile b = pr.distribution(a.thresholds);
  for (std::size_t i = 0; i < a.measures.size(); ++i) CHECK(a.measures[i] == doctest::Approx(b.measures[i]).epsilon(1e-12));
  CHECK(pr.cumulative(pr.total_volume) == doctest::Approx(field_norm(g, u, 1.0)).epsilon(1e-12));
}

TEST_CASE("symmetrisation is radial in the cap coordinate") {
  const double lam = -0.3;
  const MaskedGrid g = slab(1.0 / 32);
  const Field u = random_admissible_field(g, 5);
  const RadialProfile pr = capillary_symmetrize(g, u, lam);
  CHECK(pr.kappa == doctest::Approx(cap_constant(lam, 2)));
  CHECK(pr.kappa * std::pow(pr.r_max, 2) == doctest::Approx(g.volume()).epsilon(1e-12));
  // Points on one level of rho get one value.
  const double r = 0.5 * pr.r_max;
  double prev = NAN;
  for (double t : {0.3, 1.0, 2.0}) {
    // x = r (cos t, sin t) - r lam e_2 has |x + r lam e_2| = r, so rho(x) = r.
    const double x[2] = {r * std::cos(t), r * std::sin(t) - r * lam};
    const double v = pr.eval(x);
    if (!std::isnan(prev)) CHECK(v == doctest::Approx(prev).epsilon(1e-12));
    prev = v;
  }
}

TEST_CASE("a radial field on a cap is its own rearrangement") {
  const double lam = 0.4, h = 1.0 / 64;
  const MaskedGrid cap = build_cap_grid(lam, 2, 1.0, h);
  const Field u = sample_field(cap, [&](const double* x) {
    const double r = cap_coordinate(x, 2, lam);
    return r < 1.0 ? std::cos(0.5 * M_PI * r) : 0.0;
  });
  Field uz = u;
  apply_dirichlet_zero(cap, uz);
  const RadialProfile pr = capillary_symmetrize(cap, uz, lam);
  const Field back = sample_profile(cap, pr);
  double err = 0.0;
  for (int c : cap.domain)
    if (cap.cls[c] != CellClass::Dirichlet) err = std::max(err, std::abs(back[c] - uz[c]));
  CHECK(err < 0.05);
}

TEST_CASE("co-area formula on an analytic field") {
  const MaskedGrid g = slab(1.0 / 64);
  const Field u = sample_field(g, [](const double* x) { return std::exp(-(x[0] * x[0] + (x[1] - 0.2) * (x[1] - 0.2))); });
  for (double lam : {0.0, 0.6}) {
    const CoareaResult r = coarea_check(g, u, GaugeDescriptor::capillary(lam, 2), 2.0);
    CHECK(r.report.passed);
  }
}

TEST_CASE("Polya-Szego on random fields") {
  for (double lam : {-0.5, 0.0, 0.5}) {
    const MaskedGrid g = slab(1.0 / 32);
    const Field u = random_admissible_field(g, 100 + static_cast<int>(10 * lam));
    const PolyaSzegoResult r = polya_szego_check(g, u, lam, 2.0, analytic_h_halfspace(lam, 2));
    CHECK(r.report.passed);
    CHECK(r.report.lhs > r.report.rhs);
  }
}

TEST_CASE("Polya-Szego is nearly sharp for symmetric fields") {
  const double lam = 0.3, h = 1.0 / 64;
  const MaskedGrid cap = build_cap_grid(lam, 2, 1.0, h);
  Field u = sample_field(cap, [&](const double* x) {
    const double r = cap_coordinate(x, 2, lam);
    return r < 1.0 ? (1 - r * r) : 0.0;
  });
  apply_dirichlet_zero(cap, u);
  const PolyaSzegoResult r = polya_szego_check(cap, u, lam, 2.0, analytic_h_halfspace(lam, 2));
  CHECK(r.report.passed);
  CHECK(std::abs(r.report.margin) < 0.05 * r.report.rhs);
}

TEST_CASE("invalid fields are rejected") {
  const MaskedGrid g = slab(1.0 / 16);
  Field u(g.size(), -1.0);
  CHECK_THROWS_AS(polya_szego_check(g, u, 0.0, 2.0, analytic_h_halfspace(0.0, 2)), InvalidInput);
}
