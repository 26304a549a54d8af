#include <doctest.h>

#include <cmath>

#include "capsym/verify.hpp"

using namespace capsym;

TEST_CASE("Moser constants under both conventions") {
  for (double lam : {-0.5, 0.0, 0.7}) {
    const MoserConstants a = MoserConstants::make(lam, 2);
    CHECK(a.kappa_tilde == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(a.lambda_tilde == doctest::Approx(2 * M_PI).epsilon(1e-12));
    CHECK(MoserConstants::make(lam, 2, MoserConvention::Theorem).lambda_tilde == doctest::Approx(8 * M_PI).epsilon(1e-12));
    const MoserConstants b = MoserConstants::make(lam, 3);
    CHECK(b.kappa_tilde == doctest::Approx(4 * M_PI / 3).epsilon(1e-12));
    CHECK(b.lambda_tilde == doctest::Approx(3 * std::sqrt(2 * M_PI)).epsilon(1e-12));
  }
  CHECK(parse_moser_convention(to_string(MoserConvention::Theorem)) == MoserConvention::Theorem);
  CHECK(parse_moser_convention(to_string(MoserConvention::Proposition)) == MoserConvention::Proposition);
  CHECK_THROWS_AS(parse_moser_convention("folklore"), InvalidInput);
}

TEST_CASE("extremal profile and derivative") {
  const Extremal e = extremal_family(0.3, 2.0, 3, 1.7, {0.0, 0.0, 0.0});
  CHECK(e.profile(0.0) == doctest::Approx(e.c * std::pow(1.7, 0.5)).epsilon(1e-14));
  for (double r : {0.1, 0.8, 2.5}) {
    const double d = 1e-6;
    CHECK(std::abs((e.profile(r + d) - e.profile(r - d)) / (2 * d) - e.dprofile(r)) < 1e-7);
    // x = r (unit vector) - r lambda e_3 has F^o(x) = r.
    const double x[3] = {r * 0.6, 0.0, r * 0.8 - r * 0.3};
    CHECK(e(x) == doctest::Approx(e.profile(r)).epsilon(1e-12));
  }
}

TEST_CASE("extremal solves the radial Euler-Lagrange equation") {
  // For p = 2, n = 3: -(r^2 U')' / r^2 is proportional to U^5.
  const Extremal e = extremal_family(0.0, 2.0, 3, 1.0);
  auto lap = [&](double r) {
    const double d = 1e-4;
    const auto f = [&](double t) { return t * t * e.dprofile(t); };
    return -(f(r + d) - f(r - d)) / (2 * d) / (r * r);
  };
  const double k1 = lap(0.5) / std::pow(e.profile(0.5), 5), k2 = lap(2.0) / std::pow(e.profile(2.0), 5);
  CHECK(k1 == doctest::Approx(k2).epsilon(1e-6));
}

TEST_CASE("Sobolev quotient is invariant under scaling") {
  const double lam = 0.2, p = 1.5;
  const MaskedGrid g1 = build_cap_grid(lam, 2, 1.0, 1.0 / 32);
  const MaskedGrid g2 = build_cap_grid(lam, 2, 2.0, 1.0 / 16);
  auto prof = [&](double r) { return r < 1.0 ? std::pow(1 - r * r, 2) : 0.0; };
  Field u1 = sample_field(g1, [&](const double* x) { return prof(cap_coordinate(x, 2, lam)); });
  Field u2 = sample_field(g2, [&](const double* x) { return 5.0 * prof(cap_coordinate(x, 2, lam) / 2.0); });
  apply_dirichlet_zero(g1, u1);
  apply_dirichlet_zero(g2, u2);
  const auto gauge = GaugeDescriptor::capillary(lam, 2);
  const double q1 = sobolev_quotient(g1, u1, gauge, p), q2 = sobolev_quotient(g2, u2, gauge, p);
  CHECK(std::abs(q1 - q2) <= 1e-12 * q1);
}

TEST_CASE("Moser functional edge cases") {
  const double lam = 0.3, h = 1.0 / 64;
  const MaskedGrid g = build_cap_grid(lam, 2, 1.0, h);
  const auto gauge = GaugeDescriptor::capillary(lam, 2);
  const MoserConstants mc = MoserConstants::make(lam, 2);
  CHECK(moser_functional(g, Field(g.size(), 0.0), gauge, mc, 1.0) == doctest::Approx(g.volume()).epsilon(1e-14));
  const Field m = moser_sequence(4, lam, 2, g);
  CHECK(gradient_energy(g, m, gauge, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moser_functional(g, m, gauge, mc, 1.0) > g.volume());
  CHECK(moser_functional(g, m, gauge, mc, 1.1) > moser_functional(g, m, gauge, mc, 1.0));
  Field big = m;
  for (double& v : big) v *= 1.01;
  CHECK_THROWS_AS(moser_functional(g, big, gauge, mc, 1.0), InvalidInput);
  CHECK_NOTHROW(moser_sequence(16, lam, 2, g));
  CHECK_THROWS_AS(moser_sequence(17, lam, 2, g), ResolutionError);
}

TEST_CASE("Talenti comparison is an equality on the cap") {
  const double lam = -0.3;
  const MaskedGrid g = build_cap_grid(lam, 2, 1.0, 1.0 / 32);
  const TalentiResult r = talenti_compare(g, Field(g.size(), 1.0), GaugeDescriptor::capillary(lam, 2));
  CHECK(r.report.passed);
  CHECK(r.report.metadata["rigidity_candidate"].get<bool>());
  for (std::size_t i = 0; i < r.s.size(); ++i) CHECK(r.u_sharp[i] <= r.v_sharp[i] + r.report.tolerance);
}

TEST_CASE("Talenti gap is positive away from the cap") {
  const double h = 1.0 / 32;
  const MaskedGrid g = build_domain(ConvexObstacle::half_space({0, 1}, 0), Region::box({-1.5, 0}, {1.5, 0.6}), h);
  const TalentiResult r = talenti_compare(g, Field(g.size(), 1.0), GaugeDescriptor::capillary(0.0, 2));
  CHECK(r.report.passed);
  CHECK(r.report.metadata["mean_gap"].get<double>() > r.report.tolerance);
}

TEST_CASE("Bossel-Daners self comparison and a slab") {
  const MaskedGrid cap = build_cap_grid(0.2, 2, 1.0, 1.0 / 32);
  const BosselDanersResult a = bossel_daners_compare(cap, GaugeDescriptor::capillary(0.2, 2));
  CHECK(a.report.passed);
  CHECK(std::abs(a.report.margin) < a.report.tolerance);
  const MaskedGrid slab = build_domain(ConvexObstacle::half_space({0, 1}, 0), Region::box({-1.2, 0}, {1.2, 0.7}), 1.0 / 32);
  const BosselDanersResult b = bossel_daners_compare(slab, GaugeDescriptor::capillary(0.2, 2));
  CHECK(b.report.passed);
  CHECK(b.report.margin > 0.0);
  CHECK(b.cap_radius == doctest::Approx(cap_radius_for_volume(slab.volume(), 0.2, 2)));
}
