#include <doctest.h>

#include <cmath>

#include "capsym/pde.hpp"
#include "capsym/rearrange.hpp"

using namespace capsym;

namespace {

// First zero of J_0.
constexpr double kJ01 = 2.404825557695773;

MixedProblem cap_problem(double lam, double h, double fval) {
  MixedProblem pr;
  pr.grid = build_cap_grid(lam, 2, 1.0, h);
  pr.gauge = GaugeDescriptor::capillary(lam, 2);
  pr.f = Field(pr.grid.size(), fval);
  return pr;
}

}  // namespace

TEST_CASE("zero source gives the zero solution") {
  const MixedSolution s = solve_mixed_bvp(cap_problem(0.3, 1.0 / 16, 0.0));
  for (double v : s.u) CHECK(v == 0.0);
}

TEST_CASE("Euclidean problem at p = 2 is linear") {
  MixedProblem a = cap_problem(0.0, 1.0 / 32, 1.0);
  a.gauge = GaugeDescriptor::euclidean(2);
  MixedProblem b = a;
  for (double& v : b.f) v *= 2.0;
  SolverOptions opt;
  opt.tolerance = 1e-11;
  const MixedSolution sa = solve_mixed_bvp(a, opt), sb = solve_mixed_bvp(b, opt);
  double err = 0.0, mx = 0.0;
  for (int c : a.grid.domain) {
    err = std::max(err, std::abs(sb.u[c] - 2 * sa.u[c]));
    mx = std::max(mx, sb.u[c]);
  }
  CHECK(err < 1e-8 * mx);
}

TEST_CASE("solver energy decreases monotonically") {
  const MixedSolution s = solve_mixed_bvp(cap_problem(-0.4, 1.0 / 32, 1.0));
  // Steps inside the round-off band may leave the energy unchanged to 1e-13.
  for (std::size_t k = 1; k < s.energy_trace.size(); ++k)
    CHECK(s.energy_trace[k] <= s.energy_trace[k - 1] + 1e-13 * std::abs(s.energy_trace[k - 1]));
  CHECK(s.energy < 0.0);
}

TEST_CASE("torsion function of the cap") {
  // On the unit cap the torsion function is (1 - rho^2) / 4. Boundary cells are
  // held at zero, so the sup error is first order in h.
  for (double lam : {-0.5, 0.0, 0.5}) {
    std::vector<double> errs;
    for (double h : {1.0 / 32, 1.0 / 64}) {
      const MixedProblem pr = cap_problem(lam, h, 1.0);
      const MixedSolution s = solve_mixed_bvp(pr);
      double err = 0.0;
      for (int c : pr.grid.domain) {
        const Point x = pr.grid.center(c);
        const double r = cap_coordinate(x.data(), 2, lam);
        err = std::max(err, std::abs(s.u[c] - (1 - r * r) / 4));
      }
      errs.push_back(err);
    }
    CHECK(errs[0] / errs[1] > 1.6);
    CHECK(errs[1] < 1.5e-2);
  }
}

TEST_CASE("radial ODE closed forms") {
  for (int n : {2, 3}) {
    const double lam = 0.25, r = 1.3;
    const double kappa = cap_constant(lam, n), total = kappa * std::pow(r, n);
    const RadialSolution c = solve_radial_ode(SharpFunction::constant(2.0, total), r, lam, n);
    for (std::size_t i = 0; i < c.rho.size(); i += 5)
      CHECK(std::abs(c.v[i] - 2.0 * (r * r - c.rho[i] * c.rho[i]) / (2 * n)) < 1e-12);

    const double a = 0.6;
    const RadialSolution st = solve_radial_ode(SharpFunction::step(1.0, kappa * std::pow(a, n), total), r, lam, n);
    auto exact = [&](double rho) {
      auto outer = [&](double t) {
        return n == 2 ? 0.5 * a * a * std::log(r / t) : a * a * a / 3.0 * (1.0 / t - 1.0 / r);
      };
      return rho >= a ? outer(rho) : outer(a) + (a * a - rho * rho) / (2 * n);
    };
    double err = 0.0;
    for (std::size_t i = 0; i < st.rho.size(); ++i) err = std::max(err, std::abs(st.v[i] - exact(st.rho[i])));
    CHECK(err < 1e-10);
    for (double t : {0.1, 0.55, 0.9, 1.2}) CHECK(std::abs(st.value(t) - exact(t)) < 1e-6);
  }
}

TEST_CASE("upper profile for a constant source") {
  const double lam = -0.2, omega = 2.0;
  const double kappa = cap_constant(lam, 2);
  const TalentiProfile tp = talenti_upper_profile(SharpFunction::constant(1.0, omega), omega, lam, 2);
  for (std::size_t i = 0; i < tp.s.size(); i += 3)
    CHECK(std::abs(tp.values[i] - (omega - tp.s[i]) / (4 * kappa)) < 1e-13);
}

TEST_CASE("staircase sharp function integrates exactly") {
  SharpFunction f = SharpFunction::staircase({3.0, 2.0, 2.0, 0.5}, 0.25);
  f.prepare();
  CHECK(f.total == doctest::Approx(1.0));
  CHECK(f.integral(0.375) == doctest::Approx(0.75 + 0.25).epsilon(1e-14));
  CHECK(f.integral(1.0) == doctest::Approx(0.75 + 0.5 + 0.5 + 0.125).epsilon(1e-14));
}

TEST_CASE("first eigenvalue of the cap") {
  // Radial in the cap coordinate, so the value is j01^2 for every lambda.
  // The boundary error is first order, so refinement must roughly halve it.
  const double target = kJ01 * kJ01;
  const double coarse = first_eigenvalue(build_cap_grid(0.0, 2, 1.0, 1.0 / 32), GaugeDescriptor::capillary(0.0, 2)).eigenvalue;
  const double fine = first_eigenvalue(build_cap_grid(0.0, 2, 1.0, 1.0 / 64), GaugeDescriptor::capillary(0.0, 2)).eigenvalue;
  CHECK(std::abs(fine - target) < 0.6 * std::abs(coarse - target));
  CHECK(std::abs(fine - target) / target < 0.03);
  for (double lam : {0.0, 0.4}) {
    const MaskedGrid g = build_cap_grid(lam, 2, 1.0, 1.0 / 32);
    const EigenResult e = first_eigenvalue(g, GaugeDescriptor::capillary(lam, 2));
    CHECK(std::abs(e.eigenvalue - coarse) / coarse < 0.02);
    CHECK(rayleigh_quotient(g, GaugeDescriptor::capillary(lam, 2), e.eigenfunction) ==
          doctest::Approx(e.eigenvalue).epsilon(1e-9));
    double l2 = 0.0;
    for (int c : g.domain) {
      CHECK(e.eigenfunction[c] >= 0.0);
      l2 += e.eigenfunction[c] * e.eigenfunction[c];
    }
    CHECK(l2 * g.h * g.h == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("eigenvalue scaling and domain monotonicity") {
  const auto gauge = GaugeDescriptor::capillary(0.2, 2);
  const double l1 = first_eigenvalue(build_cap_grid(0.2, 2, 1.0, 1.0 / 32), gauge).eigenvalue;
  const double l2 = first_eigenvalue(build_cap_grid(0.2, 2, 2.0, 1.0 / 16), gauge).eigenvalue;
  CHECK(std::abs(l2 * 4 - l1) / l1 < 1e-8);
  const double small = first_eigenvalue(build_cap_grid(0.2, 2, 0.8, 1.0 / 32), gauge).eigenvalue;
  CHECK(small > l1);
  const double c = poincare_constant(build_cap_grid(0.2, 2, 1.0, 1.0 / 32), gauge);
  CHECK(c == doctest::Approx(1.0 / l1).epsilon(1e-8));
}

TEST_CASE("quotient minimiser recovers the eigenvalue for q = p = 2") {
  const MaskedGrid g = build_cap_grid(0.0, 2, 1.0, 1.0 / 32);
  const auto gauge = GaugeDescriptor::capillary(0.0, 2);
  Field start = sample_field(g, [](const double* x) { return std::max(0.0, 1 - x[0] * x[0] - x[1] * x[1]); });
  apply_dirichlet_zero(g, start);
  const QuotientMinimum m = minimize_lq_quotient(g, gauge, 2.0, 2.0, start, 5000, 1e-12);
  const double lam = first_eigenvalue(g, gauge).eigenvalue;
  CHECK(std::abs(m.quotient - lam) / lam < 1e-4);
  CHECK(minimize_lq_quotient(g, gauge, 2.0, 2.0, start, 0).quotient >= m.quotient);
}
