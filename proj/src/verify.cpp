#include "capsym/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "capsym/kernels.hpp"

namespace capsym {

std::string to_string(MoserConvention c) { return c == MoserConvention::Proposition ? "proposition" : "theorem"; }

MoserConvention parse_moser_convention(const std::string& text) {
  if (text == "proposition") return MoserConvention::Proposition;
  if (text == "theorem") return MoserConvention::Theorem;
  throw InvalidInput(fmt::format("unknown Moser convention '{}' (expected proposition or theorem)", text));
}

MoserConstants MoserConstants::make(double lambda, int n, MoserConvention c) {
  check_lambda(lambda);
  if (n < 2) throw InvalidInput("dimension must be at least 2");
  MoserConstants m;
  m.lambda = lambda;
  m.n = n;
  m.convention = c;
  // The Wulff ball of F_lambda is a translated unit ball.
  m.kappa_tilde = unit_ball_volume(n);
  const double inner = c == MoserConvention::Proposition ? 0.5 * n * m.kappa_tilde : 2.0 * n * m.kappa_tilde;
  m.lambda_tilde = n * std::pow(inner, 1.0 / (n - 1));
  return m;
}

namespace {

void require_admissible(const MaskedGrid& g, const Field& u) {
  if (u.size() != g.size()) throw InvalidInput("field does not match grid");
  double umax = 0.0;
  for (int c : g.domain) {
    if (!std::isfinite(u[c])) throw InvalidInput("field must be finite");
    if (u[c] < 0.0) throw InvalidInput("field must be non-negative");
    umax = std::max(umax, u[c]);
  }
  if (umax == 0.0) throw InvalidInput("field vanishes identically");
  for (int c : g.domain)
    if (g.cls[c] == CellClass::Dirichlet && std::abs(u[c]) > 1e-14 * umax)
      throw InvalidInput("field must vanish on Dirichlet cells");
}

double power_sum(const MaskedGrid& g, const Field& u, double q) {
  double s = 0.0;
  for (int c : g.domain) s += std::pow(std::abs(u[c]), q);
  return s * g.cell_volume();
}

}  // namespace

double sobolev_quotient(const MaskedGrid& g, const Field& u, const GaugeDescriptor& gauge, double p) {
  const int n = g.dim;
  if (!(p > 1.0 && p < n)) throw InvalidInput("Sobolev exponent requires 1 < p < n");
  require_admissible(g, u);
  const double pstar = n * p / (n - p);
  const double E = gradient_energy(g, u, gauge, p);
  return E / std::pow(power_sum(g, u, pstar), p / pstar);
}

double Extremal::profile(double rho) const {
  const double e = (n - p) / p;
  return c * std::pow(sigma, e) * std::pow(1.0 + std::pow(sigma * rho, p / (p - 1.0)), -e);
}

double Extremal::dprofile(double rho) const {
  const double e = (n - p) / p;
  const double t = std::pow(sigma * rho, p / (p - 1.0));
  const double dt = (p / (p - 1.0)) * sigma * std::pow(sigma * rho, 1.0 / (p - 1.0));
  return -e * c * std::pow(sigma, e) * std::pow(1.0 + t, -e - 1.0) * dt;
}

double Extremal::operator()(const double* x) const {
  double y[3] = {0, 0, 0};
  for (int a = 0; a < n; ++a) y[a] = x[a] - (x0.empty() ? 0.0 : x0[a]);
  return profile(cap_coordinate(y, n, lambda));
}

Extremal extremal_family(double lambda, double p, int n, double sigma, Vec x0) {
  check_lambda(lambda);
  if (!(p > 1.0 && p < n)) throw InvalidInput("extremal family requires 1 < p < n");
  if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
  if (!x0.empty() && static_cast<int>(x0.size()) != n) throw InvalidInput("x0 has the wrong dimension");
  Extremal e;
  e.lambda = lambda;
  e.p = p;
  e.n = n;
  e.sigma = sigma;
  e.x0 = std::move(x0);
  return e;
}

Json BestConstantEstimate::trace() const {
  Json j;
  j["lambda"] = lambda;
  j["p"] = p;
  j["n"] = n;
  j["estimate"] = estimate;
  j["radii"] = radii;
  j["quotients"] = quotients;
  j["exponents"] = exponents;
  j["a_raw"] = a_raw;
  j["a_pooled"] = a_pooled;
  j["non_increasing"] = non_increasing;
  return j;
}

namespace {

// Least-squares fit of y = c0 + c1 x + c2 x^2 (as many terms as points allow); returns c0.
double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = std::min<std::size_t>(3, x.size());
  double A[3][3] = {}, b[3] = {};
  for (std::size_t i = 0; i < x.size(); ++i) {
    double phi[3] = {1.0, x[i], x[i] * x[i]};
    for (std::size_t r = 0; r < m; ++r) {
      b[r] += phi[r] * y[i];
      for (std::size_t c = 0; c < m; ++c) A[r][c] += phi[r] * phi[c];
    }
  }
  // Gaussian elimination with partial pivoting.
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < m; ++r)
      if (std::abs(A[r][k]) > std::abs(A[piv][k])) piv = r;
    std::swap(A[k], A[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t r = k + 1; r < m; ++r) {
      const double f = A[r][k] / A[k][k];
      for (std::size_t c = k; c < m; ++c) A[r][c] -= f * A[k][c];
      b[r] -= f * b[k];
    }
  }
  double sol[3] = {};
  for (std::size_t k = m; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < m; ++c) s -= A[k][c] * sol[c];
    sol[k] = s / A[k][k];
  }
  return sol[0];
}

double cosine_cutoff(double rho, double delta) {
  if (rho <= delta) return 1.0;
  if (rho >= 2.0 * delta) return 0.0;
  return 0.5 * (1.0 + std::cos(M_PI * (rho - delta) / delta));
}

}  // namespace

BestConstantEstimate best_constant_estimate(double lambda, double p, int n, const std::vector<double>& radii,
                                            const BestConstantOptions& opt) {
  check_lambda(lambda);
  if (!(p > 1.0 && p < n)) throw InvalidInput("best constant requires 1 < p < n");
  if (radii.size() < 3) throw InvalidInput("at least three radii are needed to extrapolate");
  if (!(opt.h > 0.0)) throw InvalidInput("spacing must be positive");
  BestConstantEstimate out;
  out.lambda = lambda;
  out.p = p;
  out.n = n;
  out.radii = radii;
  std::sort(out.radii.begin(), out.radii.end());

  const Extremal U = extremal_family(lambda, p, n, 1.0);
  const GaugeDescriptor gauge = GaugeDescriptor::capillary(lambda, n);
  // Truncation error decays like delta^-alpha, alpha = (n-p)/(p-1).
  const double alpha = (n - p) / (p - 1.0);
  std::vector<double> xs;
  for (double R : out.radii) {
    if (!(R > 4.0 * opt.h)) throw InvalidInput(fmt::format("radius {} is under-resolved at spacing {}", R, opt.h));
    const double delta = 0.5 * R;
    const MaskedGrid g = build_cap_grid(lambda, n, R, opt.h);
    Field u = sample_field(g, [&](const double* x) {
      const double rho = cap_coordinate(x, n, lambda);
      return cosine_cutoff(rho, delta) * U.profile(rho);
    });
    apply_dirichlet_zero(g, u);
    out.quotients.push_back(sobolev_quotient(g, u, gauge, p));
    xs.push_back(std::pow(delta, -alpha));
    spdlog::debug("cut-off extremal R={} quotient={}", R, out.quotients.back());
  }
  out.estimate = extrapolate_to_zero(xs, out.quotients);

  if (opt.subcritical && opt.subcritical_steps > 0) {
    // A domain of volume below one makes ||u||_q non-decreasing in q.
    const double r = cap_radius_for_volume(0.9, lambda, n);
    const MaskedGrid g = build_cap_grid(lambda, n, r, r / opt.subcritical_cells);
    const double pstar = n * p / (n - p);
    std::vector<Field> pool;
    for (int k = 1; k <= opt.subcritical_steps; ++k) {
      const double q = p + (pstar - p) * (1.0 - std::ldexp(1.0, -k));
      out.exponents.push_back(q);
      double best = std::numeric_limits<double>::infinity();
      for (int s = 0; s < opt.starts; ++s) {
        std::mt19937_64 rng(opt.seed * 1000003ULL + static_cast<std::uint64_t>(k) * 101ULL +
                            static_cast<std::uint64_t>(s));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        // Random positive bump sum, tapered to vanish at the cap rim.
        std::vector<std::array<double, 4>> bumps(4);
        for (auto& b : bumps) {
          for (int a = 0; a < n; ++a) b[a] = (2.0 * uni(rng) - 1.0) * 0.6 * r;
          b[n - 1] = std::abs(b[n - 1]);
          b[3] = 0.2 + uni(rng);
        }
        Field start = sample_field(g, [&](const double* x) {
          const double rho = cap_coordinate(x, n, lambda);
          double v = 0.0;
          for (const auto& b : bumps) {
            double d2 = 0.0;
            for (int a = 0; a < n; ++a) d2 += (x[a] - b[a]) * (x[a] - b[a]);
            v += b[3] * std::exp(-d2 / (0.18 * r * r));
          }
          return std::max(0.0, r - rho) * v;
        });
        apply_dirichlet_zero(g, start);
        QuotientMinimum qm = minimize_lq_quotient(g, gauge, p, q, start, opt.iterations, 1e-9);
        best = std::min(best, qm.quotient);
        pool.push_back(std::move(qm.u));
      }
      out.a_raw.push_back(best);
    }
    for (double q : out.exponents) {
      double best = std::numeric_limits<double>::infinity();
      for (const Field& u : pool) best = std::min(best, minimize_lq_quotient(g, gauge, p, q, u, 0).quotient);
      out.a_pooled.push_back(best);
    }
    for (std::size_t k = 1; k < out.a_pooled.size(); ++k)
      if (out.a_pooled[k] > out.a_pooled[k - 1] * (1.0 + 1e-12)) out.non_increasing = false;
  }
  return out;
}

double moser_functional(const MaskedGrid& g, const Field& u, const GaugeDescriptor& gauge,
                        const MoserConstants& constants, double scale) {
  const int n = g.dim;
  if (constants.n != n) throw InvalidInput("Moser constants have the wrong dimension");
  if (u.size() != g.size()) throw InvalidInput("field does not match grid");
  for (int c : g.domain)
    if (!(u[c] >= 0.0)) throw InvalidInput("field must be non-negative");
  const double E = gradient_energy(g, u, gauge, n);
  if (E > 1.0 + 1e-10) throw InvalidInput(fmt::format("n-energy exceeds 1 by {:.3e}", E - 1.0));
  const double e = n / (n - 1.0);
  double s = 0.0;
  for (int c : g.domain) s += std::exp(scale * constants.lambda_tilde * std::pow(u[c], e));
  return s * g.cell_volume();
}

Field moser_sequence(int k, double lambda, int n, const MaskedGrid& g) {
  check_lambda(lambda);
  if (k < 1) throw InvalidInput("Moser index k must be at least 1");
  if (g.dim != n) throw InvalidInput("grid dimension does not match n");
  if (k > 1.0 / (4.0 * g.h))
    throw ResolutionError(fmt::format("Moser index k = {} needs spacing at most 1/(4k) = {:.6g}, grid has {:.6g}",
                                      k, 1.0 / (4.0 * k), g.h));
  const double top = std::log(k + 1.0);
  Field u = sample_field(g, [&](const double* x) {
    const double rho = cap_coordinate(x, n, lambda);
    if (rho <= 0.0) return top;
    return std::clamp(-std::log(rho), 0.0, top);
  });
  apply_dirichlet_zero(g, u);
  const double E = gradient_energy(g, u, GaugeDescriptor::capillary(lambda, n), n);
  if (!(E > 0.0)) throw ResolutionError("Moser profile is not resolved by the grid");
  const double c = std::pow(E, -1.0 / n);
  for (double& v : u) v *= c;
  return u;
}

namespace {

// (int v^q)^(1/q) and (int |v'|^q)^(1/q) over the cap, by trapezoids in rho.
double radial_norm(const RadialSolution& rs, double q, bool derivative) {
  const std::vector<double>& f = derivative ? rs.dv : rs.v;
  if (std::isinf(q)) {
    double m = 0.0;
    for (double a : f) m = std::max(m, std::abs(a));
    return m;
  }
  const double w = rs.n * rs.kappa;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < rs.rho.size(); ++i) {
    const double a = std::pow(std::abs(f[i]), q) * std::pow(rs.rho[i], rs.n - 1);
    const double b = std::pow(std::abs(f[i + 1]), q) * std::pow(rs.rho[i + 1], rs.n - 1);
    s += 0.5 * (a + b) * (rs.rho[i + 1] - rs.rho[i]);
  }
  return std::pow(w * s, 1.0 / q);
}

}  // namespace

TalentiResult talenti_compare(const MaskedGrid& g, const Field& f, const GaugeDescriptor& gauge,
                              const TalentiOptions& opt) {
  if (f.size() != g.size()) throw InvalidInput("source does not match grid");
  double fmax = 0.0;
  for (int c : g.domain) {
    if (!(f[c] >= 0.0)) throw InvalidInput("source must be non-negative");
    fmax = std::max(fmax, f[c]);
  }
  if (fmax == 0.0) throw InvalidInput("source vanishes identically");
  const int n = g.dim;
  const double lambda = gauge.lambda();

  TalentiResult out;
  MixedProblem pr;
  pr.grid = g;
  pr.gauge = gauge;
  pr.f = f;
  out.solution = solve_mixed_bvp(pr, opt.solver);
  const Field& u = out.solution.u;

  const RadialProfile us = decreasing_rearrangement(g, u);
  const RadialProfile fs = decreasing_rearrangement(g, f);
  const double omega = g.volume();
  const double r = cap_radius_for_volume(omega, lambda, n);
  out.radial = solve_radial_ode(SharpFunction::staircase(fs.values, g.cell_volume()), r, lambda, n);

  const std::size_t M = std::max<std::size_t>(opt.profile_points, 2);
  double min_gap = std::numeric_limits<double>::infinity(), max_gap = 0.0, max_abs = 0.0, mean = 0.0;
  std::size_t worst = 0;
  for (std::size_t j = 0; j < M; ++j) {
    const double s = omega * (j + 0.5) / M;
    const double a = us.sharp(s), b = out.radial.sharp(s);
    out.s.push_back(s);
    out.u_sharp.push_back(a);
    out.v_sharp.push_back(b);
    const double gap = b - a;
    if (gap < min_gap) {
      min_gap = gap;
      worst = j;
    }
    max_gap = std::max(max_gap, gap);
    max_abs = std::max(max_abs, std::abs(gap));
    mean += gap / M;
  }
  const double vmax = out.radial.v.front();
  const double tol = grid_tolerance(opt.c_grid, g.h, vmax);
  out.report = make_inequality("talenti", out.v_sharp[worst], out.u_sharp[worst], tol);
  out.report.params = {{"lambda", lambda}, {"p", 2.0}, {"n", n}, {"h", g.h}};
  Json& md = out.report.metadata;
  md["obstacle"] = g.obstacle.descriptor();
  md["domain_volume"] = omega;
  md["cap_radius"] = r;
  md["worst_s"] = out.s[worst];
  md["min_gap"] = min_gap;
  md["max_gap"] = max_gap;
  md["mean_gap"] = mean;
  md["solver_iterations"] = out.solution.iterations;
  md["solver_residual"] = out.solution.residual;

  // Norm corollaries of the profile comparison.
  bool norms_ok = true;
  Json norms = Json::object();
  for (double q : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    const double lu = field_norm(g, u, q), lv = radial_norm(out.radial, q, false);
    const double allowance = std::isinf(q) ? tol : tol * std::pow(omega, 1.0 / q);
    const bool ok = lu <= lv + allowance;
    norms_ok = norms_ok && ok;
    norms[std::isinf(q) ? "inf" : fmt::format("{}", q)] = {{"u", lu}, {"v", lv}, {"ok", ok}};
  }
  Json grad_norms = Json::object();
  for (double q : {1.0, 2.0}) {
    const double lu = std::pow(gradient_energy(g, u, gauge, q), 1.0 / q);
    const double lv = radial_norm(out.radial, q, true);
    const bool ok = lu <= lv * (1.0 + opt.c_grid * g.h);
    norms_ok = norms_ok && ok;
    grad_norms[fmt::format("{}", q)] = {{"u", lu}, {"v", lv}, {"ok", ok}};
  }
  md["norms"] = norms;
  md["gradient_norms"] = grad_norms;
  md["norm_corollaries_hold"] = norms_ok;
  md["chain_consistent"] = !out.report.passed || norms["2"]["ok"].get<bool>();
  const bool near = max_abs < 5.0 * tol;
  md["rigidity_candidate"] = near;
  if (near) md["rigidity_note"] = "domain isometric to a cap on a facet";
  return out;
}

BosselDanersResult bossel_daners_compare(const MaskedGrid& g, const GaugeDescriptor& gauge,
                                         const BosselDanersOptions& opt) {
  const int n = g.dim;
  const double lambda = gauge.lambda();
  BosselDanersResult out;
  out.domain = first_eigenvalue(g, gauge, opt.eigen);
  out.cap_radius = cap_radius_for_volume(g.volume(), lambda, n);
  const MaskedGrid cap = build_cap_grid(lambda, n, out.cap_radius, g.h);
  out.cap = first_eigenvalue(cap, GaugeDescriptor::capillary(lambda, n), opt.eigen);
  const double rhs = out.cap.eigenvalue;
  out.report = make_inequality("bossel_daners", out.domain.eigenvalue, rhs, grid_tolerance(opt.c_grid, g.h, rhs));
  out.report.params = {{"lambda", lambda}, {"p", 2.0}, {"n", n}, {"h", g.h}};
  Json& md = out.report.metadata;
  md["obstacle"] = g.obstacle.descriptor();
  md["domain_volume"] = g.volume();
  md["cap_volume"] = cap.volume();
  md["cap_radius"] = out.cap_radius;
  md["domain_iterations"] = out.domain.iterations;
  md["cap_iterations"] = out.cap.iterations;
  out.report.flag_rigidity("cap on a facet");
  return out;
}

}  // namespace capsym
