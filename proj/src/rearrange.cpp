#include "capsym/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

#include "capsym/kernels.hpp"
#include "capsym/surface.hpp"

namespace capsym {

namespace {

std::vector<double> domain_values(const MaskedGrid& g, const Field& u) {
  if (u.size() != g.size()) throw InvalidInput("field does not match grid");
  std::vector<double> v;
  v.reserve(g.domain.size());
  for (int c : g.domain) v.push_back(u[c]);
  return v;
}

void require_nonnegative(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput("field must be finite");
    if (x < 0.0) throw InvalidInput("field must be non-negative");
  }
}

std::vector<double> quantile_levels(const std::vector<double>& ascending, int count) {
  std::vector<double> lv;
  lv.reserve(count);
  const std::size_t N = ascending.size();
  for (int i = 0; i < count; ++i) {
    const std::size_t k = static_cast<std::size_t>(std::llround(static_cast<double>(i) * (N - 1) / (count - 1)));
    lv.push_back(ascending[k]);
  }
  lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
  return lv;
}

LevelProfile profile_from_sorted(const std::vector<double>& ascending, const std::vector<double>& levels, double v,
                                 double total) {
  LevelProfile p;
  p.total_volume = total;
  p.thresholds = levels;
  std::sort(p.thresholds.begin(), p.thresholds.end());
  for (double t : p.thresholds) {
    const auto above = ascending.end() - std::upper_bound(ascending.begin(), ascending.end(), t);
    p.measures.push_back(static_cast<double>(above) * v);
  }
  return p;
}

}  // namespace

LevelProfile distribution(const MaskedGrid& g, const Field& u, const std::vector<double>* levels) {
  if (g.domain.empty()) throw InvalidInput("empty grid");
  std::vector<double> v = domain_values(g, u);
  require_nonnegative(v);
  std::sort(v.begin(), v.end());
  const std::vector<double> lv = levels ? *levels : quantile_levels(v, 512);
  return profile_from_sorted(v, lv, g.cell_volume(), g.volume());
}

double RadialProfile::sharp(double s) const {
  if (values.empty() || s < 0.0) return values.empty() ? 0.0 : values.front();
  const double k = std::floor(s / cell_volume);
  if (k >= static_cast<double>(values.size())) return 0.0;
  return values[static_cast<std::size_t>(k)];
}

double RadialProfile::sharp_linear(double s) const {
  if (values.empty()) return 0.0;
  if (s > total_volume) return 0.0;
  const double pos = s / cell_volume - 0.5;
  if (pos <= 0.0) return values.front();
  const std::size_t N = values.size();
  if (pos >= static_cast<double>(N - 1)) return values.back();
  const std::size_t k = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(k);
  return (1.0 - w) * values[k] + w * values[k + 1];
}

double RadialProfile::eval(const double* x) const {
  const double rho = cap_coordinate(x, n, lambda);
  return sharp_linear(kappa * std::pow(rho, n));
}

double RadialProfile::norm(double q) const {
  if (values.empty()) return 0.0;
  if (std::isinf(q)) return values.front();
  double s = 0.0;
  for (double v : values) s += std::pow(v, q);
  return std::pow(s * cell_volume, 1.0 / q);
}

double RadialProfile::cumulative(double s) const {
  if (s <= 0.0) return 0.0;
  double acc = 0.0;
  const double full = std::floor(s / cell_volume);
  const std::size_t K = static_cast<std::size_t>(std::min(full, static_cast<double>(values.size())));
  for (std::size_t k = 0; k < K; ++k) acc += values[k];
  acc *= cell_volume;
  if (K < values.size()) acc += values[K] * (s - static_cast<double>(K) * cell_volume);
  return acc;
}

LevelProfile RadialProfile::distribution(const std::vector<double>& levels) const {
  std::vector<double> asc(values.rbegin(), values.rend());
  return profile_from_sorted(asc, levels, cell_volume, total_volume);
}

RadialProfile decreasing_rearrangement(const MaskedGrid& g, const Field& f) {
  std::vector<double> v = domain_values(g, f);
  require_nonnegative(v);
  std::sort(v.begin(), v.end(), std::greater<>());
  RadialProfile p;
  p.n = g.dim;
  p.cell_volume = g.cell_volume();
  p.total_volume = g.volume();
  p.kappa = cap_constant(0.0, g.dim);
  p.r_max = cap_radius_for_volume(p.total_volume, 0.0, g.dim);
  p.values = std::move(v);
  return p;
}

RadialProfile capillary_symmetrize(const MaskedGrid& g, const Field& u, double lambda) {
  check_lambda(lambda);
  RadialProfile p = decreasing_rearrangement(g, u);
  p.lambda = lambda;
  p.kappa = cap_constant(lambda, g.dim);
  p.r_max = cap_radius_for_volume(p.total_volume, lambda, g.dim);
  return p;
}

Field sample_profile(const MaskedGrid& cap_grid, const RadialProfile& profile) {
  if (cap_grid.dim != profile.n) throw InvalidInput("profile and grid differ in dimension");
  Field u(cap_grid.size(), 0.0);
  for (int c : cap_grid.domain) {
    if (cap_grid.cls[c] == CellClass::Dirichlet) continue;
    const Point x = cap_grid.center(c);
    u[c] = profile.eval(x.data());
  }
  return u;
}

double field_norm(const MaskedGrid& g, const Field& u, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (int c : g.domain) m = std::max(m, std::abs(u[c]));
    return m;
  }
  double s = 0.0;
  for (int c : g.domain) s += std::pow(std::abs(u[c]), q);
  return std::pow(s * g.cell_volume(), 1.0 / q);
}

// ---------------------------------------------------------------- co-area

namespace {

// P(sum_i a_i U_i > tau) for independent U_i uniform on [-1/2, 1/2].
double uniform_sum_tail(const double* a, int n, double tau) {
  double b[3];
  int m = 0;
  double amax = 0.0;
  for (int i = 0; i < n; ++i) amax = std::max(amax, std::abs(a[i]));
  double half = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ai = std::abs(a[i]);
    if (ai > 1e-4 * amax) {
      b[m++] = ai;
      half += 0.5 * ai;
    }
  }
  if (m == 0) return tau < 0.0 ? 1.0 : 0.0;
  const double x = tau + half;  // CDF argument for sum of b_i V_i, V_i in [0,1]
  double total = half * 2.0;
  if (x <= 0.0) return 1.0;
  if (x >= total) return 0.0;
  double fact = 1.0, prod = 1.0;
  for (int i = 0; i < m; ++i) {
    fact *= (i + 1);
    prod *= b[i];
  }
  double cdf = 0.0;
  for (int S = 0; S < (1 << m); ++S) {
    double shift = 0.0;
    int bits = 0;
    for (int i = 0; i < m; ++i)
      if ((S >> i) & 1) {
        shift += b[i];
        ++bits;
      }
    const double z = x - shift;
    if (z > 0.0) cdf += ((bits & 1) ? -1.0 : 1.0) * std::pow(z, m);
  }
  cdf /= fact * prod;
  return 1.0 - std::clamp(cdf, 0.0, 1.0);
}

// Central differences of a sampled field over the whole grid.
std::vector<double> full_gradient(const MaskedGrid& g, const Field& u) {
  const int n = g.dim;
  std::vector<double> gr(g.size() * n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c < g.size(); ++c) {
    for (int a = 0; a < n; ++a) {
      const int lo = g.neighbor(static_cast<int>(c), a, -1), hi = g.neighbor(static_cast<int>(c), a, 1);
      if (lo >= 0 && hi >= 0)
        gr[c * n + a] = (u[hi] - u[lo]) / (2.0 * g.h);
      else if (hi >= 0)
        gr[c * n + a] = (u[hi] - u[c]) / g.h;
      else if (lo >= 0)
        gr[c * n + a] = (u[c] - u[lo]) / g.h;
    }
  }
  return gr;
}

void interp_gradient(const MaskedGrid& g, const std::vector<double>& gr, const double* x, double* out) {
  const int n = g.dim;
  int i0[3] = {0, 0, 0};
  double w[3] = {0, 0, 0};
  for (int a = 0; a < n; ++a) {
    const double f = (x[a] - g.origin[a]) / g.h - 0.5;
    i0[a] = std::clamp(static_cast<int>(std::floor(f)), 0, g.dims[a] - 2);
    w[a] = std::clamp(f - i0[a], 0.0, 1.0);
  }
  for (int a = 0; a < n; ++a) out[a] = 0.0;
  for (int b = 0; b < (1 << n); ++b) {
    double wt = 1.0;
    int ii[3] = {i0[0], i0[1], i0[2]};
    for (int a = 0; a < n; ++a) {
      const int bit = (b >> a) & 1;
      ii[a] += bit;
      wt *= bit ? w[a] : 1.0 - w[a];
    }
    const int c = g.index(ii[0], ii[1], n == 3 ? ii[2] : 0);
    for (int a = 0; a < n; ++a) out[a] += wt * gr[static_cast<std::size_t>(c) * n + a];
  }
}

int containing_cell(const MaskedGrid& g, const double* x) {
  int c[3] = {0, 0, 0};
  for (int a = 0; a < g.dim; ++a)
    c[a] = std::clamp(static_cast<int>(std::floor((x[a] - g.origin[a]) / g.h)), 0, g.dims[a] - 1);
  return g.index(c[0], c[1], c[2]);
}

}  // namespace

CoareaResult coarea_check(const MaskedGrid& g, const Field& u, const GaugeDescriptor& gauge, double p,
                          const CoareaOptions& opt) {
  if (!(p >= 1.0)) throw InvalidInput("exponent p must be at least 1");
  if (u.size() != g.size()) throw InvalidInput("field does not match grid");
  if (opt.levels < 2) throw InvalidInput("co-area check needs at least two levels");
  const int n = g.dim;
  const double v = g.cell_volume();
  const std::vector<double> gr = full_gradient(g, u);
  const DriftSamples drift = DriftSamples::from_gauge(g, gauge);
  double umax = 0.0, gmax = 0.0;
  std::vector<double> weight(g.domain.size());
  for (std::size_t k = 0; k < g.domain.size(); ++k) {
    const int c = g.domain[k];
    umax = std::max(umax, u[c]);
    double ng[3];
    for (int a = 0; a < n; ++a) ng[a] = -gr[static_cast<std::size_t>(c) * n + a];
    gmax = std::max(gmax, norm(ng, n));
    const double F = gk::value(ng, drift.at(k), n);
    weight[k] = std::pow(F, p) * v;
  }

  auto level_integrals = [&](double t, double& energy, double& mu) {
    energy = 0.0;
    mu = 0.0;
    for (std::size_t k = 0; k < g.domain.size(); ++k) {
      const int c = g.domain[k];
      double a[3];
      for (int i = 0; i < n; ++i) a[i] = gr[static_cast<std::size_t>(c) * n + i] * g.h;
      const double frac = uniform_sum_tail(a, n, t - u[c]);
      energy += frac * weight[k];
      mu += frac * v;
    }
  };

  CoareaResult res;
  const double t0 = opt.t_min_fraction * umax, t1 = opt.t_max_fraction * umax;
  const double dt = (t1 - t0) / opt.levels;
  // Level mesh at half steps; derivatives by centred differences.
  std::vector<double> E(2 * opt.levels + 1), M(2 * opt.levels + 1);
  for (int i = 0; i <= 2 * opt.levels; ++i) level_integrals(t0 + 0.5 * dt * i, E[i], M[i]);
  double sum_l = 0.0, sum_r = 0.0, worst = 0.0, worst_mu = 0.0;
  int skipped = 0;
  for (int i = 0; i < opt.levels; ++i) {
    CoareaLevel L;
    L.t = t0 + dt * (i + 0.5);
    L.lhs = -(E[2 * i + 2] - E[2 * i]) / dt;
    L.mu_lhs = -(M[2 * i + 2] - M[2 * i]) / dt;
    const Surface s = extract_level_surface(g, u, L.t);
    const double meas = s.measure();
    double gmin = std::numeric_limits<double>::infinity();
    bool touches = false;
    for (const auto& e : s.elements) {
      double gv[3], ng[3], a[3];
      interp_gradient(g, gr, e.centroid.data(), gv);
      for (int k = 0; k < n; ++k) ng[k] = -gv[k];
      const double gn = norm(gv, n);
      gmin = std::min(gmin, gn);
      const int cell = containing_cell(g, e.centroid.data());
      if (g.cls[cell] == CellClass::Dirichlet || g.cls[cell] == CellClass::Exterior) touches = true;
      if (gn == 0.0) continue;
      gauge.drift_at(e.centroid.data(), a);
      L.rhs += std::pow(gk::value(ng, a, n), p) / gn * e.measure;
      L.mu_rhs += e.measure / gn;
    }
    const double min_measure = 4.0 * std::pow(g.h, n - 1);
    if (meas > 0.0 && meas < min_measure) {
      L.skipped = true;
      L.reason = "surface too short";
    } else if (touches) {
      L.skipped = true;
      L.reason = "level touches the Dirichlet boundary";
    } else if (meas > 0.0 && gmin < 1e-6 * std::max(gmax, 1e-300)) {
      L.skipped = true;
      L.reason = "vanishing gradient";
    }
    if (L.skipped) {
      ++skipped;
    } else {
      sum_l += L.lhs * dt;
      sum_r += L.rhs * dt;
      const double scale = std::max(std::abs(L.rhs), 1e-12);
      worst = std::max(worst, std::abs(L.lhs - L.rhs) / scale);
      worst_mu = std::max(worst_mu, std::abs(L.mu_lhs - L.mu_rhs) / std::max(std::abs(L.mu_rhs), 1e-12));
      if (std::abs(L.rhs) < 1e-12 && std::abs(L.lhs) < 1e-9) worst = std::max(worst, 0.0);
    }
    res.levels.push_back(L);
  }
  res.report = make_identity("coarea", sum_l, sum_r, std::max(opt.rel_tol * std::abs(sum_r), 1e-12));
  res.report.params = {{"p", p}, {"n", n}, {"h", g.h}, {"lambda", gauge.lambda()}};
  res.report.metadata["levels"] = opt.levels;
  res.report.metadata["skipped_levels"] = skipped;
  res.report.metadata["skipped_fraction"] = static_cast<double>(skipped) / opt.levels;
  res.report.metadata["max_level_relative_error"] = worst;
  res.report.metadata["max_mu_relative_error"] = worst_mu;
  return res;
}

// ---------------------------------------------------------------- Polya-Szego

PolyaSzegoResult polya_szego_check(const MaskedGrid& g, const Field& u, double lambda, double p,
                                   std::shared_ptr<const DriftField> drift, const PolyaSzegoOptions& opt) {
  check_lambda(lambda);
  if (!(p >= 1.0)) throw InvalidInput("exponent p must be at least 1");
  if (u.size() != g.size()) throw InvalidInput("field does not match grid");
  double umax = 0.0;
  for (int c : g.domain) {
    if (u[c] < 0.0) throw InvalidInput("field must be non-negative");
    umax = std::max(umax, u[c]);
  }
  for (int c : g.domain)
    if (g.cls[c] == CellClass::Dirichlet && std::abs(u[c]) > 1e-14 * umax)
      throw InvalidInput("field must vanish on Dirichlet cells");
  const GaugeDescriptor obstacle_gauge = GaugeDescriptor::obstacle(lambda, std::move(drift));
  const DriftSamples ds = DriftSamples::from_gauge(g, obstacle_gauge);
  const double lhs = gradient_energy(g, u, ds, p, default_backend());

  PolyaSzegoResult out;
  out.profile = capillary_symmetrize(g, u, lambda);
  const MaskedGrid cap = build_cap_grid(lambda, g.dim, out.profile.r_max, g.h);
  const double mismatch = std::abs(cap.volume() - g.volume()) / g.volume();
  if (mismatch > 0.05)
    throw InvalidInput(fmt::format("cap grid volume differs from |Omega| by {:.2f}%", 100.0 * mismatch));
  const Field ustar = sample_profile(cap, out.profile);
  const GaugeDescriptor cap_gauge = GaugeDescriptor::capillary(lambda, g.dim);
  const double rhs = gradient_energy(cap, ustar, DriftSamples::from_gauge(cap, cap_gauge), p, default_backend());

  // Residual of the anisotropic Neumann condition on contact cells.
  const int n = g.dim;
  double num = 0.0, den = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < g.domain.size(); ++k) {
    const int c = g.domain[k];
    if (g.cls[c] != CellClass::Neumann) continue;
    double gv[3], xi[3], nu[3];
    central_gradient(g, u.data(), c, gv);
    for (int a = 0; a < n; ++a) xi[a] = -gv[a];
    const double r = norm(xi, n);
    if (r == 0.0) continue;
    const Point x = g.center(c);
    g.obstacle.outward_normal(x.data(), nu);
    const double* av = ds.at(k);
    const double F = gk::value(xi, av, n);
    double flux = 0.0;
    for (int a = 0; a < n; ++a) flux += F * (xi[a] / r + av[a]) * (-nu[a]);
    num += flux * flux;
    den += F * F;
    ++count;
  }
  out.neumann_residual = den > 0.0 ? std::sqrt(num / den) : 0.0;

  out.report = make_inequality("polya_szego", lhs, rhs, grid_tolerance(opt.c_grid, g.h, rhs));
  out.report.params = {{"lambda", lambda}, {"p", p}, {"n", n}, {"h", g.h}};
  out.report.metadata["obstacle"] = g.obstacle.descriptor();
  out.report.metadata["domain_volume"] = g.volume();
  out.report.metadata["cap_volume"] = cap.volume();
  out.report.metadata["cap_radius"] = out.profile.r_max;
  out.report.metadata["neumann_residual"] = out.neumann_residual;
  out.report.metadata["neumann_cells"] = count;
  out.report.flag_rigidity("symmetrization fixed point");
  return out;
}

}  // namespace capsym
