#include "capsym/pde.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace capsym {

namespace {

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Objective {
  SolverStencil stencil;
  std::vector<double> load;  // f h^n per unknown
  double p = 2.0;
  double eps = 0.0;
  Backend backend = Backend::Parallel;

  double operator()(const std::vector<double>& x, std::vector<double>* g) const {
    double E = stencil_energy(stencil, x.data(), g ? g->data() : nullptr, p, eps, backend);
    for (std::size_t j = 0; j < x.size(); ++j) E -= load[j] * x[j];
    if (g)
      for (std::size_t j = 0; j < x.size(); ++j) (*g)[j] -= load[j];
    return E;
  }
};

Objective make_objective(const MixedProblem& pr, Backend backend) {
  if (pr.f.size() != pr.grid.size()) throw InvalidInput("source does not match grid");
  if (!(pr.p > 1.0)) throw InvalidInput("exponent p must exceed 1");
  const double eps = pr.eps.value_or(pr.grid.h);
  if (!(eps > 0.0)) throw InvalidInput("regularisation eps must be positive");
  if (pr.grid.count(CellClass::Dirichlet) == 0) throw InvalidInput("mixed problem needs Dirichlet cells");
  for (int c : pr.grid.domain)
    if (!std::isfinite(pr.f[c])) throw InvalidInput("source must be finite");
  Objective ob;
  ob.stencil = SolverStencil::build(pr.grid, DriftSamples::from_gauge(pr.grid, pr.gauge));
  const double w = pr.grid.cell_volume();
  ob.load.resize(ob.stencil.unknowns());
  for (std::size_t j = 0; j < ob.load.size(); ++j)
    ob.load[j] = pr.f[ob.stencil.cell[ob.stencil.unknown_slot[j]]] * w;
  ob.p = pr.p;
  ob.eps = eps;
  ob.backend = backend;
  return ob;
}

}  // namespace

double mixed_energy(const MixedProblem& problem, const Field& u) {
  const Objective ob = make_objective(problem, default_backend());
  return ob(ob.stencil.from_field(u), nullptr);
}

MixedSolution solve_mixed_bvp(const MixedProblem& problem, const SolverOptions& opt) {
  const Objective ob = make_objective(problem, opt.backend);
  const std::size_t U = ob.stencil.unknowns();
  std::vector<double> D = stencil_diagonal(ob.stencil);
  for (double& d : D) d = d > 0.0 ? d : 1.0;
  auto dnorm = [&](const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t j = 0; j < U; ++j) s += g[j] * g[j] / D[j];
    return std::sqrt(s);
  };

  MixedSolution sol;
  std::vector<double> x(U, 0.0), g(U), xn(U), gn(U), d(U);
  double E = ob(x, &g);
  sol.energy_trace.push_back(E);
  const double ref = std::max(dnorm(ob.load), std::numeric_limits<double>::min());
  double res = dnorm(g) / ref;
  if (dnorm(ob.load) == 0.0) res = dnorm(g) == 0.0 ? 0.0 : res;

  std::deque<std::vector<double>> S, Y;
  std::deque<double> RHO;
  double gamma = 1.0;
  int it = 0;
  int stalls = 0;
  while (res > opt.tolerance && it < opt.max_iterations) {
    ++it;
    // Two-loop recursion with diagonal initial matrix gamma D^-1.
    d = g;
    std::vector<double> alpha(S.size());
    for (int k = static_cast<int>(S.size()) - 1; k >= 0; --k) {
      alpha[k] = RHO[k] * dotv(S[k], d);
      for (std::size_t j = 0; j < U; ++j) d[j] -= alpha[k] * Y[k][j];
    }
    for (std::size_t j = 0; j < U; ++j) d[j] *= gamma / D[j];
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double beta = RHO[k] * dotv(Y[k], d);
      for (std::size_t j = 0; j < U; ++j) d[j] += (alpha[k] - beta) * S[k][j];
    }
    for (double& v : d) v = -v;
    double gd = dotv(g, d);
    if (!(gd < 0.0)) {
      S.clear();
      Y.clear();
      RHO.clear();
      for (std::size_t j = 0; j < U; ++j) d[j] = -gamma * g[j] / D[j];
      gd = dotv(g, d);
    }

    // Backtracking with an Armijo test; inside the round-off band of E the
    // step is accepted when the slope along d has not changed sign.
    double step = 1.0;
    bool accepted = false;
    double En = E;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t j = 0; j < U; ++j) xn[j] = x[j] + step * d[j];
      En = ob(xn, &gn);
      const double band = 1e-13 * std::max(std::abs(E), 1e-300);
      if (En <= E + 1e-4 * step * gd) {
        accepted = true;
        break;
      }
      if (std::abs(En - E) <= band && dotv(gn, d) <= 0.5 * std::abs(gd)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!S.empty()) {
        S.clear();
        Y.clear();
        RHO.clear();
        gamma = 1.0;
        if (++stalls < 5) continue;
      }
      break;
    }
    if (En > E + 1e-12 * std::max(std::abs(E), 1e-300))
      throw SolverError(fmt::format("energy increased from {:.17g} to {:.17g}", E, En));

    std::vector<double> s(U), y(U);
    for (std::size_t j = 0; j < U; ++j) {
      s[j] = xn[j] - x[j];
      y[j] = gn[j] - g[j];
    }
    const double sy = dotv(s, y);
    if (sy > 1e-300) {
      double yDy = 0.0;
      for (std::size_t j = 0; j < U; ++j) yDy += y[j] * y[j] / D[j];
      gamma = sy / yDy;
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      RHO.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opt.memory) {
        S.pop_front();
        Y.pop_front();
        RHO.pop_front();
      }
    }
    x.swap(xn);
    g.swap(gn);
    E = En;
    sol.energy_trace.push_back(E);
    res = dnorm(g) / ref;
  }
  sol.iterations = it;
  sol.residual = res;
  sol.energy = E;
  if (res > opt.tolerance)
    throw SolverError(fmt::format("mixed solver did not converge: residual {:.3e} after {} iterations", res, it));
  spdlog::debug("mixed solve: {} iterations, residual {:.3e}", it, res);
  sol.u = ob.stencil.to_field(problem.grid, x.data());
  return sol;
}

// ---------------------------------------------------------------- profiles

SharpFunction SharpFunction::constant(double c, double total) {
  if (c < 0.0) throw InvalidInput("profile must be non-negative");
  SharpFunction f;
  f.value = [c, total](double s) { return s < total ? c : 0.0; };
  f.total = total;
  return f;
}

SharpFunction SharpFunction::step(double c, double width, double total) {
  if (c < 0.0) throw InvalidInput("profile must be non-negative");
  SharpFunction f;
  f.value = [c, width](double s) { return s < width ? c : 0.0; };
  if (width > 0.0 && width < total) f.knots = {width};
  f.total = total;
  return f;
}

SharpFunction SharpFunction::staircase(std::vector<double> values, double cell_volume) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] < 0.0) throw InvalidInput("profile must be non-negative");
    if (k > 0 && values[k] > values[k - 1]) throw InvalidInput("profile must be non-increasing");
  }
  SharpFunction f;
  f.total = static_cast<double>(values.size()) * cell_volume;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] != values[k - 1]) f.knots.push_back(static_cast<double>(k) * cell_volume);
  f.value = [vals = std::move(values), cell_volume](double s) {
    if (s < 0.0) return vals.empty() ? 0.0 : vals.front();
    const double k = std::floor(s / cell_volume);
    return k < static_cast<double>(vals.size()) ? vals[static_cast<std::size_t>(k)] : 0.0;
  };
  return f;
}

SharpFunction SharpFunction::piecewise_linear(std::vector<double> s, std::vector<double> v) {
  if (s.size() != v.size() || s.size() < 2) throw InvalidInput("piecewise profile needs matching knots");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < 0.0) throw InvalidInput("profile must be non-negative");
    if (k > 0 && (v[k] > v[k - 1] || s[k] <= s[k - 1])) throw InvalidInput("profile must be non-increasing");
  }
  SharpFunction f;
  f.total = s.back();
  f.knots.assign(s.begin() + 1, s.end() - 1);
  f.value = [s, v](double x) {
    if (x <= s.front()) return v.front();
    if (x >= s.back()) return 0.0;
    const auto it = std::upper_bound(s.begin(), s.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - s.begin()) - 1;
    const double w = (x - s[k]) / (s[k + 1] - s[k]);
    return (1.0 - w) * v[k] + w * v[k + 1];
  };
  return f;
}

namespace {

// Gauss-Kronrod 7/15 pair on [-1, 1].
constexpr double kXk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.0};
constexpr double kWk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double gk15(const std::function<double(double)>& f, double a, double b, double* err, double* fmax) {
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  const double f0 = f(c);
  double k = kWk[7] * f0, g = kWg[3] * f0, m = std::abs(f0);
  for (int j = 0; j < 7; ++j) {
    const double f1 = f(c - hw * kXk[j]), f2 = f(c + hw * kXk[j]);
    k += kWk[j] * (f1 + f2);
    if (j % 2 == 1) g += kWg[j / 2] * (f1 + f2);
    m = std::max({m, std::abs(f1), std::abs(f2)});
  }
  *err = std::abs(k - g) * hw;
  *fmax = m;
  return k * hw;
}

double gk_adaptive(const std::function<double(double)>& f, double a, double b, double v, double err, double tol,
                   int depth) {
  if (depth == 0 || err <= tol) return v;
  const double m = 0.5 * (a + b);
  double el, er, fl, fr;
  const double vl = gk15(f, a, m, &el, &fl);
  const double vr = gk15(f, m, b, &er, &fr);
  // The K15 estimate is far better than |K - G|, so stop once the halves agree with the parent.
  if (std::abs(vl + vr - v) <= tol) return vl + vr;
  return gk_adaptive(f, a, m, vl, el, 0.5 * tol, depth - 1) + gk_adaptive(f, m, b, vr, er, 0.5 * tol, depth - 1);
}

double gk_integrate(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  double err, fmax;
  const double v = gk15(f, a, b, &err, &fmax);
  const double tol = std::max(1e-14 * std::abs(v), 1e-16 * (b - a) * fmax);
  return gk_adaptive(f, a, b, v, err, tol, 30);
}

}  // namespace

void SharpFunction::prepare() {
  if (!knot_integral.empty()) return;
  knot_integral.assign(knots.size() + 2, 0.0);
  double prev = 0.0, acc = 0.0;
  for (std::size_t k = 0; k <= knots.size(); ++k) {
    const double next = k < knots.size() ? knots[k] : total;
    acc += gk_integrate(value, prev, next);
    knot_integral[k + 1] = acc;
    prev = next;
  }
}

double SharpFunction::integral(double xi) const {
  if (xi <= 0.0) return 0.0;
  if (knot_integral.empty()) throw InvalidInput("profile integrals not prepared");
  if (xi >= total) return knot_integral.back();
  const std::size_t k = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), xi) - knots.begin());
  const double start = k == 0 ? 0.0 : knots[k - 1];
  return knot_integral[k] + gk_integrate(value, start, xi);
}

RadialSolution solve_radial_ode(SharpFunction f, double r, double lambda, int n) {
  check_lambda(lambda);
  if (!(r > 0.0)) throw InvalidInput("radius must be positive");
  if (n < 2) throw InvalidInput("dimension must be at least 2");
  for (double s : {0.0, 0.5 * f.total})
    if (f.value(s) < 0.0) throw InvalidInput("profile must be non-negative");
  f.prepare();
  RadialSolution out;
  out.r = r;
  out.lambda = lambda;
  out.n = n;
  out.kappa = cap_constant(lambda, n);
  const double kappa = out.kappa;

  std::vector<double>& rho = out.rho;
  const int uniform = 2048;
  for (int i = 0; i < uniform; ++i) rho.push_back(r * i / (uniform - 1));
  for (int k = 11; k <= 40; ++k) rho.push_back(r * std::ldexp(1.0, -k));
  if (f.knots.size() <= 200000)
    for (double xi : f.knots) {
      const double t = std::pow(xi / kappa, 1.0 / n);
      if (t > 0.0 && t < r) rho.push_back(t);
    }
  std::sort(rho.begin(), rho.end());
  rho.erase(std::unique(rho.begin(), rho.end()), rho.end());

  const std::size_t M = rho.size();
  auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    return f.integral(kappa * std::pow(t, n)) / (n * kappa * std::pow(t, n - 1));
  };
  out.G.resize(M);
  out.dv.resize(M);
  out.v.assign(M, 0.0);
  out.s.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    out.s[i] = kappa * std::pow(rho[i], n);
    out.G[i] = f.integral(out.s[i]);
    out.dv[i] = rho[i] > 0.0 ? -out.G[i] / (n * kappa * std::pow(rho[i], n - 1)) : 0.0;
  }
  for (std::size_t i = M - 1; i-- > 0;) out.v[i] = out.v[i + 1] + gk_integrate(integrand, rho[i], rho[i + 1]);
  out.v_sharp = out.v;
  return out;
}

double RadialSolution::value(double x) const {
  if (x >= r) return 0.0;
  if (x <= 0.0) return v.front();
  const auto it = std::upper_bound(rho.begin(), rho.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - rho.begin()) - 1;
  const double a = rho[k], b = rho[k + 1], L = b - a;
  const double t = (x - a) / L;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * v[k] + h10 * L * dv[k] + h01 * v[k + 1] + h11 * L * dv[k + 1];
}

double RadialSolution::sharp(double s_x) const {
  if (s_x <= 0.0) return v.front();
  return value(std::pow(s_x / kappa, 1.0 / n));
}

double RadialSolution::at(const double* x) const { return value(cap_coordinate(x, n, lambda)); }

TalentiProfile talenti_upper_profile(SharpFunction f, double omega, double lambda, int n,
                                     const std::vector<double>* s_mesh) {
  check_lambda(lambda);
  if (!(omega > 0.0)) throw InvalidInput("domain volume must be positive");
  f.prepare();
  TalentiProfile out;
  out.omega = omega;
  out.lambda = lambda;
  out.n = n;
  const double kappa = cap_constant(lambda, n);
  std::vector<double>& s = out.s;
  if (s_mesh) {
    s = *s_mesh;
  } else {
    for (int i = 0; i <= 2048; ++i) s.push_back(omega * i / 2048.0);
  }
  s.push_back(omega);
  for (double k : f.knots)
    if (k < omega) s.push_back(k);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  while (!s.empty() && s.back() > omega) s.pop_back();

  const double c = 1.0 / ((n * std::pow(kappa, 1.0 / n)) * (n * std::pow(kappa, 1.0 / n)));
  const double e = 2.0 / n - 2.0;
  // On [0, s1] substitute xi = s1 w^m with m = n/2, which turns xi^e G(xi) dxi into m s1^(e+2) (G/xi) dw.
  auto integrand = [&](double xi) { return std::pow(xi, e) * f.integral(xi); };
  const double m = 0.5 * n;
  out.values.assign(s.size(), 0.0);
  for (std::size_t i = s.size() - 1; i-- > 0;) {
    double seg = 0.0;
    if (s[i] > 0.0) {
      seg = gk_integrate(integrand, s[i], s[i + 1]);
    } else if (s[i + 1] > 0.0) {
      const double s1 = s[i + 1];
      auto smooth = [&](double w) {
        const double xi = s1 * std::pow(w, m);
        return xi > 0.0 ? f.integral(xi) / xi : f.value(0.0);
      };
      seg = m * std::pow(s1, e + 2.0) * gk_integrate(smooth, 0.0, 1.0);
    }
    out.values[i] = out.values[i + 1] + c * seg;
  }
  return out;
}

double TalentiProfile::eval(double x) const {
  if (x >= omega) return 0.0;
  if (x <= s.front()) return values.front();
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - s.begin()) - 1;
  const double w = (x - s[k]) / (s[k + 1] - s[k]);
  return (1.0 - w) * values[k] + w * values[k + 1];
}

// ---------------------------------------------------------------- eigenvalue

double rayleigh_quotient(const MaskedGrid& g, const GaugeDescriptor& gauge, const Field& u) {
  const SolverStencil st = SolverStencil::build(g, DriftSamples::from_gauge(g, gauge));
  const std::vector<double> x = st.from_field(u);
  const double E = stencil_energy(st, x.data(), nullptr, 2.0, 0.0, default_backend());
  const double m = dotv(x, x) * g.cell_volume();
  if (!(m > 0.0)) throw InvalidInput("Rayleigh quotient of the zero field");
  return 2.0 * E / m;
}

EigenResult first_eigenvalue(const MaskedGrid& g, const GaugeDescriptor& gauge, const EigenOptions& opt) {
  if (g.count(CellClass::Dirichlet) == 0) throw InvalidInput("eigenvalue problem needs Dirichlet cells");
  const SolverStencil st = SolverStencil::build(g, DriftSamples::from_gauge(g, gauge));
  const std::size_t U = st.unknowns();
  if (U == 0) throw InvalidInput("eigenvalue problem has no unknowns");
  const double w = g.cell_volume();

  // Start from the torsion function, which is close to the ground state.
  std::vector<double> x;
  {
    MixedProblem pr;
    pr.grid = g;
    pr.gauge = gauge;
    pr.f.assign(g.size(), 1.0);
    SolverOptions so;
    so.tolerance = 1e-4;
    so.backend = opt.backend;
    x = st.from_field(solve_mixed_bvp(pr, so).u);
  }
  auto normalize = [&](std::vector<double>& v) {
    const double m = std::sqrt(dotv(v, v) * w);
    for (double& a : v) a /= m;
  };
  normalize(x);
  std::vector<double> gE(U), grad(U), xp, gp;
  auto quotient_grad = [&](const std::vector<double>& v, std::vector<double>& gr) {
    const double E = stencil_energy(st, v.data(), gE.data(), 2.0, 0.0, opt.backend);
    const double Q = 2.0 * E;  // v is normalised
    for (std::size_t j = 0; j < U; ++j) gr[j] = 2.0 * gE[j] - 2.0 * Q * w * v[j];
    return Q;
  };
  const std::vector<double> D = stencil_diagonal(st);
  double alpha = 0.25 / *std::max_element(D.begin(), D.end());

  EigenResult out;
  double Q = quotient_grad(x, grad);
  out.history.push_back(Q);
  int it = 0;
  bool converged = false;
  for (it = 1; it <= opt.max_iterations; ++it) {
    xp = x;
    gp = grad;
    for (std::size_t j = 0; j < U; ++j) x[j] -= alpha * grad[j];
    normalize(x);
    Q = quotient_grad(x, grad);
    out.history.push_back(Q);
    double sy = 0.0, ss = 0.0, yy = 0.0;
    for (std::size_t j = 0; j < U; ++j) {
      const double s = x[j] - xp[j], y = grad[j] - gp[j];
      sy += s * y;
      ss += s * s;
      yy += y * y;
    }
    // Alternating Barzilai-Borwein steps.
    if (sy > 0.0) alpha = (it % 2) ? ss / sy : sy / yy;
    const int W = opt.window;
    if (static_cast<int>(out.history.size()) > W) {
      const auto first = out.history.end() - W - 1;
      const double hi = *std::max_element(first, out.history.end());
      const double lo = *std::min_element(first, out.history.end());
      if (hi - lo <= opt.tolerance * std::abs(Q)) {
        converged = true;
        break;
      }
    }
  }
  if (!converged)
    throw SolverError(fmt::format("eigen solver did not converge in {} iterations", opt.max_iterations));
  for (double& a : x) a = std::abs(a);
  normalize(x);
  out.iterations = it;
  out.eigenfunction = st.to_field(g, x.data());
  out.eigenvalue = rayleigh_quotient(g, gauge, out.eigenfunction);
  return out;
}

double poincare_constant(const MaskedGrid& g, const GaugeDescriptor& gauge, const EigenOptions& opt) {
  return 1.0 / first_eigenvalue(g, gauge, opt).eigenvalue;
}

QuotientMinimum minimize_lq_quotient(const MaskedGrid& g, const GaugeDescriptor& gauge, double p, double q,
                                     const Field& start, int max_iterations, double tolerance, Backend backend) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw InvalidInput("quotient exponents must be at least 1");
  const SolverStencil st = SolverStencil::build(g, DriftSamples::from_gauge(g, gauge));
  const std::size_t U = st.unknowns();
  if (U == 0) throw InvalidInput("quotient has no unknowns");
  const double w = g.cell_volume();
  // Tiny smoothing keeps F^(p-2) DF finite where the gradient vanishes (p < 2).
  const double eps = 1e-12;
  auto normalize = [&](std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m += std::pow(std::abs(a), q);
    m = std::pow(m * w, 1.0 / q);
    if (!(m > 0.0)) throw InvalidInput("quotient of the zero field");
    for (double& a : v) a /= m;
  };
  std::vector<double> x = st.from_field(start);
  normalize(x);
  std::vector<double> gE(U), grad(U), xp, gp;
  auto quotient_grad = [&](const std::vector<double>& v, std::vector<double>& gr) {
    const double E = p * stencil_energy(st, v.data(), gE.data(), p, eps, backend);
    for (std::size_t j = 0; j < U; ++j) {
      const double a = std::abs(v[j]);
      const double sgn = v[j] < 0.0 ? -1.0 : 1.0;
      gr[j] = p * gE[j] - p * E * w * sgn * std::pow(a, q - 1.0);
    }
    return E;
  };
  const std::vector<double> D = stencil_diagonal(st);
  double alpha = 0.25 / *std::max_element(D.begin(), D.end());
  QuotientMinimum out;
  double Q = quotient_grad(x, grad);
  std::vector<double> best = x;
  double best_q = Q;
  std::vector<double> hist{Q};
  int it = 0;
  for (it = 1; it <= max_iterations; ++it) {
    xp = x;
    gp = grad;
    for (std::size_t j = 0; j < U; ++j) x[j] -= alpha * grad[j];
    normalize(x);
    Q = quotient_grad(x, grad);
    hist.push_back(Q);
    if (Q < best_q) {
      best_q = Q;
      best = x;
    }
    double sy = 0.0, ss = 0.0, yy = 0.0;
    for (std::size_t j = 0; j < U; ++j) {
      const double s = x[j] - xp[j], y = grad[j] - gp[j];
      sy += s * y;
      ss += s * s;
      yy += y * y;
    }
    if (sy > 0.0) alpha = (it % 2) ? ss / sy : sy / yy;
    if (hist.size() > 21) {
      const auto first = hist.end() - 21;
      const double hi = *std::max_element(first, hist.end());
      const double lo = *std::min_element(first, hist.end());
      if (hi - lo <= tolerance * std::abs(Q)) break;
    }
  }
  for (double& a : best) a = std::abs(a);
  normalize(best);
  out.u = st.to_field(g, best.data());
  out.quotient = p * stencil_energy(st, best.data(), nullptr, p, eps, backend);
  out.iterations = std::min(it, max_iterations);
  return out;
}

}  // namespace capsym
