#include "capsym/kernels.hpp"

#include <atomic>
#include <cmath>

namespace capsym {

namespace {
std::atomic<Backend> g_backend{Backend::Parallel};
}

Backend default_backend() { return g_backend.load(); }
void set_default_backend(Backend b) { g_backend.store(b); }

DriftSamples DriftSamples::from_gauge(const MaskedGrid& g, const GaugeDescriptor& gauge) {
  if (gauge.dim() != g.dim) throw InvalidInput("gauge and grid differ in dimension");
  DriftSamples d;
  d.n = g.dim;
  if (gauge.constant_drift()) {
    gauge.drift_at(nullptr, d.a.data());
    return d;
  }
  d.uniform = false;
  d.per_slot.resize(g.domain.size() * d.n);
  for (std::size_t k = 0; k < g.domain.size(); ++k) {
    const Point x = g.center(g.domain[k]);
    gauge.drift_at(x.data(), d.per_slot.data() + k * d.n);
  }
  return d;
}

double DriftSamples::sup_norm() const {
  if (uniform) return norm(a.data(), n);
  double m = 0.0;
  for (std::size_t k = 0; k * n < per_slot.size(); ++k) m = std::max(m, norm(per_slot.data() + k * n, n));
  return m;
}

void central_gradient(const MaskedGrid& g, const double* u, int cell, double* grad) {
  const double uc = u[cell];
  for (int a = 0; a < g.dim; ++a) {
    double v[2];
    bool have[2];
    for (int s = 0; s < 2; ++s) {
      const int m = g.neighbor(cell, a, s == 0 ? -1 : 1);
      if (m < 0 || g.cls[m] == CellClass::Exterior) {
        v[s] = 0.0;
        have[s] = true;
      } else if (g.cls[m] == CellClass::Obstacle) {
        v[s] = 0.0;
        have[s] = false;
      } else {
        v[s] = u[m];
        have[s] = true;
      }
    }
    if (have[0] && have[1])
      grad[a] = (v[1] - v[0]) / (2.0 * g.h);
    else if (have[1])
      grad[a] = (v[1] - uc) / g.h;
    else if (have[0])
      grad[a] = (uc - v[0]) / g.h;
    else
      grad[a] = 0.0;
  }
}

double gradient_energy(const MaskedGrid& g, const std::vector<double>& u, const DriftSamples& drift, double p,
                       Backend backend) {
  if (!(p >= 1.0)) throw InvalidInput("exponent p must be at least 1");
  if (u.size() != g.size()) throw InvalidInput("field does not match grid");
  const int n = g.dim;
  const double w = g.cell_volume();
  const bool square = p == 2.0;
  auto term = [&](std::size_t k) {
    double grad[3], ng[3];
    central_gradient(g, u.data(), g.domain[k], grad);
    for (int a = 0; a < n; ++a) ng[a] = -grad[a];
    const double f = gk::value(ng, drift.at(k), n);
    return w * (square ? f * f : (p == 1.0 ? f : std::pow(f, p)));
  };
  return blocked_sum(g.domain.size(), term, backend);
}

double gradient_energy(const MaskedGrid& g, const std::vector<double>& u, const GaugeDescriptor& gauge,
                       double p) {
  return gradient_energy(g, u, DriftSamples::from_gauge(g, gauge), p, default_backend());
}

SolverStencil SolverStencil::build(const MaskedGrid& g, const DriftSamples& drift) {
  SolverStencil s;
  s.n = g.dim;
  s.h = g.h;
  s.drift = drift;
  s.cell = g.domain;
  std::vector<int> slot_of(g.size(), -1);
  for (std::size_t k = 0; k < g.domain.size(); ++k) slot_of[g.domain[k]] = static_cast<int>(k);
  s.unknown.assign(g.domain.size(), -1);
  for (std::size_t k = 0; k < g.domain.size(); ++k) {
    if (g.cls[g.domain[k]] == CellClass::Dirichlet) continue;
    s.unknown[k] = static_cast<int>(s.unknown_slot.size());
    s.unknown_slot.push_back(static_cast<int>(k));
  }
  s.nb.resize(g.domain.size());
  for (std::size_t k = 0; k < g.domain.size(); ++k) {
    auto& row = s.nb[k];
    row.fill(-1);
    for (int a = 0; a < g.dim; ++a)
      for (int side = 0; side < 2; ++side) {
        const int m = g.neighbor(g.domain[k], a, side == 0 ? -1 : 1);
        int code = -1;
        if (m >= 0) {
          if (g.cls[m] == CellClass::Obstacle)
            code = -2;
          else if (g.in_domain(m))
            code = slot_of[m];
        }
        row[2 * a + side] = code;
      }
  }
  return s;
}

std::vector<double> SolverStencil::to_field(const MaskedGrid& g, const double* x) const {
  std::vector<double> u(g.size(), 0.0);
  for (std::size_t j = 0; j < unknown_slot.size(); ++j) u[cell[unknown_slot[j]]] = x[j];
  return u;
}

std::vector<double> SolverStencil::from_field(const std::vector<double>& u) const {
  std::vector<double> x(unknown_slot.size());
  for (std::size_t j = 0; j < unknown_slot.size(); ++j) x[j] = u[cell[unknown_slot[j]]];
  return x;
}

double stencil_energy(const SolverStencil& s, const double* x, double* grad, double p, double eps,
                      Backend backend) {
  const int n = s.n;
  const double h = s.h;
  const double w = std::pow(h, n);
  const int combos = 1 << n;
  const double cw = w / combos;
  const std::size_t S = s.slots();
  std::vector<double> q;
  if (grad) q.assign(S * 2 * n, 0.0);
  const bool square = p == 2.0;

  auto slot_value = [&](int slot) {
    const int j = s.unknown[slot];
    return j >= 0 ? x[j] : 0.0;
  };

  auto term = [&](std::size_t k) {
    const auto& row = s.nb[k];
    const double vc = slot_value(static_cast<int>(k));
    double d[3][2];
    int use[3][2];  // which difference each combo side uses (0 minus, 1 plus)
    for (int a = 0; a < n; ++a) {
      bool have[2];
      double diff[2];
      for (int side = 0; side < 2; ++side) {
        const int code = row[2 * a + side];
        have[side] = code != -2;
        const double v = code >= 0 ? slot_value(code) : 0.0;
        diff[side] = side == 1 ? (v - vc) / h : (vc - v) / h;
      }
      for (int side = 0; side < 2; ++side) {
        // A missing (obstacle) side contributes a zero difference, which
        // reproduces the reflected Neumann stencil for the Euclidean case.
        use[a][side] = have[side] ? side : -1;
        d[a][side] = have[side] ? diff[side] : 0.0;
      }
    }
    const double* av = s.drift.at(k);
    double e = 0.0;
    for (int c = 0; c < combos; ++c) {
      double gv[3];
      double gg = 0.0, ag = 0.0;
      for (int a = 0; a < n; ++a) {
        gv[a] = d[a][(c >> a) & 1];
        gg += gv[a] * gv[a];
        ag += av[a] * gv[a];
      }
      const double root = std::sqrt(gg);
      const double F = root - ag;
      const double F2 = F * F + eps * eps;
      double Fp_over_p, coef;
      if (square) {
        Fp_over_p = 0.5 * F2;
        coef = F;
      } else if (F2 > 0.0) {
        const double Fe = std::sqrt(F2);
        Fp_over_p = std::pow(Fe, p) / p;
        coef = std::pow(Fe, p - 2.0) * F;
      } else {
        Fp_over_p = 0.0;
        coef = 0.0;
      }
      e += Fp_over_p;
      if (grad && coef != 0.0 && root > 0.0) {
        for (int a = 0; a < n; ++a) {
          const int src = use[a][(c >> a) & 1];
          if (src < 0) continue;
          q[(k * n + a) * 2 + src] += cw * coef * (gv[a] / root - av[a]);
        }
      }
    }
    return cw * e;
  };
  const double E = blocked_sum(S, term, backend);
  if (grad) {
    const std::size_t U = s.unknowns();
    auto gather = [&](std::size_t j) {
      const int k = s.unknown_slot[j];
      const auto& row = s.nb[k];
      double gsum = 0.0;
      for (int a = 0; a < n; ++a) {
        gsum += (q[(k * n + a) * 2 + 0] - q[(k * n + a) * 2 + 1]) / h;
        const int m = row[2 * a + 0];
        if (m >= 0) gsum += q[(static_cast<std::size_t>(m) * n + a) * 2 + 1] / h;
        const int pnb = row[2 * a + 1];
        if (pnb >= 0) gsum -= q[(static_cast<std::size_t>(pnb) * n + a) * 2 + 0] / h;
      }
      grad[j] = gsum;
    };
    const long long UL = static_cast<long long>(U);
    if (backend == Backend::Parallel) {
#pragma omp parallel for schedule(static)
      for (long long j = 0; j < UL; ++j) gather(static_cast<std::size_t>(j));
    } else {
      for (std::size_t j = 0; j < U; ++j) gather(j);
    }
  }
  return E;
}

std::vector<double> stencil_diagonal(const SolverStencil& s) {
  const int n = s.n;
  const double h = s.h;
  const double w = std::pow(h, n);
  const std::size_t S = s.slots();
  // Weight of the minus/plus difference in each slot's combo average.
  std::vector<double> om(S * 2 * n, 0.0);
  for (std::size_t k = 0; k < S; ++k)
    for (int a = 0; a < n; ++a) {
      const bool hm = s.nb[k][2 * a] != -2, hp = s.nb[k][2 * a + 1] != -2;
      const double wm = hm ? 0.5 : 0.0, wp = hp ? 0.5 : 0.0;
      om[(k * n + a) * 2] = wm;
      om[(k * n + a) * 2 + 1] = wp;
    }
  std::vector<double> diag(s.unknowns(), 0.0);
  for (std::size_t j = 0; j < s.unknowns(); ++j) {
    const int k = s.unknown_slot[j];
    double v = 0.0;
    for (int a = 0; a < n; ++a) {
      v += om[(k * n + a) * 2] + om[(k * n + a) * 2 + 1];
      const int m = s.nb[k][2 * a], pn = s.nb[k][2 * a + 1];
      if (m >= 0) v += om[(static_cast<std::size_t>(m) * n + a) * 2 + 1];
      if (pn >= 0) v += om[(static_cast<std::size_t>(pn) * n + a) * 2];
    }
    diag[j] = w * v / (h * h);
  }
  return diag;
}

}  // namespace capsym
