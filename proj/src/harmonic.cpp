#include "capsym/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "capsym/surface.hpp"

namespace capsym {

HalfSpacePotential::HalfSpacePotential(double lambda, Vec normal, double offset)
    : lambda_(lambda), normal_(std::move(normal)), offset_(offset) {
  check_lambda(lambda);
  const double r = norm(normal_);
  if (!(r > 0.0)) throw InvalidInput("normal vector must be nonzero");
  for (double& c : normal_) c /= r;
  offset_ /= r;
}

double HalfSpacePotential::value(const double* x) const {
  return -lambda_ * (dot(normal_.data(), x, dim()) - offset_);
}

void HalfSpacePotential::gradient(const double*, double* out) const {
  for (int i = 0; i < dim(); ++i) out[i] = -lambda_ * normal_[i];
}

BallPotential::BallPotential(double lambda, double R, Vec center) : lambda_(lambda), R_(R), center_(std::move(center)) {
  check_lambda(lambda);
  if (!(R > 0.0)) throw InvalidInput("ball radius must be positive");
  if (center_.size() < 2) throw InvalidInput("dimension must be at least 2");
}

double BallPotential::value(const double* x) const {
  const int n = dim();
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += (x[i] - center_[i]) * (x[i] - center_[i]);
  const double r = std::sqrt(r2);
  if (n == 2) return -lambda_ * R_ * std::log(r);
  return lambda_ * std::pow(R_, n - 1) * std::pow(r, 2 - n) / (n - 2);
}

void BallPotential::gradient(const double* x, double* out) const {
  const int n = dim();
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += (x[i] - center_[i]) * (x[i] - center_[i]);
  const double r = std::sqrt(r2);
  const double f = -lambda_ * std::pow(R_, n - 1) / std::pow(r, n);
  for (int i = 0; i < n; ++i) out[i] = f * (x[i] - center_[i]);
}

std::shared_ptr<Potential> analytic_h_halfspace(double lambda, int n) {
  Vec nu(n, 0.0);
  nu[n - 1] = 1.0;
  return std::make_shared<HalfSpacePotential>(lambda, nu, 0.0);
}

std::shared_ptr<Potential> analytic_h_ball(double lambda, double R, int n, Vec center) {
  if (center.empty()) center.assign(n, 0.0);
  return std::make_shared<BallPotential>(lambda, R, std::move(center));
}

std::shared_ptr<Potential> analytic_h_for(const ConvexObstacle& obstacle, double lambda) {
  switch (obstacle.kind()) {
    case ConvexObstacle::Kind::HalfSpace:
      return std::make_shared<HalfSpacePotential>(lambda, obstacle.planes()[0].first, obstacle.planes()[0].second);
    case ConvexObstacle::Kind::Ball:
      return std::make_shared<BallPotential>(lambda, obstacle.radius(), obstacle.center());
    case ConvexObstacle::Kind::Polytope:
      return nullptr;
  }
  return nullptr;
}

// ---------------------------------------------------------------- field

int HarmonicField::locate(const double* x) const {
  int c[3] = {0, 0, 0};
  for (int a = 0; a < grid.dim; ++a) {
    c[a] = static_cast<int>(std::floor((x[a] - grid.origin[a]) / grid.h));
    c[a] = std::clamp(c[a], 0, grid.dims[a] - 1);
  }
  const int idx = grid.index(c[0], c[1], c[2]);
  if (grid.in_domain(idx)) return idx;
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int rad = 1; rad <= 3 && best < 0; ++rad) {
    const int kz = grid.dim == 3 ? rad : 0;
    for (int dk = -kz; dk <= kz; ++dk)
      for (int dj = -rad; dj <= rad; ++dj)
        for (int di = -rad; di <= rad; ++di) {
          const int i = c[0] + di, j = c[1] + dj, k = c[2] + dk;
          if (i < 0 || j < 0 || k < 0 || i >= grid.dims[0] || j >= grid.dims[1] || k >= grid.dims[2]) continue;
          const int m = grid.index(i, j, k);
          if (!grid.in_domain(m)) continue;
          const Point p = grid.center(m);
          double d = 0.0;
          for (int a = 0; a < grid.dim; ++a) d += (p[a] - x[a]) * (p[a] - x[a]);
          if (d < best_d) {
            best_d = d;
            best = m;
          }
        }
  }
  return best;
}

void HarmonicField::gradient(const double* x, double* out) const {
  const int c = locate(x);
  for (int a = 0; a < grid.dim; ++a) out[a] = c >= 0 ? grad[static_cast<std::size_t>(c) * grid.dim + a] : 0.0;
}

double HarmonicField::value(const double* x) const {
  const int c = locate(x);
  return c >= 0 ? h[c] : std::numeric_limits<double>::quiet_NaN();
}

double HarmonicField::domain_mean() const {
  double s = 0.0;
  for (int c : grid.domain) s += h[c];
  return grid.domain.empty() ? 0.0 : s / static_cast<double>(grid.domain.size());
}

void HarmonicField::normalize_mean() {
  const double m = domain_mean();
  for (std::size_t c = 0; c < h.size(); ++c)
    if (active[c]) h[c] -= m;
}

// ---------------------------------------------------------------- solver

namespace {

// Fraction of the face between cell c and its +axis neighbour lying outside E.
double face_aperture(const MaskedGrid& g, int c, int axis, int dir, int m) {
  const Point xc = g.center(c);
  Point fc = xc;
  fc[axis] += 0.5 * dir * g.h;
  const double thr = 1e-9 * g.h;
  const double reach = 0.5 * g.h * std::sqrt(static_cast<double>(g.dim - 1)) + thr;
  const double sdc = g.obstacle.signed_distance(fc.data()) - thr;
  if (sdc > reach) return 1.0;
  if (sdc < -reach) return 0.0;
  auto sd_at = [&](const Point& p) { return g.obstacle.signed_distance(p.data()) - thr; };
  if (g.dim == 2) {
    const int b = 1 - axis;
    double frac = 0.0;
    Point p0 = fc, p1 = fc;
    for (int k = 0; k < m; ++k) {
      p0[b] = fc[b] - 0.5 * g.h + g.h * k / m;
      p1[b] = fc[b] - 0.5 * g.h + g.h * (k + 1) / m;
      const double s0 = sd_at(p0), s1 = sd_at(p1);
      if (s0 > 0.0 && s1 > 0.0)
        frac += 1.0;
      else if (s0 > 0.0)
        frac += s0 / (s0 - s1);
      else if (s1 > 0.0)
        frac += s1 / (s1 - s0);
    }
    return frac / m;
  }
  const int b = (axis + 1) % 3, d = (axis + 2) % 3;
  std::vector<double> node((m + 1) * (m + 1));
  Point p = fc;
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i) {
      p[b] = fc[b] - 0.5 * g.h + g.h * i / m;
      p[d] = fc[d] - 0.5 * g.h + g.h * j / m;
      node[j * (m + 1) + i] = sd_at(p);
    }
  auto tri = [](double s0, double s1, double s2) {
    double v[3] = {s0, s1, s2};
    int pos = (v[0] > 0) + (v[1] > 0) + (v[2] > 0);
    if (pos == 3) return 1.0;
    if (pos == 0) return 0.0;
    std::sort(v, v + 3);
    if (pos == 1) return v[2] * v[2] / ((v[2] - v[0]) * (v[2] - v[1]));
    return 1.0 - v[0] * v[0] / ((v[1] - v[0]) * (v[2] - v[0]));
  };
  double frac = 0.0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const double s00 = node[j * (m + 1) + i], s10 = node[j * (m + 1) + i + 1];
      const double s01 = node[(j + 1) * (m + 1) + i], s11 = node[(j + 1) * (m + 1) + i + 1];
      frac += 0.5 * (tri(s00, s10, s11) + tri(s00, s01, s11));
    }
  return frac / (m * m);
}

// Area of the piecewise-linear surface {sd = 0} inside the cell box, from
// marching tetrahedra (3D) or segments (2D) on an m-subdivided lattice.
double wall_area(const MaskedGrid& g, int c, int m) {
  const Point xc = g.center(c);
  const double thr = 1e-9 * g.h;
  const double s = g.h / m;
  auto sd_at = [&](const double* p) { return g.obstacle.signed_distance(p) - thr; };
  if (g.dim == 2) {
    std::vector<double> node((m + 1) * (m + 1));
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        const double p[2] = {xc[0] - 0.5 * g.h + s * i, xc[1] - 0.5 * g.h + s * j};
        node[j * (m + 1) + i] = sd_at(p);
      }
    double area = 0.0;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const double v[4] = {node[j * (m + 1) + i], node[j * (m + 1) + i + 1], node[(j + 1) * (m + 1) + i + 1],
                             node[(j + 1) * (m + 1) + i]};
        const double px[4] = {0, 1, 1, 0}, py[4] = {0, 0, 1, 1};
        for (int t = 0; t < 2; ++t) {
          const int tri[3] = {0, 1 + t, 2 + t};
          double pts[2][2];
          int k = 0;
          for (int e = 0; e < 3 && k < 2; ++e) {
            const int a = tri[e], b = tri[(e + 1) % 3];
            if ((v[a] > 0) != (v[b] > 0)) {
              const double w = v[a] / (v[a] - v[b]);
              pts[k][0] = px[a] + w * (px[b] - px[a]);
              pts[k][1] = py[a] + w * (py[b] - py[a]);
              ++k;
            }
          }
          if (k == 2) area += s * std::hypot(pts[1][0] - pts[0][0], pts[1][1] - pts[0][1]);
        }
      }
    return area;
  }
  const int M = m + 1;
  std::vector<double> node(M * M * M);
  for (int k = 0; k < M; ++k)
    for (int j = 0; j < M; ++j)
      for (int i = 0; i < M; ++i) {
        const double p[3] = {xc[0] - 0.5 * g.h + s * i, xc[1] - 0.5 * g.h + s * j, xc[2] - 0.5 * g.h + s * k};
        node[(k * M + j) * M + i] = sd_at(p);
      }
  static const int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  double area = 0.0;
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        bool pos = false, neg = false;
        for (int b = 0; b < 8; ++b) {
          const double v = node[((k + (b >> 2 & 1)) * M + j + (b >> 1 & 1)) * M + i + (b & 1)];
          (v > 0 ? pos : neg) = true;
        }
        if (!(pos && neg)) continue;
        for (const auto& pr : perm) {
          double P[4][3], V[4];
          int cur[3] = {0, 0, 0};
          for (int q = 0; q < 4; ++q) {
            if (q > 0) cur[pr[q - 1]] = 1;
            for (int a = 0; a < 3; ++a) P[q][a] = cur[a];
            V[q] = node[((k + cur[2]) * M + j + cur[1]) * M + i + cur[0]];
          }
          auto cross = [&](int a, int b, double* X) {
            const double w = V[a] / (V[a] - V[b]);
            for (int t = 0; t < 3; ++t) X[t] = P[a][t] + w * (P[b][t] - P[a][t]);
          };
          auto tri_area = [](const double* A, const double* B, const double* C) {
            const double u[3] = {B[0] - A[0], B[1] - A[1], B[2] - A[2]};
            const double v[3] = {C[0] - A[0], C[1] - A[1], C[2] - A[2]};
            const double cx = u[1] * v[2] - u[2] * v[1], cy = u[2] * v[0] - u[0] * v[2], cz = u[0] * v[1] - u[1] * v[0];
            return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
          };
          int in[4], out[4], ni = 0, no = 0;
          for (int q = 0; q < 4; ++q) (V[q] > 0 ? out[no++] : in[ni++]) = q;
          if (ni == 0 || no == 0) continue;
          double X[4][3];
          if (ni == 1 || no == 1) {
            const int lone = ni == 1 ? in[0] : out[0];
            const int* rest = ni == 1 ? out : in;
            for (int q = 0; q < 3; ++q) cross(lone, rest[q], X[q]);
            area += s * s * tri_area(X[0], X[1], X[2]);
          } else {
            cross(in[0], out[0], X[0]);
            cross(in[0], out[1], X[1]);
            cross(in[1], out[1], X[2]);
            cross(in[1], out[0], X[3]);
            area += s * s * (tri_area(X[0], X[1], X[2]) + tri_area(X[0], X[2], X[3]));
          }
        }
      }
  return area;
}

bool box_leaves_obstacle(const MaskedGrid& g, int c) {
  const Point xc = g.center(c);
  const int corners = 1 << g.dim;
  for (int b = 0; b < corners; ++b) {
    Point p = xc;
    for (int a = 0; a < g.dim; ++a) p[a] += ((b >> a) & 1 ? 0.5 : -0.5) * g.h;
    if (g.obstacle.signed_distance(p.data()) > 1e-9 * g.h) return true;
  }
  return false;
}

}  // namespace

HarmonicField solve_h(const MaskedGrid& grid, double lambda, OuterBC outer_bc, const Potential* analytic,
                      const HarmonicOptions& opt) {
  check_lambda(lambda);
  const int n = grid.dim;
  const std::size_t N = grid.size();
  std::shared_ptr<Potential> own;
  if (outer_bc == OuterBC::MatchAnalytic && !analytic) {
    own = analytic_h_for(grid.obstacle, lambda);
    if (!own) throw InvalidInput("no closed-form potential for this obstacle; use homogeneous Neumann");
    analytic = own.get();
  }

  HarmonicField f;
  f.grid = grid;
  f.lambda = lambda;
  f.active.assign(N, 0);
  for (int c : grid.domain) f.active[c] = 1;
  std::size_t cut = 0;
  // Obstacle cells within one cell (faces, edges or corners) of the domain
  // whose box reaches outside E.
  for (int c : grid.domain) {
    int ijk[3];
    grid.coords(c, ijk);
    const int kz = n == 3 ? 1 : 0;
    for (int dk = -kz; dk <= kz; ++dk)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int q[3] = {ijk[0] + di, ijk[1] + dj, ijk[2] + dk};
          bool inside = true;
          for (int a = 0; a < n; ++a) inside = inside && q[a] >= 0 && q[a] < grid.dims[a];
          if (!inside) continue;
          const int m = grid.index(q[0], q[1], q[2]);
          if (grid.cls[m] == CellClass::Obstacle && !f.active[m] && box_leaves_obstacle(grid, m)) {
            f.active[m] = 2;
            ++cut;
          }
        }
  }

  // Apertures of the 2n faces of every active cell.
  const int m_sub = opt.aperture_subdivisions;
  std::vector<double> aperture(N * 2 * n, 0.0);
  std::vector<double> wall(N, 0.0);
  const double face_area = std::pow(grid.h, n - 1);
  for (std::size_t c = 0; c < N; ++c) {
    if (!f.active[c]) continue;
    bool cut_box = false;
    for (int a = 0; a < n; ++a)
      for (int side = 0; side < 2; ++side) {
        const int d = side == 0 ? -1 : 1;
        const double A = face_aperture(grid, static_cast<int>(c), a, d, m_sub);
        aperture[(c * n + a) * 2 + side] = A;
        cut_box = cut_box || A < 1.0;
      }
    if (cut_box || f.active[c] == 2) wall[c] = wall_area(grid, static_cast<int>(c), m_sub);
  }
  // Drop cut cells with no open face toward another active cell.
  for (std::size_t c = 0; c < N; ++c) {
    if (f.active[c] != 2) continue;
    bool coupled = false;
    for (int a = 0; a < n; ++a)
      for (int side = 0; side < 2; ++side) {
        const int m = grid.neighbor(static_cast<int>(c), a, side == 0 ? -1 : 1);
        if (m >= 0 && f.active[m] && aperture[(c * n + a) * 2 + side] > 0.0) coupled = true;
      }
    if (!coupled) {
      f.active[c] = 0;
      --cut;
    }
  }

  // Fixed cells (matched to the closed form) touch the exterior.
  std::vector<std::uint8_t> fixed(N, 0);
  std::vector<double> outer_area(N, 0.0);
  double total_outer = 0.0;
  for (std::size_t c = 0; c < N; ++c) {
    if (!f.active[c]) continue;
    for (int a = 0; a < n; ++a)
      for (int side = 0; side < 2; ++side) {
        const int m = grid.neighbor(static_cast<int>(c), a, side == 0 ? -1 : 1);
        if (m < 0 || grid.cls[m] == CellClass::Exterior) {
          outer_area[c] += aperture[(c * n + a) * 2 + side] * face_area;
          fixed[c] = 1;
        }
      }
    total_outer += outer_area[c];
  }

  f.h.assign(N, std::numeric_limits<double>::quiet_NaN());
  std::vector<int> uid(N, -1);
  std::vector<int> cells;
  for (std::size_t c = 0; c < N; ++c) {
    if (!f.active[c]) continue;
    if (outer_bc == OuterBC::MatchAnalytic && fixed[c]) {
      const Point x = grid.center(static_cast<int>(c));
      f.h[c] = analytic->value(x.data());
      continue;
    }
    uid[c] = static_cast<int>(cells.size());
    cells.push_back(static_cast<int>(c));
  }
  const std::size_t U = cells.size();
  if (U == 0) throw InvalidInput("harmonic solve has no unknowns");

  // Rows: sum_f w_f (h_i - h_j) = lambda S_i (+ known neighbours).
  std::vector<double> diag(U, 0.0), rhs(U, 0.0);
  std::vector<std::array<int, 6>> col(U);
  std::vector<std::array<double, 6>> wt(U);
  const double wscale = std::pow(grid.h, n - 2);
  double wall_flux = 0.0;
  for (std::size_t r = 0; r < U; ++r) {
    const int c = cells[r];
    col[r].fill(-1);
    wt[r].fill(0.0);
    for (int a = 0; a < n; ++a)
      for (int side = 0; side < 2; ++side) {
        const int m = grid.neighbor(c, a, side == 0 ? -1 : 1);
        if (m < 0 || !f.active[m]) continue;
        const double w = aperture[(static_cast<std::size_t>(c) * n + a) * 2 + side] * wscale;
        if (w == 0.0) continue;
        diag[r] += w;
        if (uid[m] >= 0) {
          col[r][2 * a + side] = uid[m];
          wt[r][2 * a + side] = w;
        } else {
          rhs[r] += w * f.h[m];
        }
      }
    rhs[r] += lambda * wall[c];
    wall_flux += lambda * wall[c];
  }
  f.diag.wall_flux = wall_flux;
  if (outer_bc == OuterBC::HomogeneousNeumann) {
    f.diag.flux_defect = wall_flux;
    if (std::abs(wall_flux) > 1e-12 * std::max(1.0, std::abs(wall_flux))) {
      if (!opt.repair_compatibility)
        throw SolverError(fmt::format("incompatible all-Neumann data: flux defect {:.6e}", wall_flux));
      if (!(total_outer > 0.0))
        throw SolverError(fmt::format("incompatible all-Neumann data: flux defect {:.6e}", wall_flux));
      for (std::size_t r = 0; r < U; ++r) rhs[r] -= wall_flux * outer_area[cells[r]] / total_outer;
    }
  }
  for (std::size_t r = 0; r < U; ++r)
    if (!(diag[r] > 0.0)) throw SolverError("harmonic system has an isolated cell");

  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t r = 0; r < U; ++r) {
      double s = diag[r] * x[r];
      for (int k = 0; k < 2 * n; ++k)
        if (col[r][k] >= 0) s -= wt[r][k] * x[col[r][k]];
      y[r] = s;
    }
  };
  auto dotv = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  std::vector<double> x(U, 0.0), res = rhs, z(U), p(U), Ap(U);
  if (analytic && opt.analytic_initial_guess)
    for (std::size_t r = 0; r < U; ++r) {
      const Point xc = grid.center(cells[r]);
      x[r] = analytic->value(xc.data());
    }
  apply(x, Ap);
  for (std::size_t r = 0; r < U; ++r) res[r] = rhs[r] - Ap[r];
  const double bnorm = std::sqrt(dotv(rhs, rhs));
  const double target = opt.tolerance * (bnorm > 0.0 ? bnorm : 1.0);
  double rnorm = std::sqrt(dotv(res, res));
  int it = 0;
  if (rnorm > target) {
    for (std::size_t r = 0; r < U; ++r) z[r] = res[r] / diag[r];
    p = z;
    double rz = dotv(res, z);
    for (it = 1; it <= opt.max_iterations; ++it) {
      apply(p, Ap);
      const double pAp = dotv(p, Ap);
      if (!(pAp > 0.0)) break;
      const double alpha = rz / pAp;
      for (std::size_t r = 0; r < U; ++r) {
        x[r] += alpha * p[r];
        res[r] -= alpha * Ap[r];
      }
      rnorm = std::sqrt(dotv(res, res));
      if (rnorm <= target) break;
      for (std::size_t r = 0; r < U; ++r) z[r] = res[r] / diag[r];
      const double rz_new = dotv(res, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t r = 0; r < U; ++r) p[r] = z[r] + beta * p[r];
    }
    if (rnorm > target)
      throw SolverError(fmt::format("harmonic solve did not converge: relative residual {:.3e}",
                                    rnorm / (bnorm > 0.0 ? bnorm : 1.0)));
  }
  f.diag.iterations = it;
  f.diag.relative_residual = rnorm / (bnorm > 0.0 ? bnorm : 1.0);
  f.diag.unknowns = U;
  f.diag.cut_cells = cut;
  for (std::size_t r = 0; r < U; ++r) f.h[cells[r]] = x[r];
  apply(x, Ap);
  for (std::size_t r = 0; r < U; ++r) f.diag.max_row_residual = std::max(f.diag.max_row_residual, std::abs(Ap[r] - rhs[r]));

  if (outer_bc == OuterBC::HomogeneousNeumann) f.normalize_mean();

  // Gradients: central differences over active neighbours, one-sided otherwise.
  f.grad.assign(N * n, 0.0);
  for (std::size_t c = 0; c < N; ++c) {
    if (!f.active[c]) continue;
    for (int a = 0; a < n; ++a) {
      const int lo = grid.neighbor(static_cast<int>(c), a, -1), hi = grid.neighbor(static_cast<int>(c), a, 1);
      const bool hl = lo >= 0 && f.active[lo], hh = hi >= 0 && f.active[hi];
      double gval = 0.0;
      if (hl && hh)
        gval = (f.h[hi] - f.h[lo]) / (2.0 * grid.h);
      else if (hh)
        gval = (f.h[hi] - f.h[c]) / grid.h;
      else if (hl)
        gval = (f.h[c] - f.h[lo]) / grid.h;
      f.grad[c * n + a] = gval;
    }
  }
  for (int c : grid.domain) f.sup_grad = std::max(f.sup_grad, norm(&f.grad[static_cast<std::size_t>(c) * n], n));
  if (!(f.sup_grad < 1.0))
    throw SolverError(fmt::format("computed drift violates sup|grad h| < 1 (got {:.6f})", f.sup_grad));
  return f;
}

VerificationReport flux_identity_check(const DriftField& drift, const MaskedGrid& grid, const CellSet& set,
                                       double lambda, double rel_tol) {
  check_lambda(lambda);
  const Surface s = extract_set_boundary(grid, set);
  double flux = 0.0, wet = 0.0, free = 0.0;
  double a[3];
  for (const auto& e : s.elements) {
    if (e.contact) {
      wet += e.measure;
      continue;
    }
    free += e.measure;
    drift.gradient(e.centroid.data(), a);
    flux += dot(a, e.normal.data(), grid.dim) * e.measure;
  }
  const double rhs = -lambda * wet;
  const double tol = rel_tol * std::max(std::abs(rhs), std::abs(lambda) * grid.h * free);
  VerificationReport rep = make_identity("flux_identity", flux, rhs, std::max(tol, 1e-12));
  rep.params = {{"lambda", lambda}, {"n", grid.dim}, {"h", grid.h}};
  rep.metadata["wet_area"] = wet;
  rep.metadata["free_area"] = free;
  rep.metadata["obstacle"] = grid.obstacle.descriptor();
  return rep;
}

}  // namespace capsym
