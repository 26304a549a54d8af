#include "capsym/geometry.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <deque>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "capsym/surface.hpp"

namespace capsym {

namespace {

Vec normalized(Vec v) {
  const double r = norm(v);
  if (!(r > 0.0)) throw InvalidInput("normal vector must be nonzero");
  for (double& c : v) c /= r;
  return v;
}

std::string join(const Vec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt::format("{:.17g}", v[i]);
  }
  return s;
}

Vec parse_list(const std::string& s) {
  Vec out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

ConvexObstacle ConvexObstacle::half_space(Vec normal, double offset) {
  if (normal.size() < 2) throw InvalidInput("obstacle dimension must be at least 2");
  ConvexObstacle o;
  o.kind_ = Kind::HalfSpace;
  o.dim_ = static_cast<int>(normal.size());
  o.planes_.push_back({normalized(std::move(normal)), offset});
  return o;
}

ConvexObstacle ConvexObstacle::ball(Vec center, double radius) {
  if (center.size() < 2) throw InvalidInput("obstacle dimension must be at least 2");
  if (!(radius > 0.0)) throw InvalidInput("ball obstacle radius must be positive");
  ConvexObstacle o;
  o.kind_ = Kind::Ball;
  o.dim_ = static_cast<int>(center.size());
  o.center_ = std::move(center);
  o.radius_ = radius;
  return o;
}

ConvexObstacle ConvexObstacle::polytope(std::vector<std::pair<Vec, double>> planes) {
  if (planes.empty()) throw InvalidInput("polytope needs at least one half-space");
  ConvexObstacle o;
  o.kind_ = Kind::Polytope;
  o.dim_ = static_cast<int>(planes.front().first.size());
  for (auto& [nu, b] : planes) {
    if (static_cast<int>(nu.size()) != o.dim_) throw InvalidInput("polytope planes differ in dimension");
    const double r = norm(nu);
    if (!(r > 0.0)) throw InvalidInput("normal vector must be nonzero");
    for (double& c : nu) c /= r;
    b /= r;
  }
  o.planes_ = std::move(planes);
  return o;
}

double ConvexObstacle::signed_distance(const double* x) const {
  switch (kind_) {
    case Kind::Ball: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += (x[i] - center_[i]) * (x[i] - center_[i]);
      return std::sqrt(s) - radius_;
    }
    case Kind::HalfSpace:
    case Kind::Polytope: {
      double m = -std::numeric_limits<double>::infinity();
      for (const auto& [nu, b] : planes_) m = std::max(m, dot(nu.data(), x, dim_) - b);
      return m;
    }
  }
  return 0.0;
}

void ConvexObstacle::outward_normal(const double* x, double* nu) const {
  if (kind_ == Kind::Ball) {
    double r = 0.0;
    for (int i = 0; i < dim_; ++i) {
      nu[i] = x[i] - center_[i];
      r += nu[i] * nu[i];
    }
    r = std::sqrt(r);
    for (int i = 0; i < dim_; ++i) nu[i] = r > 0.0 ? nu[i] / r : (i == dim_ - 1 ? 1.0 : 0.0);
    return;
  }
  std::size_t best = 0;
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < planes_.size(); ++k) {
    const double v = dot(planes_[k].first.data(), x, dim_) - planes_[k].second;
    if (v > m) {
      m = v;
      best = k;
    }
  }
  for (int i = 0; i < dim_; ++i) nu[i] = planes_[best].first[i];
}

double ConvexObstacle::feature_size() const {
  return kind_ == Kind::Ball ? 2.0 * radius_ : std::numeric_limits<double>::infinity();
}

std::string ConvexObstacle::descriptor() const {
  switch (kind_) {
    case Kind::Ball:
      return "ball:" + join(center_) + ":" + fmt::format("{:.17g}", radius_);
    case Kind::HalfSpace:
      return "halfspace:" + join(planes_[0].first) + ":" + fmt::format("{:.17g}", planes_[0].second);
    case Kind::Polytope: {
      std::string s = "polytope:";
      for (std::size_t k = 0; k < planes_.size(); ++k) {
        if (k) s += ';';
        s += join(planes_[k].first) + ":" + fmt::format("{:.17g}", planes_[k].second);
      }
      return s;
    }
  }
  return {};
}

ConvexObstacle ConvexObstacle::from_descriptor(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidInput("malformed obstacle descriptor: " + text);
  const std::string kind = text.substr(0, colon), rest = text.substr(colon + 1);
  try {
    if (kind == "ball") {
      const auto parts = split(rest, ':');
      if (parts.size() != 2) throw InvalidInput("malformed ball descriptor: " + text);
      return ball(parse_list(parts[0]), std::stod(parts[1]));
    }
    if (kind == "halfspace") {
      const auto parts = split(rest, ':');
      if (parts.size() != 2) throw InvalidInput("malformed half-space descriptor: " + text);
      return half_space(parse_list(parts[0]), std::stod(parts[1]));
    }
    if (kind == "polytope") {
      std::vector<std::pair<Vec, double>> planes;
      for (const auto& p : split(rest, ';')) {
        const auto parts = split(p, ':');
        if (parts.size() != 2) throw InvalidInput("malformed polytope descriptor: " + text);
        planes.push_back({parse_list(parts[0]), std::stod(parts[1])});
      }
      return polytope(std::move(planes));
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InvalidInput*>(&e)) throw;
    throw InvalidInput("malformed obstacle descriptor: " + text);
  }
  throw InvalidInput("unknown obstacle kind: " + kind);
}

// ---------------------------------------------------------------- regions

Region Region::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.size() < 2) throw InvalidInput("box corners differ in dimension");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(hi[i] > lo[i])) throw InvalidInput("box must have positive extent");
  Region r;
  r.lo_ = lo;
  r.hi_ = hi;
  r.description_ = "box:" + join(lo) + ":" + join(hi);
  const int n = static_cast<int>(lo.size());
  r.f_ = [lo, hi, n](const double* x) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) m = std::max({m, lo[i] - x[i], x[i] - hi[i]});
    return m;
  };
  return r;
}

Region Region::ball(Vec center, double radius) {
  if (!(radius > 0.0)) throw InvalidInput("ball radius must be positive");
  Region r;
  const int n = static_cast<int>(center.size());
  r.lo_.resize(n);
  r.hi_.resize(n);
  for (int i = 0; i < n; ++i) {
    r.lo_[i] = center[i] - radius;
    r.hi_[i] = center[i] + radius;
  }
  r.description_ = "ball:" + join(center) + ":" + fmt::format("{:.17g}", radius);
  r.f_ = [center, radius, n](const double* x) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
    return std::sqrt(s) - radius;
  };
  return r;
}

Region Region::intersect(const Region& a, const Region& b) {
  Region r;
  const int n = a.dim();
  r.lo_.resize(n);
  r.hi_.resize(n);
  for (int i = 0; i < n; ++i) {
    r.lo_[i] = std::max(a.lo_[i], b.lo_[i]);
    r.hi_[i] = std::min(a.hi_[i], b.hi_[i]);
  }
  r.description_ = "(" + a.description_ + ")&(" + b.description_ + ")";
  auto fa = a.f_, fb = b.f_;
  r.f_ = [fa, fb](const double* x) { return std::max(fa(x), fb(x)); };
  return r;
}

Region Region::unite(const Region& a, const Region& b) {
  Region r;
  const int n = a.dim();
  r.lo_.resize(n);
  r.hi_.resize(n);
  for (int i = 0; i < n; ++i) {
    r.lo_[i] = std::min(a.lo_[i], b.lo_[i]);
    r.hi_[i] = std::max(a.hi_[i], b.hi_[i]);
  }
  r.description_ = "(" + a.description_ + ")|(" + b.description_ + ")";
  auto fa = a.f_, fb = b.f_;
  r.f_ = [fa, fb](const double* x) { return std::min(fa(x), fb(x)); };
  return r;
}

Region Region::subtract(const Region& a, const Region& b) {
  Region r = a;
  r.description_ = "(" + a.description_ + ")-(" + b.description_ + ")";
  auto fa = a.f_, fb = b.f_;
  r.f_ = [fa, fb](const double* x) { return std::max(fa(x), -fb(x)); };
  return r;
}

Region Region::l_shape(Vec lo, Vec hi) {
  Region full = box(lo, hi);
  Vec mlo = lo, mhi = hi;
  const double big = 1.0 + std::abs(hi[0] - lo[0]) + std::abs(hi[1] - lo[1]);
  mlo[0] = 0.5 * (lo[0] + hi[0]);
  mlo[1] = 0.5 * (lo[1] + hi[1]);
  mhi[0] = hi[0] + big;
  mhi[1] = hi[1] + big;
  for (std::size_t i = 2; i < lo.size(); ++i) {
    mlo[i] = lo[i] - big;
    mhi[i] = hi[i] + big;
  }
  Region r = subtract(full, box(mlo, mhi));
  r.description_ = "lshape:" + join(lo) + ":" + join(hi);
  return r;
}

// ---------------------------------------------------------------- grids

std::size_t MaskedGrid::count(CellClass c) const {
  return static_cast<std::size_t>(std::count(cls.begin(), cls.end(), c));
}

std::size_t MaskedGrid::dirichlet_faces() const {
  std::size_t n = 0;
  for (int c : domain)
    for (int a = 0; a < dim; ++a)
      for (int d : {-1, 1}) {
        const int m = neighbor(c, a, d);
        if (m < 0 || cls[m] == CellClass::Exterior) ++n;
      }
  return n;
}

std::size_t MaskedGrid::neumann_faces() const {
  std::size_t n = 0;
  for (int c : domain)
    for (int a = 0; a < dim; ++a)
      for (int d : {-1, 1}) {
        const int m = neighbor(c, a, d);
        if (m >= 0 && cls[m] == CellClass::Obstacle) ++n;
      }
  return n;
}

namespace {

void finish_classification(MaskedGrid& g) {
  // Boundary classes from face neighbours; contact with E wins ties.
  const std::size_t N = g.size();
  g.domain.clear();
  for (std::size_t c = 0; c < N; ++c) {
    if (!g.in_domain(static_cast<int>(c))) continue;
    bool touches_obstacle = false, touches_exterior = false;
    for (int a = 0; a < g.dim; ++a)
      for (int d : {-1, 1}) {
        const int m = g.neighbor(static_cast<int>(c), a, d);
        if (m < 0 || g.cls[m] == CellClass::Exterior)
          touches_exterior = true;
        else if (g.cls[m] == CellClass::Obstacle)
          touches_obstacle = true;
      }
    g.cls[c] = touches_obstacle ? CellClass::Neumann
                                : (touches_exterior ? CellClass::Dirichlet : CellClass::Interior);
    g.domain.push_back(static_cast<int>(c));
  }
}

void check_connected(const MaskedGrid& g) {
  if (g.domain.empty()) throw InvalidInput("empty domain");
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::deque<int> queue{g.domain.front()};
  seen[g.domain.front()] = 1;
  std::size_t reached = 0;
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    ++reached;
    for (int a = 0; a < g.dim; ++a)
      for (int d : {-1, 1}) {
        const int m = g.neighbor(c, a, d);
        if (m >= 0 && !seen[m] && g.in_domain(m)) {
          seen[m] = 1;
          queue.push_back(m);
        }
      }
  }
  if (reached != g.domain.size()) throw InvalidInput("disconnected domain");
}

}  // namespace

MaskedGrid build_domain(const ConvexObstacle& obstacle, const Region& outer, double h) {
  const int n = outer.dim();
  if (n != 2 && n != 3) throw InvalidInput("grids support n = 2 or 3");
  if (obstacle.dim() != n) throw InvalidInput("obstacle and outer region differ in dimension");
  if (!(h > 0.0)) throw InvalidInput("spacing must be positive");
  MaskedGrid g;
  g.dim = n;
  g.h = h;
  g.obstacle = obstacle;
  g.outer_description = outer.description();
  for (int a = 0; a < n; ++a) {
    if (!std::isfinite(outer.lo()[a]) || !std::isfinite(outer.hi()[a]))
      throw InvalidInput("outer region must be bounded");
    if (!(outer.hi()[a] > outer.lo()[a])) throw InvalidInput("empty domain");
    const long lo = static_cast<long>(std::floor(outer.lo()[a] / h + 1e-9)) - 1;
    const long hi = static_cast<long>(std::ceil(outer.hi()[a] / h - 1e-9)) + 1;
    g.origin[a] = lo * h;
    g.dims[a] = static_cast<int>(hi - lo);
  }
  const std::size_t N = static_cast<std::size_t>(g.dims[0]) * g.dims[1] * g.dims[2];
  if (N > 200'000'000) throw InvalidInput("grid too large");
  g.cls.assign(N, CellClass::Exterior);
  g.sd.assign(N, 0.0);
  g.outer_level.assign(N, 0.0);
  bool any_obstacle = false;
  for (std::size_t c = 0; c < N; ++c) {
    const Point x = g.center(static_cast<int>(c));
    g.sd[c] = obstacle.signed_distance(x.data());
    g.outer_level[c] = outer.level(x.data());
    if (g.sd[c] <= 0.0) {
      g.cls[c] = CellClass::Obstacle;
      any_obstacle = true;
    } else if (g.outer_level[c] < 0.0) {
      g.cls[c] = CellClass::Interior;
    }
  }
  if (any_obstacle && obstacle.feature_size() < 8.0 * h)
    throw ResolutionError(fmt::format("under-resolved obstacle: feature size {} needs spacing <= {}",
                                      obstacle.feature_size(), obstacle.feature_size() / 8.0));
  finish_classification(g);
  check_connected(g);
  return g;
}

MaskedGrid build_cap_grid(double lambda, int n, double r, double h) {
  check_lambda(lambda);
  if (!(r > 0.0)) throw InvalidInput("cap radius must be positive");
  Vec center(n, 0.0), normal(n, 0.0), lo(n), hi(n);
  center[n - 1] = -r * lambda;
  normal[n - 1] = 1.0;
  for (int a = 0; a < n; ++a) {
    lo[a] = -r;
    hi[a] = r;
  }
  lo[n - 1] = 0.0;
  hi[n - 1] = r * (1.0 - lambda);
  const Region outer = Region::intersect(Region::ball(center, r), Region::box(lo, hi));
  return build_domain(ConvexObstacle::half_space(normal, 0.0), outer, h);
}

namespace {

char class_char(CellClass c) {
  switch (c) {
    case CellClass::Exterior: return '.';
    case CellClass::Obstacle: return '#';
    case CellClass::Interior: return 'o';
    case CellClass::Dirichlet: return 'D';
    case CellClass::Neumann: return 'N';
  }
  return '?';
}

}  // namespace

std::string write_grid(const MaskedGrid& g) {
  std::string dims = std::to_string(g.dims[0]);
  Vec origin;
  for (int a = 0; a < g.dim; ++a) origin.push_back(g.origin[a]);
  for (int a = 1; a < g.dim; ++a) dims += "x" + std::to_string(g.dims[a]);
  std::string out = fmt::format("capsym-grid v1 n={} h={:.17g} dims={} origin={} obstacle={}\n", g.dim, g.h,
                                dims, join(origin), g.obstacle.descriptor());
  out.reserve(out.size() + g.size() + g.size() / std::max(1, g.dims[0]) + 1);
  for (std::size_t c = 0; c < g.size(); ++c) {
    out += class_char(g.cls[c]);
    if ((c + 1) % g.dims[0] == 0) out += '\n';
  }
  return out;
}

MaskedGrid read_grid(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic, version, tok;
  hs >> magic >> version;
  if (magic != "capsym-grid" || version != "v1") throw InvalidInput("not a capsym-grid v1 file");
  MaskedGrid g;
  std::string obstacle;
  bool have_origin = false;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw InvalidInput("malformed grid header token: " + tok);
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "n") {
      g.dim = std::stoi(val);
    } else if (key == "h") {
      g.h = std::stod(val);
    } else if (key == "dims") {
      const auto parts = split(val, 'x');
      for (std::size_t a = 0; a < parts.size() && a < 3; ++a) g.dims[a] = std::stoi(parts[a]);
    } else if (key == "origin") {
      const Vec o = parse_list(val);
      for (std::size_t a = 0; a < o.size() && a < 3; ++a) g.origin[a] = o[a];
      have_origin = true;
    } else if (key == "obstacle") {
      obstacle = val;
    } else {
      throw InvalidInput("unknown grid header key: " + key);
    }
  }
  if (g.dim != 2 && g.dim != 3) throw InvalidInput("grid dimension must be 2 or 3");
  if (!(g.h > 0.0) || !have_origin || obstacle.empty()) throw InvalidInput("incomplete grid header");
  g.obstacle = ConvexObstacle::from_descriptor(obstacle);
  const std::size_t N = static_cast<std::size_t>(g.dims[0]) * g.dims[1] * g.dims[2];
  g.cls.reserve(N);
  char ch;
  while (in.get(ch)) {
    if (ch == '\n' || ch == '\r') continue;
    switch (ch) {
      case '.': g.cls.push_back(CellClass::Exterior); break;
      case '#': g.cls.push_back(CellClass::Obstacle); break;
      case 'o': g.cls.push_back(CellClass::Interior); break;
      case 'D': g.cls.push_back(CellClass::Dirichlet); break;
      case 'N': g.cls.push_back(CellClass::Neumann); break;
      default: throw InvalidInput(std::string("unknown cell class character '") + ch + "'");
    }
  }
  if (g.cls.size() != N) throw InvalidInput("grid body does not match dims");
  g.sd.resize(N);
  g.outer_level.resize(N);
  for (std::size_t c = 0; c < N; ++c) {
    const Point x = g.center(static_cast<int>(c));
    g.sd[c] = g.obstacle.signed_distance(x.data());
    g.outer_level[c] = g.cls[c] == CellClass::Exterior ? 0.5 * g.h : -0.5 * g.h;
    if (g.in_domain(static_cast<int>(c))) g.domain.push_back(static_cast<int>(c));
  }
  return g;
}

Field sample_field(const MaskedGrid& g, const std::function<double(const double*)>& f) {
  Field u(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Point x = g.center(static_cast<int>(c));
    u[c] = f(x.data());
  }
  return u;
}

void apply_dirichlet_zero(const MaskedGrid& g, Field& u) {
  for (std::size_t c = 0; c < g.size(); ++c) {
    const CellClass k = g.cls[c];
    if (k != CellClass::Interior && k != CellClass::Neumann) u[c] = 0.0;
  }
}

CellSet CellSet::from_indicator(const MaskedGrid& g, std::vector<std::uint8_t> inside) {
  if (inside.size() != g.size()) throw InvalidInput("set indicator size does not match grid");
  CellSet s;
  s.phi.resize(g.size());
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (inside[c] && !g.in_domain(static_cast<int>(c))) throw InvalidInput("set must lie inside the domain");
    s.phi[c] = inside[c] ? -0.5 * g.h : 0.5 * g.h;
  }
  s.inside = std::move(inside);
  return s;
}

CellSet CellSet::from_level(const MaskedGrid& g, const std::function<double(const double*)>& phi) {
  CellSet s;
  s.phi = sample_field(g, phi);
  s.inside.assign(g.size(), 0);
  for (int c : g.domain) s.inside[c] = s.phi[c] < 0.0 ? 1 : 0;
  return s;
}

double CellSet::volume(const MaskedGrid& g) const {
  std::size_t n = 0;
  for (auto v : inside) n += v ? 1 : 0;
  return static_cast<double>(n) * g.cell_volume();
}

bool CellSet::empty() const {
  return std::none_of(inside.begin(), inside.end(), [](std::uint8_t v) { return v != 0; });
}

// ---------------------------------------------------------------- caps

double cap_constant(double lambda, int n) {
  check_lambda(lambda);
  if (n < 2) throw InvalidInput("dimension must be at least 2");
  if (n == 2) return std::acos(lambda) - lambda * std::sqrt(1.0 - lambda * lambda);
  if (n == 3) {
    const double H = 1.0 - lambda;
    return std::numbers::pi * H * H * (3.0 - H) / 3.0;
  }
  const double vn1 = unit_ball_volume(n - 1);
  auto f = [&](double t) {
    const double s = 1.0 - (t + lambda) * (t + lambda);
    return s > 0.0 ? vn1 * std::pow(s, 0.5 * (n - 1)) : 0.0;
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0 - lambda, 25, 1e-14,
                                                                        &err);
}

double cap_radius_for_volume(double vol, double lambda, int n) {
  if (vol < 0.0) throw InvalidInput("volume must be non-negative");
  if (vol == 0.0) return 0.0;
  return std::pow(vol / cap_constant(lambda, n), 1.0 / n);
}

CapGeometry cap_geometry(double lambda, int n, double r) {
  CapGeometry c;
  c.lambda = lambda;
  c.n = n;
  c.r = r;
  c.kappa_lambda = cap_constant(lambda, n);
  c.volume = c.kappa_lambda * std::pow(r, n);
  const double theta = std::acos(lambda);
  double curved_unit = 0.0;
  if (n == 2) {
    curved_unit = 2.0 * theta;
  } else if (n == 3) {
    curved_unit = 2.0 * std::numbers::pi * (1.0 - lambda);
  } else {
    auto f = [n](double t) { return std::pow(std::sin(t), n - 2); };
    double err = 0.0;
    curved_unit = unit_sphere_area(n - 1) *
                  boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, theta, 25, 1e-14, &err);
  }
  const double rn1 = std::pow(r, n - 1);
  c.curved_area = curved_unit * rn1;
  c.flat_area = unit_ball_volume(n - 1) * std::pow(1.0 - lambda * lambda, 0.5 * (n - 1)) * rn1;
  c.energy = c.curved_area - lambda * c.flat_area;
  return c;
}

double cap_coordinate(const double* x, int n, double lambda) {
  // Root of (1-lambda^2) rho^2 - 2 lambda x_n rho - |x|^2 = 0, i.e. the dual
  // gauge of F_lambda at x.
  double a[3] = {0, 0, 0};
  a[n - 1] = -lambda;
  return gk::dual_value(x, a, n);
}

// ---------------------------------------------------------------- perimeters

namespace {

void require_set(const MaskedGrid& g, const CellSet& set) {
  if (set.inside.size() != g.size() || set.phi.size() != g.size())
    throw InvalidInput("set does not match grid");
  for (std::size_t c = 0; c < g.size(); ++c)
    if (set.inside[c] && !g.in_domain(static_cast<int>(c))) throw InvalidInput("set must lie inside the domain");
}

}  // namespace

CapillaryPerimeter capillary_perimeter(const MaskedGrid& g, const CellSet& set, double lambda) {
  check_lambda(lambda);
  require_set(g, set);
  CapillaryPerimeter out;
  if (set.empty()) return out;
  const Surface s = extract_set_boundary(g, set);
  out.P = s.free_measure();
  out.wet = s.contact_measure();
  out.energy = out.P - lambda * out.wet;
  return out;
}

double anisotropic_perimeter(const MaskedGrid& g, const CellSet& set, const GaugeDescriptor& gauge,
                             BoundaryPart part) {
  require_set(g, set);
  if (gauge.dim() != g.dim) throw InvalidInput("gauge and grid differ in dimension");
  if (set.empty()) return 0.0;
  const Surface s = extract_set_boundary(g, set);
  double total = 0.0;
  double a[3];
  for (const auto& e : s.elements) {
    if (part == BoundaryPart::FreeOnly && e.contact) continue;
    gauge.drift_at(e.centroid.data(), a);
    total += gk::value(e.normal.data(), a, g.dim) * e.measure;
  }
  return total;
}

VerificationReport isoperimetric_check(const MaskedGrid& g, const CellSet& set, double lambda,
                                       const IsoperimetricOptions& opt) {
  check_lambda(lambda);
  require_set(g, set);
  if (set.empty()) throw InvalidInput("isoperimetric check needs a nonempty set");
  double vol = 0.0;
  if (set.volume(g) > g.volume() * (1.0 + 1e-12)) throw InvalidInput("set volume exceeds the domain");
  // Volume from the level function when it carries sub-cell information.
  vol = set.volume(g);
  const CapillaryPerimeter cp = capillary_perimeter(g, set, lambda);
  const double r = cap_radius_for_volume(vol, lambda, g.dim);
  const CapGeometry cap = cap_geometry(lambda, g.dim, r);
  VerificationReport rep =
      make_inequality("isoperimetric", cp.energy, cap.energy, grid_tolerance(opt.c_grid, g.h, cap.energy));
  rep.params = {{"lambda", lambda}, {"n", g.dim}, {"h", g.h}};
  rep.metadata["volume"] = vol;
  rep.metadata["free_perimeter"] = cp.P;
  rep.metadata["wet_area"] = cp.wet;
  rep.metadata["cap_radius"] = r;
  rep.metadata["obstacle"] = g.obstacle.descriptor();
  rep.flag_rigidity("cap on a facet");
  return rep;
}

}  // namespace capsym
