#include "capsym/surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace capsym {

double Surface::measure() const {
  double s = 0.0;
  for (const auto& e : elements) s += e.measure;
  return s;
}

double Surface::contact_measure() const {
  double s = 0.0;
  for (const auto& e : elements)
    if (e.contact) s += e.measure;
  return s;
}

double Surface::free_measure() const {
  double s = 0.0;
  for (const auto& e : elements)
    if (!e.contact) s += e.measure;
  return s;
}

namespace {

struct Vertex {
  Point x{0, 0, 0};
  bool on_obstacle = false;
};

// Crossing along the edge from an inside corner to an outside corner.
struct Crossing {
  Vertex v;
  Point dir{0, 0, 0};  // outside corner minus inside corner
};

Point lerp(const Point& a, const Point& b, double t) {
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
}

Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Policy interface: inside test, centre test for saddles and edge crossings.
class SetPolicy {
 public:
  SetPolicy(const MaskedGrid& g, const CellSet& s) : g_(g), s_(s) {}
  bool inside(int c) const { return s_.inside[c] != 0; }
  bool valid(int) const { return true; }
  double center_value(const int* c, int m) const {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += s_.phi[c[i]];
    return -s;  // positive means the centre belongs to the set
  }
  Crossing crossing(int a, int b) const {
    const double inf = std::numeric_limits<double>::infinity();
    const double pa = s_.phi[a], pb = s_.phi[b];
    double t_set = pb > 0.0 ? pa / (pa - pb) : inf;
    double t_wall = inf;
    bool wall_is_obstacle = false;
    if (g_.cls[b] == CellClass::Obstacle) {
      t_wall = g_.sd[a] / (g_.sd[a] - g_.sd[b]);
      wall_is_obstacle = true;
    } else if (g_.cls[b] == CellClass::Exterior) {
      const double la = g_.outer_level[a], lb = g_.outer_level[b];
      t_wall = lb > la ? la / (la - lb) : 0.5;
      if (t_wall < 0.0) t_wall = 0.0;
    }
    double t = std::min(t_set, t_wall);
    if (!std::isfinite(t)) t = 0.5;
    t = std::clamp(t, 0.0, 1.0);
    Crossing cr;
    const Point xa = g_.center(a), xb = g_.center(b);
    cr.v.x = lerp(xa, xb, t);
    cr.v.on_obstacle = wall_is_obstacle && t_wall <= t_set;
    cr.dir = sub(xb, xa);
    return cr;
  }

 private:
  const MaskedGrid& g_;
  const CellSet& s_;
};

class LevelPolicy {
 public:
  LevelPolicy(const MaskedGrid& g, const Field& u, double t) : g_(g), u_(u), t_(t) {}
  bool inside(int c) const { return u_[c] > t_; }
  bool valid(int c) const { return std::isfinite(u_[c]); }
  double center_value(const int* c, int m) const {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += u_[c[i]];
    return s / m - t_;
  }
  Crossing crossing(int a, int b) const {
    const double ua = u_[a], ub = u_[b];
    double t = (ua - t_) / (ua - ub);
    t = std::clamp(t, 0.0, 1.0);
    Crossing cr;
    const Point xa = g_.center(a), xb = g_.center(b);
    cr.v.x = lerp(xa, xb, t);
    cr.dir = sub(xb, xa);
    return cr;
  }

 private:
  const MaskedGrid& g_;
  const Field& u_;
  double t_;
};

using VertexList = std::vector<std::array<Point, 3>>;

void emit_segment(const Crossing& p, const Crossing& q, std::vector<SurfaceElement>& out,
                  VertexList* verts) {
  const double dx = q.v.x[0] - p.v.x[0], dy = q.v.x[1] - p.v.x[1];
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return;
  SurfaceElement e;
  e.normal = {dy / len, -dx / len, 0.0};
  const double orient = e.normal[0] * (p.dir[0] + q.dir[0]) + e.normal[1] * (p.dir[1] + q.dir[1]);
  if (orient < 0.0) {
    e.normal[0] = -e.normal[0];
    e.normal[1] = -e.normal[1];
  }
  e.centroid = lerp(p.v.x, q.v.x, 0.5);
  e.measure = len;
  e.contact = p.v.on_obstacle && q.v.on_obstacle;
  out.push_back(e);
  if (verts) verts->push_back({p.v.x, q.v.x, Point{0, 0, 0}});
}

void emit_triangle(const Crossing& p, const Crossing& q, const Crossing& r,
                   std::vector<SurfaceElement>& out, VertexList* verts) {
  Point n = cross(sub(q.v.x, p.v.x), sub(r.v.x, p.v.x));
  const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (len == 0.0) return;
  SurfaceElement e;
  double orient = 0.0;
  for (int a = 0; a < 3; ++a) {
    e.normal[a] = n[a] / len;
    orient += e.normal[a] * (p.dir[a] + q.dir[a] + r.dir[a]);
  }
  if (orient < 0.0)
    for (int a = 0; a < 3; ++a) e.normal[a] = -e.normal[a];
  for (int a = 0; a < 3; ++a) e.centroid[a] = (p.v.x[a] + q.v.x[a] + r.v.x[a]) / 3.0;
  e.measure = 0.5 * len;
  e.contact = p.v.on_obstacle && q.v.on_obstacle && r.v.on_obstacle;
  out.push_back(e);
  if (verts) verts->push_back({p.v.x, q.v.x, r.v.x});
}

template <class Policy>
void march2d(const MaskedGrid& g, const Policy& pol, std::vector<SurfaceElement>& out,
             VertexList* verts = nullptr) {
  static constexpr int edge_corners[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  for (int j = 0; j + 1 < g.dims[1]; ++j) {
    for (int i = 0; i + 1 < g.dims[0]; ++i) {
      const int c[4] = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)};
      int mask = 0;
      bool ok = true;
      for (int k = 0; k < 4; ++k) {
        if (!pol.valid(c[k])) ok = false;
        if (pol.inside(c[k])) mask |= 1 << k;
      }
      if (!ok || mask == 0 || mask == 15) continue;
      auto edge_crossing = [&](int e) {
        int a = c[edge_corners[e][0]], b = c[edge_corners[e][1]];
        if (!pol.inside(a)) std::swap(a, b);
        return pol.crossing(a, b);
      };
      if (mask == 5 || mask == 10) {
        const bool center_in = pol.center_value(c, 4) > 0.0;
        for (int k = 0; k < 4; ++k) {
          const bool in = (mask >> k) & 1;
          if (in == center_in) continue;
          // Isolate corner k between edges (k+3)%4 and k.
          emit_segment(edge_crossing((k + 3) % 4), edge_crossing(k), out, verts);
        }
        continue;
      }
      int found[2], nf = 0;
      for (int e = 0; e < 4; ++e) {
        const bool ia = (mask >> edge_corners[e][0]) & 1, ib = (mask >> edge_corners[e][1]) & 1;
        if (ia != ib) found[nf++] = e;
      }
      if (nf == 2) emit_segment(edge_crossing(found[0]), edge_crossing(found[1]), out, verts);
    }
  }
}

template <class Policy>
void march3d(const MaskedGrid& g, const Policy& pol, std::vector<SurfaceElement>& out,
             VertexList* verts = nullptr) {
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k + 1 < g.dims[2]; ++k) {
    for (int j = 0; j + 1 < g.dims[1]; ++j) {
      for (int i = 0; i + 1 < g.dims[0]; ++i) {
        int c[8];
        int mask = 0;
        bool ok = true;
        for (int b = 0; b < 8; ++b) {
          c[b] = g.index(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
          if (!pol.valid(c[b])) ok = false;
          if (pol.inside(c[b])) mask |= 1 << b;
        }
        if (!ok || mask == 0 || mask == 255) continue;
        for (const auto& p : perms) {
          const int v1 = 1 << p[0];
          const int v2 = v1 | (1 << p[1]);
          const int tv[4] = {0, v1, v2, 7};
          int in[4], outc[4], ni = 0, no = 0;
          for (int v : tv) {
            if ((mask >> v) & 1)
              in[ni++] = c[v];
            else
              outc[no++] = c[v];
          }
          if (ni == 0 || no == 0) continue;
          if (ni == 1) {
            emit_triangle(pol.crossing(in[0], outc[0]), pol.crossing(in[0], outc[1]),
                          pol.crossing(in[0], outc[2]), out, verts);
          } else if (ni == 3) {
            emit_triangle(pol.crossing(in[0], outc[0]), pol.crossing(in[1], outc[0]),
                          pol.crossing(in[2], outc[0]), out, verts);
          } else {
            const Crossing ac = pol.crossing(in[0], outc[0]), ad = pol.crossing(in[0], outc[1]),
                           bd = pol.crossing(in[1], outc[1]), bc = pol.crossing(in[1], outc[0]);
            emit_triangle(ac, ad, bd, out, verts);
            emit_triangle(ac, bd, bc, out, verts);
          }
        }
      }
    }
  }
}

// Keeps the part of each element outside E, interpolating the signed
// distance linearly between vertices.
void clip_to_obstacle(const MaskedGrid& g, std::vector<SurfaceElement>& elems,
                      const VertexList& verts, int nv) {
  std::vector<SurfaceElement> kept;
  kept.reserve(elems.size());
  for (std::size_t e = 0; e < elems.size(); ++e) {
    double s[3];
    bool all_out = true, all_in = true;
    for (int v = 0; v < nv; ++v) {
      s[v] = g.obstacle.signed_distance(verts[e][v].data());
      if (s[v] < 0.0) all_out = false;
      if (s[v] >= 0.0) all_in = false;
    }
    if (all_out) {
      kept.push_back(elems[e]);
      continue;
    }
    if (all_in) continue;
    // Clip polygon against s >= 0.
    std::vector<Point> poly;
    for (int v = 0; v < nv; ++v) {
      const int w = (v + 1) % nv;
      if (nv == 2 && v == 1) break;
      if (s[v] >= 0.0) poly.push_back(verts[e][v]);
      if ((s[v] >= 0.0) != (s[w] >= 0.0)) poly.push_back(lerp(verts[e][v], verts[e][w], s[v] / (s[v] - s[w])));
    }
    if (nv == 2 && s[1] >= 0.0) poly.push_back(verts[e][1]);
    SurfaceElement base = elems[e];
    if (nv == 2) {
      if (poly.size() != 2) continue;
      base.measure = std::hypot(poly[1][0] - poly[0][0], poly[1][1] - poly[0][1]);
      base.centroid = lerp(poly[0], poly[1], 0.5);
      kept.push_back(base);
    } else {
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        const Point n = cross(sub(poly[k], poly[0]), sub(poly[k + 1], poly[0]));
        SurfaceElement t = base;
        t.measure = 0.5 * std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
        for (int a = 0; a < 3; ++a) t.centroid[a] = (poly[0][a] + poly[k][a] + poly[k + 1][a]) / 3.0;
        if (t.measure > 0.0) kept.push_back(t);
      }
    }
  }
  elems.swap(kept);
}

}  // namespace

Surface extract_set_boundary(const MaskedGrid& g, const CellSet& set) {
  Surface s;
  SetPolicy pol(g, set);
  if (g.dim == 2)
    march2d(g, pol, s.elements);
  else
    march3d(g, pol, s.elements);
  return s;
}

Surface extract_level_surface(const MaskedGrid& g, const Field& u, double t) {
  Surface s;
  LevelPolicy pol(g, u, t);
  VertexList verts;
  if (g.dim == 2)
    march2d(g, pol, s.elements, &verts);
  else
    march3d(g, pol, s.elements, &verts);
  clip_to_obstacle(g, s.elements, verts, g.dim == 2 ? 2 : 3);
  return s;
}

}  // namespace capsym
