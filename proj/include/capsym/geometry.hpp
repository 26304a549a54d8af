#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "capsym/core.hpp"
#include "capsym/gauge.hpp"
#include "capsym/report.hpp"

namespace capsym {

// Closed convex obstacle E with a signed distance that is positive outside E.
class ConvexObstacle {
 public:
  enum class Kind { HalfSpace, Ball, Polytope };

  // E = {x : nu.x <= offset}; nu is normalized internally.
  static ConvexObstacle half_space(Vec normal, double offset);
  static ConvexObstacle ball(Vec center, double radius);
  // E = intersection of {nu_i.x <= b_i}.
  static ConvexObstacle polytope(std::vector<std::pair<Vec, double>> planes);
  // Inverse of descriptor().
  static ConvexObstacle from_descriptor(const std::string& text);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double signed_distance(const double* x) const;
  bool contains(const double* x) const { return signed_distance(x) <= 0.0; }
  // Unit normal pointing away from E at (or near) x.
  void outward_normal(const double* x, double* nu) const;
  // Smallest feature size (diameter for balls, infinite otherwise).
  double feature_size() const;
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<std::pair<Vec, double>>& planes() const { return planes_; }
  std::string descriptor() const;

 private:
  Kind kind_ = Kind::HalfSpace;
  int dim_ = 2;
  Vec center_;
  double radius_ = 0.0;
  std::vector<std::pair<Vec, double>> planes_;
};

// Outer region described by a level function that is negative inside.
class Region {
 public:
  static Region box(Vec lo, Vec hi);
  static Region ball(Vec center, double radius);
  static Region intersect(const Region& a, const Region& b);
  static Region unite(const Region& a, const Region& b);
  static Region subtract(const Region& a, const Region& b);
  // [lo,hi]^2 with the quadrant above-right of the midpoint removed, extruded in 3D.
  static Region l_shape(Vec lo, Vec hi);

  double level(const double* x) const { return f_(x); }
  int dim() const { return static_cast<int>(lo_.size()); }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const std::string& description() const { return description_; }

 private:
  std::function<double(const double*)> f_;
  Vec lo_, hi_;
  std::string description_;
};

enum class CellClass : std::uint8_t { Exterior, Obstacle, Interior, Dirichlet, Neumann };

// Cell-centred grid covering the bounding box of the outer region. Domain
// cells (Interior, Dirichlet, Neumann) have centres inside the outer region
// and outside E.
class MaskedGrid {
 public:
  int dim = 2;
  double h = 0.0;
  Point origin{0, 0, 0};  // lower corner of cell 0
  std::array<int, 3> dims{1, 1, 1};
  std::vector<CellClass> cls;
  std::vector<double> sd;           // obstacle signed distance at centres
  std::vector<double> outer_level;  // outer region level at centres
  std::vector<int> domain;          // indices of domain cells, ascending
  ConvexObstacle obstacle;
  std::string outer_description;

  std::size_t size() const { return cls.size(); }
  int index(int i, int j, int k = 0) const { return i + dims[0] * (j + dims[1] * k); }
  void coords(int idx, int* ijk) const {
    ijk[0] = idx % dims[0];
    ijk[1] = (idx / dims[0]) % dims[1];
    ijk[2] = idx / (dims[0] * dims[1]);
  }
  void center(int idx, double* x) const {
    int c[3];
    coords(idx, c);
    for (int a = 0; a < dim; ++a) x[a] = origin[a] + (c[a] + 0.5) * h;
  }
  Point center(int idx) const {
    Point p{0, 0, 0};
    center(idx, p.data());
    return p;
  }
  std::size_t stride(int axis) const {
    return axis == 0 ? 1 : (axis == 1 ? dims[0] : static_cast<std::size_t>(dims[0]) * dims[1]);
  }
  // Face neighbour along `axis` in direction dir = +1/-1, or -1 if off-grid.
  int neighbor(int idx, int axis, int dir) const {
    int c[3];
    coords(idx, c);
    const int m = c[axis] + dir;
    if (m < 0 || m >= dims[axis]) return -1;
    return idx + dir * static_cast<int>(stride(axis));
  }
  bool in_domain(int idx) const {
    const CellClass c = cls[idx];
    return c == CellClass::Interior || c == CellClass::Dirichlet || c == CellClass::Neumann;
  }
  double cell_volume() const { return std::pow(h, dim); }
  double volume() const { return static_cast<double>(domain.size()) * cell_volume(); }
  std::size_t count(CellClass c) const;
  // Face counts: domain-to-exterior and domain-to-obstacle.
  std::size_t dirichlet_faces() const;
  std::size_t neumann_faces() const;
};

// Classifies cells; throws on empty, disconnected or under-resolved domains.
MaskedGrid build_domain(const ConvexObstacle& obstacle, const Region& outer, double h);

// Cap B_r(-r lambda e_n) on the half-space {x_n <= 0}.
MaskedGrid build_cap_grid(double lambda, int n, double r, double h);

std::string write_grid(const MaskedGrid& g);
MaskedGrid read_grid(const std::string& text);

using Field = std::vector<double>;

// Samples f at every cell centre (domain or not).
Field sample_field(const MaskedGrid& g, const std::function<double(const double*)>& f);
// Sets the value on non-domain and Dirichlet cells to zero.
void apply_dirichlet_zero(const MaskedGrid& g, Field& u);

// A finite union of domain cells; phi (length units, negative inside) gives
// sub-cell boundary positions when available.
struct CellSet {
  std::vector<std::uint8_t> inside;
  std::vector<double> phi;

  static CellSet from_indicator(const MaskedGrid& g, std::vector<std::uint8_t> inside);
  static CellSet from_level(const MaskedGrid& g, const std::function<double(const double*)>& phi);
  double volume(const MaskedGrid& g) const;
  bool empty() const;
};

// Cap geometry.
double cap_constant(double lambda, int n);
double cap_radius_for_volume(double vol, double lambda, int n);
struct CapGeometry {
  double lambda = 0.0;
  int n = 2;
  double r = 0.0;
  double kappa_lambda = 0.0;
  double volume = 0.0;
  double curved_area = 0.0;
  double flat_area = 0.0;
  double energy = 0.0;  // curved - lambda * flat
};
CapGeometry cap_geometry(double lambda, int n, double r);
// Cap coordinate: the unique rho with x on the boundary of B_rho(-rho lambda e_n).
double cap_coordinate(const double* x, int n, double lambda);

struct CapillaryPerimeter {
  double P = 0.0;
  double wet = 0.0;
  double energy = 0.0;
};

CapillaryPerimeter capillary_perimeter(const MaskedGrid& g, const CellSet& set, double lambda);

enum class BoundaryPart { Full, FreeOnly };
double anisotropic_perimeter(const MaskedGrid& g, const CellSet& set, const GaugeDescriptor& gauge,
                             BoundaryPart part = BoundaryPart::Full);

struct IsoperimetricOptions {
  double c_grid = 2.0;
};
VerificationReport isoperimetric_check(const MaskedGrid& g, const CellSet& set, double lambda,
                                       const IsoperimetricOptions& opt = {});

}  // namespace capsym
