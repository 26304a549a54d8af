#pragma once

#include <vector>

#include "capsym/geometry.hpp"

namespace capsym {

struct SurfaceElement {
  Point centroid{0, 0, 0};
  Point normal{0, 0, 0};  // unit, pointing out of the set
  double measure = 0.0;
  bool contact = false;  // lies on the obstacle boundary
};

struct Surface {
  std::vector<SurfaceElement> elements;
  double measure() const;
  double contact_measure() const;
  double free_measure() const;
};

// Boundary of a cell set: marching squares in 2D, marching tetrahedra (six
// per cube) in 3D. Crossings toward obstacle cells are placed on the obstacle
// surface; an element is contact when all its vertices lie there.
Surface extract_set_boundary(const MaskedGrid& g, const CellSet& set);

// Level surface {u = t} of a field sampled on every non-exterior cell, with
// the normal pointing toward decreasing u, clipped to the outside of E.
Surface extract_level_surface(const MaskedGrid& g, const Field& u, double t);

}  // namespace capsym
