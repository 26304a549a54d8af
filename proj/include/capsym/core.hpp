#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace capsym {

using Vec = std::vector<double>;
using Point = std::array<double, 3>;

// Bad parameters or preconditions (CLI exit code 2).
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Iterative solver failed to converge or produced unusable output.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Grid too coarse for the requested experiment.
struct ResolutionError : InvalidInput {
  using InvalidInput::InvalidInput;
};

inline double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const double* a, int n) { return std::sqrt(dot(a, a, n)); }

inline double norm(const Vec& a) { return norm(a.data(), static_cast<int>(a.size())); }

inline void check_lambda(double lambda) {
  if (!(lambda > -1.0 && lambda < 1.0))
    throw InvalidInput("lambda must lie strictly inside (-1,1)");
}

// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

// Surface measure of the unit sphere S^{n-1} in R^n.
double unit_sphere_area(int n);

}  // namespace capsym
