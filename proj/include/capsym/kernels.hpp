#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "capsym/gauge.hpp"
#include "capsym/geometry.hpp"

namespace capsym {

// Serial kernels are the reference; Parallel kernels use OpenMP and must give
// bit-identical results (fixed-block reductions summed in order).
enum class Backend { Serial, Parallel };

Backend default_backend();
void set_default_backend(Backend b);

inline constexpr std::size_t kReductionBlock = 1024;

template <class F>
double blocked_sum(std::size_t n, F&& f, Backend backend) {
  const std::size_t nb = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> part(nb, 0.0);
  auto block = [&](std::size_t k) {
    const std::size_t lo = k * kReductionBlock, hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    part[k] = s;
  };
  if (backend == Backend::Parallel) {
    const long long nbl = static_cast<long long>(nb);
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < nbl; ++k) block(static_cast<std::size_t>(k));
  } else {
    for (std::size_t k = 0; k < nb; ++k) block(k);
  }
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

// Drift vectors sampled at every domain cell centre (stored per domain slot).
struct DriftSamples {
  int n = 2;
  bool uniform = true;
  std::array<double, 3> a{0, 0, 0};
  std::vector<double> per_slot;  // n values per domain slot when not uniform

  static DriftSamples from_gauge(const MaskedGrid& g, const GaugeDescriptor& gauge);
  const double* at(std::size_t slot) const { return uniform ? a.data() : per_slot.data() + slot * n; }
  double sup_norm() const;
};

// Central-difference gradient at a domain cell: zero extension into exterior
// cells, one-sided where an obstacle neighbour is missing.
void central_gradient(const MaskedGrid& g, const double* u, int cell, double* grad);

// Integral of F(-grad u)^p over the domain (midpoint rule). The gauge is
// evaluated on -grad u, the outward normal direction of super-level sets.
double gradient_energy(const MaskedGrid& g, const std::vector<double>& u, const DriftSamples& drift, double p,
                       Backend backend);
double gradient_energy(const MaskedGrid& g, const std::vector<double>& u, const GaugeDescriptor& gauge,
                       double p);

// Stencil for the solver energy. Unknowns are the non-Dirichlet domain cells.
// Each domain slot averages the gauge over all 2^n forward/backward difference
// combinations; a missing (obstacle) side contributes a zero difference.
struct SolverStencil {
  int n = 2;
  double h = 0.0;
  std::vector<int> cell;             // grid index per domain slot
  std::vector<int> unknown;          // unknown id per slot, -1 for Dirichlet slots
  std::vector<int> unknown_slot;     // slot per unknown
  std::vector<std::array<int, 6>> nb;  // neighbour slot per (axis, side) or -1 zero, -2 missing
  DriftSamples drift;

  static SolverStencil build(const MaskedGrid& g, const DriftSamples& drift);
  std::size_t slots() const { return cell.size(); }
  std::size_t unknowns() const { return unknown_slot.size(); }
  // Scatter unknowns into a full grid field (zero elsewhere).
  std::vector<double> to_field(const MaskedGrid& g, const double* x) const;
  std::vector<double> from_field(const std::vector<double>& u) const;
};

// (1/p) sum_slots h^n 2^-n sum_combos F_eps(-g)^p with
// F_eps(xi) = sqrt(F(xi)^2 + eps^2); writes the gradient when grad != nullptr.
double stencil_energy(const SolverStencil& s, const double* x, double* grad, double p, double eps,
                      Backend backend);

// Diagonal of the Euclidean p = 2 operator (used as a preconditioner).
std::vector<double> stencil_diagonal(const SolverStencil& s);

}  // namespace capsym
