#pragma once

#include <memory>

#include "capsym/gauge.hpp"
#include "capsym/geometry.hpp"
#include "capsym/report.hpp"

namespace capsym {

// Drift potential h with a closed form.
class Potential : public DriftField {
 public:
  virtual double value(const double* x) const = 0;
};

// h = -lambda (nu.x - offset) for E = {nu.x <= offset}; grad h = -lambda nu.
class HalfSpacePotential final : public Potential {
 public:
  HalfSpacePotential(double lambda, Vec normal, double offset);
  int dim() const override { return static_cast<int>(normal_.size()); }
  double value(const double* x) const override;
  void gradient(const double* x, double* out) const override;
  double sup_gradient() const override { return std::abs(lambda_); }

 private:
  double lambda_;
  Vec normal_;
  double offset_;
};

// h = lambda R^{n-1} |x-c|^{2-n}/(n-2) for n >= 3, -lambda R log|x-c| for n = 2.
class BallPotential final : public Potential {
 public:
  BallPotential(double lambda, double R, Vec center);
  int dim() const override { return static_cast<int>(center_.size()); }
  double value(const double* x) const override;
  void gradient(const double* x, double* out) const override;
  double sup_gradient() const override { return std::abs(lambda_); }

 private:
  double lambda_, R_;
  Vec center_;
};

// Half-space {x_n <= 0}.
std::shared_ptr<Potential> analytic_h_halfspace(double lambda, int n = 2);
std::shared_ptr<Potential> analytic_h_ball(double lambda, double R, int n, Vec center = {});
// Closed form matching the grid's obstacle, or nullptr for polytopes.
std::shared_ptr<Potential> analytic_h_for(const ConvexObstacle& obstacle, double lambda);

enum class OuterBC { HomogeneousNeumann, MatchAnalytic };

struct HarmonicDiagnostics {
  int iterations = 0;
  double relative_residual = 0.0;
  double max_row_residual = 0.0;  // max |A h - b| over unknown rows
  double wall_flux = 0.0;         // lambda times total wall area
  double flux_defect = 0.0;       // net flux repaired on the outer boundary
  std::size_t unknowns = 0;
  std::size_t cut_cells = 0;
};

// Numerical drift potential on a grid (cut-cell finite volumes).
class HarmonicField final : public DriftField {
 public:
  MaskedGrid grid;
  double lambda = 0.0;
  Field h;                  // per cell; NaN where not computed
  std::vector<double> grad;  // n values per cell
  std::vector<std::uint8_t> active;
  double sup_grad = 0.0;
  HarmonicDiagnostics diag;

  int dim() const override { return grid.dim; }
  void gradient(const double* x, double* out) const override;
  double sup_gradient() const override { return sup_grad; }
  double value(const double* x) const;
  // Subtracts the mean over domain cells; the gradient is unchanged.
  void normalize_mean();
  double domain_mean() const;

 private:
  int locate(const double* x) const;
};

struct HarmonicOptions {
  double tolerance = 1e-10;
  int max_iterations = 50000;
  bool repair_compatibility = true;
  int aperture_subdivisions = 8;
  bool analytic_initial_guess = true;
};

HarmonicField solve_h(const MaskedGrid& grid, double lambda, OuterBC outer_bc,
                      const Potential* analytic = nullptr, const HarmonicOptions& opt = {});

VerificationReport flux_identity_check(const DriftField& drift, const MaskedGrid& grid, const CellSet& set,
                                       double lambda, double rel_tol = 0.02);

}  // namespace capsym
