#pragma once

#include <memory>
#include <vector>

#include "capsym/gauge.hpp"
#include "capsym/geometry.hpp"
#include "capsym/report.hpp"

namespace capsym {

struct LevelProfile {
  std::vector<double> thresholds;  // ascending
  std::vector<double> measures;    // mu(t) per threshold
  double total_volume = 0.0;
};

// mu(t) = h^n #{domain cells : u > t}; default levels are 512 quantiles of u.
LevelProfile distribution(const MaskedGrid& g, const Field& u, const std::vector<double>* levels = nullptr);

// Decreasing rearrangement of a grid field, one value per domain cell. Rank k
// covers s in [k v, (k+1) v) with v the cell volume.
class RadialProfile {
 public:
  double lambda = 0.0;
  int n = 2;
  double cell_volume = 0.0;
  double total_volume = 0.0;
  double kappa = 0.0;
  double r_max = 0.0;
  std::vector<double> values;  // non-increasing

  // Staircase value f#(s).
  double sharp(double s) const;
  // Linear interpolation through (s_k, values[k]) with s_k = (k + 1/2) v.
  double sharp_linear(double s) const;
  // u*(x) = sharp_linear(kappa rho(x)^n), zero outside the cap of volume |Omega|.
  double eval(const double* x) const;
  // L^q norm of the staircase (q = infinity allowed), exact layer-cake sum.
  double norm(double q) const;
  // Integral of the staircase over [0, s].
  double cumulative(double s) const;
  LevelProfile distribution(const std::vector<double>& levels) const;
};

RadialProfile decreasing_rearrangement(const MaskedGrid& g, const Field& f);
RadialProfile capillary_symmetrize(const MaskedGrid& g, const Field& u, double lambda);
// Samples u* on a cap grid; Dirichlet and non-domain cells are set to zero.
Field sample_profile(const MaskedGrid& cap_grid, const RadialProfile& profile);

double field_norm(const MaskedGrid& g, const Field& u, double q);

struct CoareaLevel {
  double t = 0.0;
  double lhs = 0.0;       // -d/dt of the level integral
  double rhs = 0.0;       // surface integral over {u = t}
  double mu_lhs = 0.0;    // -mu'(t)
  double mu_rhs = 0.0;    // surface integral of 1/|grad u|
  bool skipped = false;
  std::string reason;
};

struct CoareaOptions {
  int levels = 32;
  double rel_tol = 0.02;
  double t_min_fraction = 0.05;  // levels span (t_min, t_max) fractions of max u
  double t_max_fraction = 0.95;
};

struct CoareaResult {
  VerificationReport report;
  std::vector<CoareaLevel> levels;
};

// u must be sampled on every cell (analytic test fields).
CoareaResult coarea_check(const MaskedGrid& g, const Field& u, const GaugeDescriptor& gauge, double p,
                          const CoareaOptions& opt = {});

struct PolyaSzegoOptions {
  double c_grid = 1.0;
};

struct PolyaSzegoResult {
  VerificationReport report;
  RadialProfile profile;
  double neumann_residual = 0.0;
};

PolyaSzegoResult polya_szego_check(const MaskedGrid& g, const Field& u, double lambda, double p,
                                   std::shared_ptr<const DriftField> drift, const PolyaSzegoOptions& opt = {});

}  // namespace capsym
