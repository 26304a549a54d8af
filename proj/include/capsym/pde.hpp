#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "capsym/gauge.hpp"
#include "capsym/geometry.hpp"
#include "capsym/kernels.hpp"

namespace capsym {

struct MixedProblem {
  MaskedGrid grid;
  GaugeDescriptor gauge = GaugeDescriptor::euclidean(2);
  Field f;                     // source per cell
  double p = 2.0;
  std::optional<double> eps;   // regularisation length; defaults to the spacing
};

struct SolverOptions {
  double tolerance = 1e-8;     // relative gradient norm (diagonally scaled)
  int max_iterations = 100000;
  int memory = 10;
  Backend backend = Backend::Parallel;
};

struct MixedSolution {
  Field u;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> energy_trace;
};

// J(u) = (1/p) sum F_eps(-grad u)^p h^n - sum f u h^n over the solver stencil.
double mixed_energy(const MixedProblem& problem, const Field& u);

// Minimises J by limited-memory BFGS; u vanishes on Dirichlet cells.
MixedSolution solve_mixed_bvp(const MixedProblem& problem, const SolverOptions& opt = {});

// Non-increasing profile f#(s) on [0, total] together with G(xi) = int_0^xi f#.
struct SharpFunction {
  std::function<double(double)> value;
  std::vector<double> knots;  // breakpoints in (0, total), ascending
  double total = 0.0;

  static SharpFunction constant(double c, double total);
  // c on [0, width), zero afterwards.
  static SharpFunction step(double c, double width, double total);
  // Staircase of a rearranged grid field.
  static SharpFunction staircase(std::vector<double> values, double cell_volume);
  // Piecewise linear through (s_i, v_i); values must be non-increasing.
  static SharpFunction piecewise_linear(std::vector<double> s, std::vector<double> v);

  // G(xi) by adaptive quadrature between knots.
  double integral(double xi) const;
  // Prefix integrals at the knots (filled on first use by prepare()).
  void prepare();
  std::vector<double> knot_integral;
};

struct RadialSolution {
  double r = 0.0;
  double lambda = 0.0;
  int n = 2;
  double kappa = 0.0;
  std::vector<double> rho;  // ascending mesh on [0, r]
  std::vector<double> v;
  std::vector<double> dv;   // v'(rho)
  std::vector<double> s;    // kappa rho^n
  std::vector<double> v_sharp;
  std::vector<double> G;    // G(kappa rho^n)

  double value(double rho_x) const;  // cubic Hermite on the mesh
  double sharp(double s_x) const;    // v at rho = (s/kappa)^(1/n)
  // u*(x)-style evaluation v(F_lambda^o(x)).
  double at(const double* x) const;
};

RadialSolution solve_radial_ode(SharpFunction f_sharp, double r, double lambda, int n);

struct TalentiProfile {
  double omega = 0.0;
  double lambda = 0.0;
  int n = 2;
  std::vector<double> s;
  std::vector<double> values;
  double eval(double s_x) const;  // linear interpolation
};

// Upper profile (n kappa^(1/n))^-2 int_s^|Omega| xi^(2/n-2) G(xi) dxi.
TalentiProfile talenti_upper_profile(SharpFunction f_sharp, double omega_vol, double lambda, int n,
                                     const std::vector<double>* s_mesh = nullptr);

struct EigenOptions {
  double tolerance = 1e-10;  // relative spread of the quotient over the window
  int window = 20;
  int max_iterations = 200000;
  Backend backend = Backend::Parallel;
};

struct EigenResult {
  double eigenvalue = 0.0;
  Field eigenfunction;  // sum u^2 h^n = 1, non-negative
  std::vector<double> history;
  int iterations = 0;
};

double rayleigh_quotient(const MaskedGrid& g, const GaugeDescriptor& gauge, const Field& u);
EigenResult first_eigenvalue(const MaskedGrid& g, const GaugeDescriptor& gauge, const EigenOptions& opt = {});
double poincare_constant(const MaskedGrid& g, const GaugeDescriptor& gauge, const EigenOptions& opt = {});

struct QuotientMinimum {
  double quotient = 0.0;
  Field u;  // sum |u|^q h^n = 1, non-negative
  int iterations = 0;
};

// Projected Barzilai-Borwein descent on int F(-grad u)^p / ||u||_q^p from `start`.
// Stops after `max_iterations` or once the quotient spread over 20 steps is below
// `tolerance` (relative); returns the best iterate either way.
QuotientMinimum minimize_lq_quotient(const MaskedGrid& g, const GaugeDescriptor& gauge, double p, double q,
                                     const Field& start, int max_iterations, double tolerance = 1e-8,
                                     Backend backend = Backend::Parallel);

}  // namespace capsym
