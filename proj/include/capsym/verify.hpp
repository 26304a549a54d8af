#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "capsym/gauge.hpp"
#include "capsym/geometry.hpp"
#include "capsym/pde.hpp"
#include "capsym/rearrange.hpp"
#include "capsym/report.hpp"

namespace capsym {

// Two published normalisations of the Moser-Trudinger exponent.
enum class MoserConvention { Proposition, Theorem };

std::string to_string(MoserConvention c);
MoserConvention parse_moser_convention(const std::string& text);

struct MoserConstants {
  double lambda = 0.0;
  int n = 2;
  double kappa_tilde = 0.0;   // volume of the Wulff ball {F_lambda^o <= 1}
  double lambda_tilde = 0.0;  // critical exponent constant
  MoserConvention convention = MoserConvention::Proposition;

  // Proposition: n (n k/2)^(1/(n-1)); Theorem: n (2 n k)^(1/(n-1)).
  static MoserConstants make(double lambda, int n, MoserConvention c = MoserConvention::Proposition);
};

// int F(-grad u)^p / (int u^{p*})^{p/p*}, p* = np/(n-p).
double sobolev_quotient(const MaskedGrid& g, const Field& u, const GaugeDescriptor& gauge, double p);

// U(x) = c sigma^((n-p)/p) (1 + (sigma F_lambda^o(x - x0))^(p/(p-1)))^(-(n-p)/p).
struct Extremal {
  double lambda = 0.0;
  double p = 2.0;
  int n = 3;
  double sigma = 1.0;
  double c = 1.0;
  Vec x0;

  double profile(double rho) const;   // U as a function of F_lambda^o(x - x0)
  double dprofile(double rho) const;  // its derivative in rho
  double operator()(const double* x) const;
};

Extremal extremal_family(double lambda, double p, int n, double sigma, Vec x0 = {});

struct BestConstantOptions {
  double h = 0.125;           // grid spacing in units of the extremal scale
  bool subcritical = true;
  int subcritical_steps = 4;  // exponents p_k = p + (p* - p)(1 - 2^-k)
  int starts = 3;             // random starts per exponent
  int iterations = 400;
  double subcritical_cells = 14.0;  // cells per cap radius for the subcritical grid
  std::uint64_t seed = 1;
};

struct BestConstantEstimate {
  double lambda = 0.0, p = 2.0;
  int n = 3;
  double estimate = 0.0;  // extrapolated cut-off quotient
  std::vector<double> radii;
  std::vector<double> quotients;
  std::vector<double> exponents;  // subcritical p_k
  std::vector<double> a_raw;      // best quotient found starting at each p_k
  std::vector<double> a_pooled;   // min over every candidate found
  bool non_increasing = true;     // a_pooled is non-increasing in k

  Json trace() const;
};

// Cut-off extremals eta u_1 on caps of the given radii (eta = 1 on the inner
// half, 0 at the rim), extrapolated in the radius; optional subcritical sweep.
BestConstantEstimate best_constant_estimate(double lambda, double p, int n, const std::vector<double>& radii,
                                            const BestConstantOptions& opt = {});

// int exp(scale lambda_tilde u^(n/(n-1))); requires int F(-grad u)^n <= 1 + 1e-10.
double moser_functional(const MaskedGrid& g, const Field& u, const GaugeDescriptor& gauge,
                        const MoserConstants& constants, double scale);

// min(log(1/rho), log(k+1)) with rho the cap coordinate, scaled to unit n-energy.
Field moser_sequence(int k, double lambda, int n, const MaskedGrid& g);

struct TalentiOptions {
  double c_grid = 1.0;
  SolverOptions solver;
  std::size_t profile_points = 256;
};

struct TalentiResult {
  VerificationReport report;
  MixedSolution solution;
  RadialSolution radial;
  std::vector<double> s;         // comparison mesh on (0, |Omega|)
  std::vector<double> u_sharp;   // u# on the mesh
  std::vector<double> v_sharp;   // v# on the mesh
};

TalentiResult talenti_compare(const MaskedGrid& g, const Field& f, const GaugeDescriptor& gauge,
                              const TalentiOptions& opt = {});

struct BosselDanersOptions {
  double c_grid = 1.0;
  EigenOptions eigen;
};

struct BosselDanersResult {
  VerificationReport report;
  EigenResult domain;
  EigenResult cap;
  double cap_radius = 0.0;
};

BosselDanersResult bossel_daners_compare(const MaskedGrid& g, const GaugeDescriptor& gauge,
                                         const BosselDanersOptions& opt = {});

}  // namespace capsym
