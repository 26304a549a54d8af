#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "capsym/gauge.hpp"
#include "capsym/geometry.hpp"
#include "capsym/verify.hpp"

namespace capsym {

// Malformed or out-of-range configuration; the message carries the line or key.
struct ConfigError : InvalidInput {
  using InvalidInput::InvalidInput;
};

struct ObstacleSpec {
  std::string kind = "halfspace";  // halfspace | ball | polytope
  Vec normal;                      // halfspace; defaults to e_n
  double offset = 0.0;
  Vec center;                      // ball; defaults to the origin
  double radius = 1.0;
  std::vector<std::pair<Vec, double>> planes;  // polytope
};

struct OuterSpec {
  std::string kind = "cap";  // cap | ball | box | lshape
  Vec center;
  double radius = 1.0;
  Vec lo, hi;
};

struct ExperimentConfig {
  std::string experiment;  // polya_szego | sobolev | moser | talenti | bossel_daners
  ObstacleSpec obstacle;
  OuterSpec outer;
  double lambda = 0.0;
  double p = 2.0;
  int n = 2;
  double spacing = 1.0 / 64.0;
  std::vector<double> spacings;  // optional refinement sweep (margin-vs-h)
  std::uint64_t seed = 1;
  std::string drift = "auto";    // auto | analytic | numeric
  MoserConvention moser_convention = MoserConvention::Proposition;

  // Tolerance overrides.
  std::optional<double> c_grid;
  std::optional<double> solver_tolerance;
  std::optional<double> eigen_tolerance;

  // Output paths, relative to the output directory unless absolute.
  std::string report_path = "report.jsonl";
  std::string csv_path;
  std::string svg_path;

  // Experiment parameters.
  int samples = 1;
  std::string source = "constant";  // constant | indicator
  double source_radius = 0.5;
  std::vector<int> moser_k;
  std::vector<double> moser_scales{1.0, 1.1};
  std::vector<double> sobolev_radii{4.0, 8.0, 16.0};
  double sobolev_spacing = 0.125;
};

// Accepts "polya-szego" as well as "polya_szego".
std::string canonical_experiment(const std::string& name);
const std::vector<std::string>& experiment_names();

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Range checks shared by the parser and programmatic callers.
void validate_config(const ExperimentConfig& cfg);

ConvexObstacle make_obstacle(const ExperimentConfig& cfg);
Region make_outer(const ExperimentConfig& cfg);
MaskedGrid make_grid(const ExperimentConfig& cfg, double h);
// Obstacle gauge with the closed-form drift when one exists, else a numerical h.
GaugeDescriptor make_gauge(const ExperimentConfig& cfg, const MaskedGrid& grid);

}  // namespace capsym
