#pragma once

#include <string>

#include <json.hpp>

namespace capsym {

using Json = nlohmann::ordered_json;

// One experiment outcome. Inequality reports pass when margin >= -tolerance.
// Identity reports (metadata.kind == "identity") pass when |margin| <= tolerance.
struct VerificationReport {
  std::string experiment;
  Json params = Json::object();
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  Json metadata = Json::object();

  bool identity() const;
  // Recomputes margin and passed from lhs, rhs, tolerance and kind.
  void finalize();
  // Sets the rigidity flag when |margin| < factor * tolerance.
  void flag_rigidity(const std::string& label, double factor = 5.0);

  Json to_json() const;
  std::string to_line() const;
  static VerificationReport from_json(const Json& j);
};

VerificationReport make_inequality(std::string experiment, double lhs, double rhs, double tolerance);
VerificationReport make_identity(std::string experiment, double lhs, double rhs, double tolerance);

// Default tolerance rule: max(1e-8, c_grid * h * scale).
double grid_tolerance(double c_grid, double h, double scale);

}  // namespace capsym
