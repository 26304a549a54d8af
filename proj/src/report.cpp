#include "capsym/report.hpp"

#include <algorithm>
#include <cmath>

#include "capsym/core.hpp"

namespace capsym {

bool VerificationReport::identity() const {
  return metadata.contains("kind") && metadata["kind"] == "identity";
}

void VerificationReport::finalize() {
  margin = lhs - rhs;
  if (!std::isfinite(lhs) || !std::isfinite(rhs) || !std::isfinite(tolerance)) {
    passed = false;
    return;
  }
  passed = identity() ? std::abs(margin) <= tolerance : margin >= -tolerance;
}

void VerificationReport::flag_rigidity(const std::string& label, double factor) {
  const bool near = std::abs(margin) < factor * tolerance;
  metadata["rigidity_candidate"] = near;
  if (near) metadata["rigidity_note"] = label;
}

Json VerificationReport::to_json() const {
  Json j;
  j["experiment"] = experiment;
  j["params"] = params;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["margin"] = margin;
  j["tolerance"] = tolerance;
  j["passed"] = passed;
  j["metadata"] = metadata;
  return j;
}

std::string VerificationReport::to_line() const { return to_json().dump(-1, ' ', false, Json::error_handler_t::replace); }

VerificationReport VerificationReport::from_json(const Json& j) {
  VerificationReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.params = j.at("params");
  r.lhs = j.at("lhs").get<double>();
  r.rhs = j.at("rhs").get<double>();
  r.margin = j.at("margin").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  r.passed = j.at("passed").get<bool>();
  r.metadata = j.at("metadata");
  return r;
}

VerificationReport make_inequality(std::string experiment, double lhs, double rhs, double tolerance) {
  VerificationReport r;
  r.experiment = std::move(experiment);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tolerance;
  r.metadata["kind"] = "inequality";
  r.finalize();
  return r;
}

VerificationReport make_identity(std::string experiment, double lhs, double rhs, double tolerance) {
  VerificationReport r = make_inequality(std::move(experiment), lhs, rhs, tolerance);
  r.metadata["kind"] = "identity";
  r.finalize();
  return r;
}

double grid_tolerance(double c_grid, double h, double scale) {
  return std::max(1e-8, c_grid * h * std::abs(scale));
}

}  // namespace capsym
