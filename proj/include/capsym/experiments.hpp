#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "capsym/config.hpp"
#include "capsym/io.hpp"
#include "capsym/report.hpp"

namespace capsym {

// Smooth non-negative field: a seeded sum of Gaussian bumps tapered to vanish
// on the outer boundary (Dirichlet cells are zeroed).
Field random_admissible_field(const MaskedGrid& g, std::uint64_t seed);

struct ExperimentOutput {
  std::vector<VerificationReport> reports;
  std::map<std::string, CsvTable> tables;  // keyed by file stem
  std::map<std::string, SvgPlot> plots;
};

// Runs one configured experiment in memory; errors propagate as exceptions.
ExperimentOutput compute_experiment(const ExperimentConfig& cfg);

struct RunOptions {
  std::string out_dir = ".";
  bool svg = false;
  std::optional<std::uint64_t> seed;  // overrides the config seed
  int jobs = 1;
};

struct RunResult {
  int exit_code = 0;  // 0 all passed, 1 some failed, 2 error
  std::vector<VerificationReport> reports;
  std::vector<std::string> artifacts;
  std::vector<std::string> errors;
};

// Runs the configs on a pool of `jobs` workers; outputs are written in input order.
RunResult run_batch(const std::vector<ExperimentConfig>& configs, const RunOptions& opt);
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt);

}  // namespace capsym
