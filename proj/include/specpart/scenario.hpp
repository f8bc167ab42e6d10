#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specpart/partition.hpp"

namespace specpart {

/// Region, window and step read from a config's "domain" object:
///   {"region": {...}, "window": {"lo": [..], "hi": [..]}, "h": 0.1}
/// The dimension follows the length of window.lo (1 or 2).
struct DomainSpec {
  GridSpec grid;
  Region region;
  DomainMask mask() const { return build_mask(region, grid, "domain"); }
};

DomainSpec parse_domain(const nlohmann::json& j);

struct ScenarioConfig {
  std::string mode = "solve";  // solve | threshold | persson | ring | ims | example
  nlohmann::json raw;          // echoed into every report
  std::optional<DomainSpec> domain;
  Potential potential;
  int k = 1;
  double p = 1.0;
  std::string seed_policy = "voronoi";  // or "ring"
  OptimizeOptions opt;
  std::vector<double> schedule = default_p_schedule();
  int eigs = 0;
  std::vector<double> radii;
  SweepOptions sweep;
  std::optional<double> sigma, lambda_prev, lambda_k;
  double eps = 0.05;
  RingOptions ring;
  std::vector<double> ims_n;
  std::string ims_field = "ground_state";  // or "random"
  Point ims_center{0.0, 0.0};
  std::string example;
  nlohmann::json params = nlohmann::json::object();
  bool dump_fields = true;
  bool pgm = true;
};

/// Throws ValidationError on any malformed or inconsistent entry.
ScenarioConfig parse_config(const nlohmann::json& j);

/// Runs the scenario; with a non-empty `out` the report and all artifacts
/// are written there. The returned report always carries a "summary"
/// object with the headline numbers (energy, max_lambda, gap, sigma,
/// threshold, lambda_1 where they apply).
nlohmann::json run(const ScenarioConfig& cfg, const std::filesystem::path& out = {});

std::vector<std::string> example_names();

/// Axis is one of R, p, k, h. One row per value; failing rows are recorded
/// with their error kind and the sweep continues. Writes sweep.csv and
/// sweep.json when `out` is non-empty.
nlohmann::json run_sweep(const nlohmann::json& config, const std::string& axis, std::span<const double> values,
                         const std::filesystem::path& out = {});
std::string sweep_csv(const nlohmann::json& sweep);

/// Machine-readable error report and the matching exit status (2 for
/// invalid input, 3 for numerical failure).
nlohmann::json error_json(const std::exception& e);
int exit_status(const std::exception& e);

}  // namespace specpart
