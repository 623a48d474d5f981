#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "psn/evolution.hpp"
#include "psn/geometry.hpp"
#include "psn/norms.hpp"

namespace psn {

/// Flat key-value run configuration. Parsing is strict: unknown keys are
/// rejected (with a nearest-key suggestion) and every value is typed.
struct RunConfig {
  // grid
  double L = 40.0;
  int N = 1024;
  // initial data
  std::string initial = "sech";
  double amplitude = 1.0;
  double width = 1.0;
  double base = 1.0;
  double eps = 0.1;
  int mode = 1;
  std::string initial_file;
  bool require_positive_momentum = true;
  // stepping
  double dt = 1e-3;
  double t_end = 1.0;
  double resolution_guard = 1e-10;
  double cfl_guard = 0.5;
  double breaking_ceiling = 1e3;
  double domain_mass_warn = 1e-12;
  std::vector<double> sample_times;  // empty = subcommand default
  // measurement parameters
  double gevrey_sigma = 1.0;
  double gevrey_s = 2.0;
  double km_sigma = -0.5;
  int km_m = 12;
  double hm_sigma = 0.5;
  int hm_m = 1;
  int hm_jmax = 16;
  double sigma0 = -0.1;
  std::string cs = "measured";  // "measured" or a positive number
  std::uint64_t seed = 42;
  // taylor / lifespan
  int taylor_order = 24;
  double u0_gnorm = 0.0;   // 0 = compute from the initial datum
  double lifespan_R = 0.0; // 0 = default R = ||u0||_{G^{1,s}}
  // geometry
  double mu_metric = 0.0;
  int m1 = -2;
  int sign = 1;
  double dt_stencil = 0.01;
  int curvature_snapshots = 9;
  double genericity_threshold_rel = kGenericityThresholdRel;
  // randomized suites
  int corpus_fields = 500;
  int corpus_kband = 0;  // 0 = N/6 - 1
  std::string out_dir = "out";

  GridSpec grid() const { return GridSpec(L, N); }
  InitialDataSpec initial_spec() const;
  StepConfig step_config() const;
  PSSParams pss_params() const;
  void validate() const;
};

RunConfig parse_config(std::istream& is, const std::string& source_name = "<config>");
RunConfig parse_config_file(const std::string& path);
/// Canonical serialization: every key, canonical order, 17-digit floats.
std::string serialize_config(const RunConfig& cfg);
/// Same content as serialize_config, as ordered key/value pairs (manifest echo).
std::vector<std::pair<std::string, std::string>> config_as_pairs(const RunConfig& cfg);

/// c_s to use in lifespan formulas, honoring cfg.cs = "measured"|number.
struct AlgebraConstant {
  double value = 0.0;
  bool measured = false;
  double raw_max = 0.0;   // measured max ratio before the safety factor
  int pairs = 0;
  std::uint64_t seed = 0;
};
AlgebraConstant resolve_cs(const RunConfig& cfg);

}  // namespace psn
