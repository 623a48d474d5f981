#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "psn/config.hpp"

namespace psn {

/// Exit-code contract shared by every subcommand:
/// 0 = all assertions passed, 1 = a numerical assertion failed,
/// 2 = a solver guard aborted the run. Usage errors are reported by the CLI
/// as exit code 3.
struct RunOutcome {
  int exit_code = 0;
  std::vector<std::string> messages;
};

struct RunnerOptions {
  bool write_snapshots = false;   // evolve: per-sample field CSVs
  bool dump_metric = false;       // geometry-check: metric component CSVs
};

struct NormCheckRow {
  std::string test;
  int field_id = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
};

/// The seeded random-corpus inequality rows behind the norm-check subcommand.
std::vector<NormCheckRow> norm_check_rows(const RunConfig& cfg);

RunOutcome run_lifespan(const RunConfig& cfg, const std::string& out_dir, std::ostream& out);
RunOutcome run_evolve(const RunConfig& cfg, const std::string& out_dir, std::ostream& out,
                      const RunnerOptions& opts = {});
RunOutcome run_norm_check(const RunConfig& cfg, const std::string& out_dir, std::ostream& out);
RunOutcome run_taylor_compare(const RunConfig& cfg, const std::string& out_dir, std::ostream& out);
RunOutcome run_analyze_radius(const RunConfig& cfg, const std::string& out_dir, std::ostream& out);
RunOutcome run_geometry_check(const RunConfig& cfg, const std::string& out_dir, std::ostream& out,
                              const RunnerOptions& opts = {});

}  // namespace psn
