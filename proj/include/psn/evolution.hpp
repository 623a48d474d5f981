#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psn/field.hpp"

namespace psn {

struct DiagnosticsRecord {
  double m_l1 = 0.0;
  double u_l1 = 0.0;
  double u_h2 = 0.0;
  double u_hs = 0.0;
  double min_m = 0.0;
  double min_u = 0.0;
  double energy_tail = 0.0;
};

struct EvolutionState {
  double t = 0.0;
  Field u;
  DiagnosticsRecord diag;
};

enum class Scheme { rk4 };

struct StepConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::rk4;
  double resolution_guard = 1e-10;  // max allowed energy_tail
  double cfl_guard = 0.5;           // max allowed dt * max|u| * xi_max
  double breaking_ceiling = 1e3;    // abort when max|u_x| exceeds this
  double domain_mass_warn = 1e-12;  // warn when L2 mass outside |x| <= L/2 exceeds this
  void validate() const;
};

struct GuardEvent {
  double t = 0.0;
  std::string kind;
  std::string detail;
};

/// Right-hand side of the evolution in the smoothing-split form
/// F(u) = dx u^2 - u^2 + dx L^{-2} u^2 + L^{-2} u^2 (quadratic term dealiased).
Field rhs(const Field& u, double resolution_guard = 1e-10);

/// Max-norm difference between the two equivalent right-hand-side forms
/// (the convective form dx u^2 + dx L^{-2}(u^2 + dx u^2) versus the split form).
double rhs_form_check(const Field& u);

/// m = u - u_xx.
Field momentum(const Field& u);

DiagnosticsRecord diagnostics(const Field& u, double hs_index);
EvolutionState make_state(double t, Field u, double hs_index);

/// One classical RK4 step of size dt (guards checked on entry).
EvolutionState step(const EvolutionState& state, const StepConfig& cfg, double dt,
                    double hs_index);

struct EvolveResult {
  std::vector<EvolutionState> states;  // at sample times, plus the final state
  std::vector<GuardEvent> events;      // warnings plus the aborting guard, if any
  bool aborted = false;
};

/// Marches u0 to t_end, landing exactly on each requested sample time.
/// Guard violations abort the run; states collected so far are returned with
/// the aborting event recorded.
EvolveResult evolve(const Field& u0, const StepConfig& cfg, std::vector<double> sample_times,
                    double hs_index = 2.0);

enum class InitialKind { sech, gaussian_momentum, mode_perturbation, from_file };

struct InitialDataSpec {
  InitialKind kind = InitialKind::sech;
  double amplitude = 1.0;  // sech / gaussian amplitude
  double width = 1.0;      // sech / gaussian width
  double base = 1.0;       // constant momentum level for mode_perturbation
  double eps = 0.1;        // perturbation strength
  int mode = 1;            // perturbed wavenumber index
  std::string file;        // samples CSV for from_file
  bool require_positive_momentum = true;
};

/// Builds the initial datum. When positivity is required, configurations whose
/// discrete momentum dips below -1e-12 * max(m0) are rejected with the
/// violating minimum reported.
Field initial_data(const GridSpec& grid, const InitialDataSpec& spec);

}  // namespace psn
