#pragma once

#include <vector>

#include "psn/evolution.hpp"
#include "psn/field.hpp"

namespace psn {

struct RadiusEstimate {
  double r_measured = 0.0;  // fitted decay rate of log|u_hat| vs xi
  double fit_r2 = 0.0;
  double xi_lo = 0.0;
  double xi_hi = 0.0;
  bool floor_hit = false;  // spectrum fell below the floor inside the band;
                           // r_measured is then a lower-bound-only estimate
  int n_modes = 0;
};

/// Least-squares fit of log|u_hat_k| ~ c - r xi_k over the upper usable band
/// xi in [xi_max/4, last mode above floor]. Throws when fewer than 8 usable
/// modes remain or the fitted slope is not a decay.
RadiusEstimate radius_from_spectrum(const Field& u, double floor_rel = 1e-13);

/// Constants of the double-exponential lower bound on the analyticity radius.
struct BoundConstants {
  double sigma0 = -0.1;
  double mu_bound = 1.0;   // 1 + max_t ||u||_{H^2}
  double u0_km = 0.0;      // ||u0||_{sigma0,2} with certified truncation tail
  bool u0_unresolved = false;
  int km_order = 0;        // adaptive truncation order used for u0_km
  double K = 0.0;          // 144 mu
  double A = 0.0;          // (4 sqrt2 / (9 mu)) (4 + 3 mu) ||u0||
  double B = 0.0;          // 72 mu
  double L1 = 0.0;         // (28 sqrt2 / 9) ||u0||
  double L2 = 0.0;         // = B
  double L3_log = 0.0;     // log L3 = sigma0 + L1
  double L3() const;
};

BoundConstants bound_constants_from_norm(double u0_km, double sigma0, double mu_bound);
BoundConstants bound_constants(const Field& u0, double sigma0, double mu_bound);

/// sigma(t) = sigma0 - A (e^{B t} - 1).
double sigma_of_t(const BoundConstants& c, double t);
/// rho(t) = (1/2) ||u0||_{sigma0,2}^2 e^{K t}; use the log form for large t.
double rho_of_t(const BoundConstants& c, double t);
double rho_log_of_t(const BoundConstants& c, double t);
/// Lower bound L3 e^{-L1 e^{L2 t}}; underflows almost immediately, so the log
/// form is the primary interface.
double lower_bound_r_log(const BoundConstants& c, double t);
double lower_bound_r(const BoundConstants& c, double t);

struct RadiusRow {
  double t = 0.0;
  double r_measured = 0.0;
  double fit_r2 = 0.0;
  double sigma_t = 0.0;
  double log_lower_bound = 0.0;
  bool pass = false;     // log r_measured >= log lower bound
  bool flagged = false;  // insufficient band at this sample
  double phi_log = 0.0;  // log Phi_{sigma(t),m}(u(t)), adaptive m
  double rho_log = 0.0;
  bool phi_ok = false;   // Phi <= rho (log-space comparison)
};

/// Per-sample radius measurements against the theoretical curve.
std::vector<RadiusRow> track(const std::vector<EvolutionState>& states, const BoundConstants& c);

}  // namespace psn
