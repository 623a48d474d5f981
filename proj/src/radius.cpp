#include "psn/radius.hpp"

#include <algorithm>
#include <cmath>

#include "psn/norms.hpp"

namespace psn {

RadiusEstimate radius_from_spectrum(const Field& u, double floor_rel) {
  const GridSpec& grid = u.grid();
  const int half = grid.nyquist();
  double cmax = 0.0;
  for (int k = 0; k <= half; ++k) cmax = std::max(cmax, std::abs(u.coeffs()[k]));
  if (cmax == 0.0) throw Error(Errc::insufficient_band, "zero field has no spectral decay");
  const double floor = floor_rel * cmax;

  int k_hi = -1;
  for (int k = half; k >= 1; --k) {
    if (std::abs(u.coeffs()[k]) > floor) {
      k_hi = k;
      break;
    }
  }
  const double xi_lo = grid.xi_max() / 4.0;
  RadiusEstimate est;
  est.xi_lo = xi_lo;
  est.floor_hit = k_hi < half;

  std::vector<double> xs, ys;
  for (int k = 1; k <= (k_hi < 0 ? -1 : k_hi); ++k) {
    const double xik = grid.xi(k);
    if (xik < xi_lo) continue;
    const double a = std::abs(u.coeffs()[k]);
    if (a <= floor) continue;  // sub-floor dips inside the band carry no signal
    xs.push_back(xik);
    ys.push_back(std::log(a));
  }
  if (xs.size() < 8)
    throw Error(Errc::insufficient_band,
                "only " + std::to_string(xs.size()) + " usable modes above the floor");
  est.xi_hi = xs.back();
  est.n_modes = static_cast<int>(xs.size());

  const int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  if (!(slope < 0.0))
    throw Error(Errc::insufficient_band, "spectrum does not decay over the fit band");
  est.r_measured = -slope;

  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (int i = 0; i < n; ++i) {
    const double fit = intercept + slope * xs[i];
    ss_res += (ys[i] - fit) * (ys[i] - fit);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  est.fit_r2 = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  return est;
}

double BoundConstants::L3() const { return std::exp(L3_log); }

BoundConstants bound_constants_from_norm(double u0_km, double sigma0, double mu_bound) {
  if (!(sigma0 < 0.0)) throw Error(Errc::invalid_parameter, "sigma0 must be negative");
  if (!(mu_bound >= 1.0)) throw Error(Errc::invalid_parameter, "mu_bound must be >= 1");
  if (!(u0_km > 0.0) || !std::isfinite(u0_km))
    throw Error(Errc::invalid_parameter, "||u0||_{sigma0,2} must be positive");
  BoundConstants c;
  c.sigma0 = sigma0;
  c.mu_bound = mu_bound;
  c.u0_km = u0_km;
  const double sqrt2 = std::sqrt(2.0);
  c.K = 144.0 * mu_bound;
  c.B = 72.0 * mu_bound;
  c.L1 = 28.0 * sqrt2 / 9.0 * u0_km;
  // A = (4 sqrt2 / (9 mu))(4 + 3 mu) ||u0|| = L1 (4 + 3 mu)/(7 mu); the factor
  // is <= 1 for mu >= 1, which keeps A <= L1 in floating point as well.
  c.A = c.L1 * ((4.0 + 3.0 * mu_bound) / (7.0 * mu_bound));
  c.L2 = c.B;
  c.L3_log = sigma0 + c.L1;
  if (c.A > c.L1) throw Error(Errc::internal_inconsistency, "A exceeds L1");
  return c;
}

BoundConstants bound_constants(const Field& u0, double sigma0, double mu_bound) {
  if (!(sigma0 < 0.0)) throw Error(Errc::invalid_parameter, "sigma0 must be negative");
  const int m = adaptive_km_order(u0, sigma0);
  const KMParams p{sigma0, m};
  BoundConstants c = bound_constants_from_norm(km_norm(u0, p), sigma0, mu_bound);
  c.km_order = m;
  c.u0_unresolved = km_tail_share(u0, p) > 1e-6;
  return c;
}

double sigma_of_t(const BoundConstants& c, double t) {
  if (!(t >= 0.0)) throw Error(Errc::invalid_parameter, "t must be >= 0");
  return c.sigma0 - c.A * std::expm1(c.B * t);
}

double rho_log_of_t(const BoundConstants& c, double t) {
  return std::log(0.5) + 2.0 * std::log(c.u0_km) + c.K * t;
}

double rho_of_t(const BoundConstants& c, double t) {
  if (!(t >= 0.0)) throw Error(Errc::invalid_parameter, "t must be >= 0");
  return std::exp(rho_log_of_t(c, t));
}

double lower_bound_r_log(const BoundConstants& c, double t) {
  if (!(t >= 0.0)) throw Error(Errc::invalid_parameter, "t must be >= 0");
  // log L3 - L1 e^{L2 t} = sigma0 + L1 (1 - e^{L2 t})
  return c.sigma0 - c.L1 * std::expm1(c.L2 * t);
}

double lower_bound_r(const BoundConstants& c, double t) {
  return std::exp(lower_bound_r_log(c, t));
}

std::vector<RadiusRow> track(const std::vector<EvolutionState>& states, const BoundConstants& c) {
  std::vector<RadiusRow> rows;
  rows.reserve(states.size());
  for (const auto& st : states) {
    RadiusRow row;
    row.t = st.t;
    row.sigma_t = sigma_of_t(c, st.t);
    row.log_lower_bound = lower_bound_r_log(c, st.t);
    try {
      const RadiusEstimate est = radius_from_spectrum(st.u);
      row.r_measured = est.r_measured;
      row.fit_r2 = est.fit_r2;
      row.pass = std::log(est.r_measured) >= row.log_lower_bound;
    } catch (const Error&) {
      row.flagged = true;
    }
    const int m = adaptive_km_order(st.u, row.sigma_t);
    row.phi_log = phi_log(st.u, KMParams{row.sigma_t, m});
    row.rho_log = rho_log_of_t(c, st.t);
    row.phi_ok = row.phi_log <= row.rho_log;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace psn
