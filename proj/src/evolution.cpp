#include "psn/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "psn/norms.hpp"

namespace psn {

namespace {

// Applies the split-form multiplier to the spectrum of w = u^2:
// F_hat = (i xi (1 + 1/(1+xi^2)) + 1/(1+xi^2) - 1) w_hat.
Field apply_rhs_multiplier(const Field& w) {
  const GridSpec& grid = w.grid();
  std::vector<std::complex<double>> c(w.coeffs().begin(), w.coeffs().end());
  for (int k = 0; k <= grid.nyquist(); ++k) {
    const double xik = grid.xi(k);
    const double hk = 1.0 / (1.0 + xik * xik);
    const std::complex<double> mult(hk - 1.0, xik * (1.0 + hk));
    c[k] *= mult;
  }
  // Odd part of the multiplier has no conjugate partner at Nyquist; the
  // dealiased w is already zero there, so nothing to clear.
  return Field::from_spectrum(grid, std::move(c));
}

}  // namespace

void StepConfig::validate() const {
  if (!(dt > 0.0)) throw Error(Errc::invalid_parameter, "dt must be positive");
  if (!(t_end >= 0.0)) throw Error(Errc::invalid_parameter, "t_end must be >= 0");
  if (!(resolution_guard > 0.0)) throw Error(Errc::invalid_parameter, "resolution_guard must be positive");
  if (!(cfl_guard > 0.0)) throw Error(Errc::invalid_parameter, "cfl_guard must be positive");
}

Field rhs(const Field& u, double resolution_guard) {
  if (u.energy_tail() > resolution_guard)
    throw Error(Errc::under_resolved,
                "energy tail " + format_g17(u.energy_tail()) + " exceeds guard " +
                    format_g17(resolution_guard));
  return apply_rhs_multiplier(product(u, u));
}

double rhs_form_check(const Field& u) {
  const Field w = product(u, u);
  // convective form: dx w + dx L^{-2}(w + dx w)
  const Field wx = w.derivative(1);
  const Field form_a = wx + (w + wx).helmholtz_inverse().derivative(1);
  // split form: dx w - w + dx L^{-2} w + L^{-2} w
  const Field lw = w.helmholtz_inverse();
  const Field form_b = (wx - w) + (lw.derivative(1) + lw);
  return (form_a - form_b).max_abs();
}

Field momentum(const Field& u) { return u - u.derivative(2); }

DiagnosticsRecord diagnostics(const Field& u, double hs_index) {
  DiagnosticsRecord d;
  const Field m = momentum(u);
  d.m_l1 = m.integrate_abs();
  d.u_l1 = u.integrate_abs();
  d.u_h2 = sobolev_norm(u, 2.0);
  d.u_hs = sobolev_norm(u, hs_index);
  d.min_m = m.min_value();
  d.min_u = u.min_value();
  d.energy_tail = u.energy_tail();
  return d;
}

EvolutionState make_state(double t, Field u, double hs_index) {
  DiagnosticsRecord d = diagnostics(u, hs_index);
  return EvolutionState{t, std::move(u), d};
}

namespace {

void check_guards(const Field& u, double t, const StepConfig& cfg, double dt) {
  const double tail = u.energy_tail();
  if (tail > cfg.resolution_guard)
    throw Error(Errc::under_resolved, "t=" + format_g17(t) + " energy_tail=" + format_g17(tail));
  const double cfl = dt * u.max_abs() * u.grid().xi_max();
  if (cfl > cfg.cfl_guard)
    throw Error(Errc::cfl_exceeded, "t=" + format_g17(t) + " dt*max|u|*xi_max=" + format_g17(cfl));
  const double ux_max = u.derivative(1).max_abs();
  if (ux_max > cfg.breaking_ceiling)
    throw Error(Errc::wave_breaking_suspected,
                "t=" + format_g17(t) + " max|u_x|=" + format_g17(ux_max));
}

}  // namespace

EvolutionState step(const EvolutionState& state, const StepConfig& cfg, double dt,
                    double hs_index) {
  check_guards(state.u, state.t, cfg, dt);
  const Field& u = state.u;
  const Field k1 = rhs(u, cfg.resolution_guard);
  const Field k2 = rhs(linear_combination(1.0, u, 0.5 * dt, k1), cfg.resolution_guard);
  const Field k3 = rhs(linear_combination(1.0, u, 0.5 * dt, k2), cfg.resolution_guard);
  const Field k4 = rhs(linear_combination(1.0, u, dt, k3), cfg.resolution_guard);
  Field sum = linear_combination(1.0, k1, 2.0, k2);
  sum = linear_combination(1.0, sum, 2.0, k3);
  sum = linear_combination(1.0, sum, 1.0, k4);
  Field next = linear_combination(1.0, u, dt / 6.0, sum);
  return make_state(state.t + dt, std::move(next), hs_index);
}

EvolveResult evolve(const Field& u0, const StepConfig& cfg, std::vector<double> sample_times,
                    double hs_index) {
  cfg.validate();
  for (size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < 0.0 || sample_times[i] > cfg.t_end + 1e-12)
      throw Error(Errc::invalid_parameter, "sample time outside [0, t_end]");
    if (i > 0 && sample_times[i] <= sample_times[i - 1])
      throw Error(Errc::invalid_parameter, "sample times must be strictly increasing");
  }

  EvolveResult result;
  EvolutionState state = make_state(0.0, u0, hs_index);
  if (state.u.halfdomain_mass_fraction() > cfg.domain_mass_warn)
    result.events.push_back({0.0, "domain_mass",
                             "L2 mass fraction outside |x| <= L/2 is " +
                                 format_g17(state.u.halfdomain_mass_fraction())});

  std::vector<double> targets = std::move(sample_times);
  if (!targets.empty() && targets.front() == 0.0) {
    result.states.push_back(state);
    targets.erase(targets.begin());
  }
  targets.push_back(cfg.t_end);

  try {
    for (size_t ti = 0; ti < targets.size(); ++ti) {
      const double target = targets[ti];
      while (state.t < target - 1e-12 * std::max(1.0, target)) {
        const double dt = std::min(cfg.dt, target - state.t);
        state = step(state, cfg, dt, hs_index);
      }
      state.t = target;  // absorb roundoff from the landing step
      const bool duplicate = ti + 1 == targets.size() && !result.states.empty() &&
                             std::abs(result.states.back().t - target) < 1e-12;
      if (!duplicate) result.states.push_back(state);
      if (state.u.halfdomain_mass_fraction() > cfg.domain_mass_warn &&
          result.events.empty())
        result.events.push_back({state.t, "domain_mass",
                                 "L2 mass fraction outside |x| <= L/2 is " +
                                     format_g17(state.u.halfdomain_mass_fraction())});
    }
  } catch (const Error& e) {
    result.aborted = true;
    result.events.push_back({state.t, errc_name(e.code()), e.what()});
    if (result.states.empty() || result.states.back().t != state.t)
      result.states.push_back(state);  // last good state
  }
  return result;
}

Field initial_data(const GridSpec& grid, const InitialDataSpec& spec) {
  Field u = Field::zero(grid);
  switch (spec.kind) {
    case InitialKind::sech: {
      if (!(spec.amplitude != 0.0) || !(spec.width > 0.0))
        throw Error(Errc::invalid_parameter, "sech requires nonzero amplitude and positive width");
      u = Field::from_function(
          grid, [&](double x) { return spec.amplitude / std::cosh(x / spec.width); });
      break;
    }
    case InitialKind::gaussian_momentum: {
      if (!(spec.amplitude > 0.0) || !(spec.width > 0.0))
        throw Error(Errc::invalid_parameter, "gaussian_momentum requires positive amplitude and width");
      Field m0 = Field::from_function(grid, [&](double x) {
        const double z = x / spec.width;
        return spec.amplitude * std::exp(-z * z);
      });
      u = m0.helmholtz_inverse();
      break;
    }
    case InitialKind::mode_perturbation: {
      if (spec.mode < 1 || spec.mode > grid.dealias_cutoff())
        throw Error(Errc::invalid_parameter, "mode index out of range");
      const double xi = grid.xi(spec.mode);
      Field m0 = Field::from_function(
          grid, [&](double x) { return spec.base + spec.eps * std::cos(xi * x); });
      u = m0.helmholtz_inverse();
      break;
    }
    case InitialKind::from_file: {
      std::ifstream is(spec.file);
      if (!is) throw Error(Errc::io_error, "cannot open " + spec.file);
      u = Field::load_samples_csv(is);
      if (!(u.grid() == grid))
        throw Error(Errc::grid_mismatch, "file grid does not match configured grid");
      break;
    }
  }
  if (spec.require_positive_momentum) {
    const Field m0 = momentum(u);
    const double tol = 1e-12 * std::max(1.0, m0.max_abs());
    if (m0.min_value() < -tol)
      throw Error(Errc::positivity_violation,
                  "constructed m0 has min " + format_g17(m0.min_value()));
  }
  return u;
}

}  // namespace psn
