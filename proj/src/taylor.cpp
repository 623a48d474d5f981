#include "psn/taylor.hpp"

#include <cmath>
#include <limits>

#include "psn/norms.hpp"

namespace psn {

Field bilinear_q(const Field& v, const Field& w) {
  const Field p = product(v, w);
  const GridSpec& grid = p.grid();
  std::vector<std::complex<double>> c(p.coeffs().begin(), p.coeffs().end());
  for (int k = 0; k <= grid.nyquist(); ++k) {
    const double xik = grid.xi(k);
    const double hk = 1.0 / (1.0 + xik * xik);
    c[k] *= std::complex<double>(hk - 1.0, xik * (1.0 + hk));
  }
  return Field::from_spectrum(grid, std::move(c));
}

TaylorSeries taylor_coefficients(const Field& u0, int order, double resolution_guard) {
  if (order < 0 || order > 40)
    throw Error(Errc::invalid_parameter, "order must be in [0, 40]");
  TaylorSeries s{u0.grid(), {}, {}, false};
  s.coeff.push_back(u0);
  s.h2_norms.push_back(sobolev_norm(u0, 2.0));
  for (int k = 0; k < order; ++k) {
    Field acc = bilinear_q(s.coeff[0], s.coeff[k]);
    for (int j = 1; j <= k; ++j)
      acc = acc + bilinear_q(s.coeff[j], s.coeff[k - j]);
    Field next = (1.0 / (k + 1)) * acc;
    if (next.energy_tail() > resolution_guard) {
      s.truncated = true;
      break;
    }
    s.h2_norms.push_back(sobolev_norm(next, 2.0));
    s.coeff.push_back(std::move(next));
  }
  return s;
}

Field taylor_eval(const TaylorSeries& series, double t) {
  if (series.coeff.empty()) throw Error(Errc::invalid_parameter, "empty series");
  Field acc = series.coeff.back();
  for (int k = static_cast<int>(series.coeff.size()) - 2; k >= 0; --k)
    acc = linear_combination(1.0, series.coeff[k], t, acc);
  return acc;
}

RadiusFit convergence_radius_estimate(const TaylorSeries& series) {
  const int kmax = static_cast<int>(series.coeff.size()) - 1;
  if (kmax < 8) throw Error(Errc::invalid_parameter, "need at least 8 coefficient orders");
  constexpr double kFloor = 1e-14;
  std::vector<double> ks, logs;
  for (int k = (kmax + 1) / 2; k <= kmax; ++k) {
    if (series.h2_norms[k] < kFloor) continue;
    ks.push_back(static_cast<double>(k));
    logs.push_back(std::log(series.h2_norms[k]));
  }
  RadiusFit fit;
  if (ks.size() < 2) {
    fit.infinite = true;
    fit.radius = std::numeric_limits<double>::infinity();
    return fit;
  }
  const int n = static_cast<int>(ks.size());
  double sk = 0, sl = 0, skk = 0, skl = 0;
  for (int i = 0; i < n; ++i) {
    sk += ks[i];
    sl += logs[i];
    skk += ks[i] * ks[i];
    skl += ks[i] * logs[i];
  }
  const double denom = n * skk - sk * sk;
  const double slope = (n * skl - sk * sl) / denom;
  const double intercept = (sl - slope * sk) / n;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = logs[i] - (intercept + slope * ks[i]);
    ss += r * r;
  }
  fit.radius = std::exp(-slope);
  fit.fit_residual = std::sqrt(ss / n);
  fit.orders_used = n;
  return fit;
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(Errc::invalid_parameter, std::string(name) + " must be positive");
}

}  // namespace

LifespanReport lifespan_aot(double u0_gnorm, double R, double c_s) {
  require_positive(u0_gnorm, "u0_gnorm");
  require_positive(R, "R");
  require_positive(c_s, "c_s");
  LifespanReport r;
  r.u0_gnorm = u0_gnorm;
  r.R = R;
  r.c_s = c_s;
  const double inv_e = std::exp(-1.0);
  r.M = 3.0 * c_s * inv_e * u0_gnorm * u0_gnorm;
  r.L = 6.0 * c_s * inv_e * (R + u0_gnorm);
  r.T_aot = R / (16.0 * r.L * R + 8.0 * r.M);
  r.T_thm22 = lifespan_thm22(u0_gnorm, c_s);
  return r;
}

double lifespan_thm22(double u0_gnorm, double c_s) {
  require_positive(u0_gnorm, "u0_gnorm");
  require_positive(c_s, "c_s");
  return std::exp(1.0) / (216.0 * c_s * u0_gnorm);
}

}  // namespace psn
