#include "psn/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace psn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& t) {
  double mx = kNegInf;
  for (double v : t) mx = std::max(mx, v);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : t) s += std::exp(v - mx);
  return mx + std::log(s);
}

// Per-mode data with the spectral floor applied. Modes whose coefficient
// modulus falls below kSpectralFloorRel * max|c| carry only roundoff and are
// excluded (log_abs_c = -inf).
struct ModeData {
  std::vector<double> log_c2;      // 2 log|c_k|, -inf below floor
  std::vector<double> log_xi;      // log xi_k, -inf at k = 0
  std::vector<double> log_1pxi2;   // log(1 + xi_k^2)
  std::vector<double> log_2l_w;    // log(2L * mode multiplicity)
  std::vector<bool> top_band;      // |xi| >= 0.9 xi_max
  int n_modes = 0;
};

ModeData mode_data(const Field& f) {
  const GridSpec& g = f.grid();
  const int half = g.nyquist();
  ModeData md;
  md.n_modes = half + 1;
  md.log_c2.resize(md.n_modes);
  md.log_xi.resize(md.n_modes);
  md.log_1pxi2.resize(md.n_modes);
  md.log_2l_w.resize(md.n_modes);
  md.top_band.resize(md.n_modes);
  double cmax = 0.0;
  for (int k = 0; k <= half; ++k) cmax = std::max(cmax, std::abs(f.coeffs()[k]));
  const double floor = kSpectralFloorRel * cmax;
  const double log_2l = std::log(2.0 * g.half_width);
  for (int k = 0; k <= half; ++k) {
    const double a = std::abs(f.coeffs()[k]);
    md.log_c2[k] = (a >= floor && a > 0.0) ? 2.0 * std::log(a) : kNegInf;
    const double xik = g.xi(k);
    md.log_xi[k] = (k == 0) ? kNegInf : std::log(xik);
    md.log_1pxi2[k] = std::log1p(xik * xik);
    md.log_2l_w[k] = log_2l + ((k == 0 || k == half) ? 0.0 : std::log(2.0));
    md.top_band[k] = xik >= 0.9 * g.xi_max();
  }
  return md;
}

// log of || d^j f ||_{H^s}^2 from precomputed mode data.
double log_deriv_sq(const ModeData& md, int j, double s) {
  std::vector<double> terms;
  terms.reserve(md.n_modes);
  for (int k = 0; k < md.n_modes; ++k) {
    if (md.log_c2[k] == kNegInf) continue;
    double t = md.log_2l_w[k] + s * md.log_1pxi2[k] + md.log_c2[k];
    if (j > 0) {
      if (md.log_xi[k] == kNegInf) continue;
      t += 2.0 * j * md.log_xi[k];
    }
    terms.push_back(t);
  }
  return log_sum_exp(terms);
}

// log b_j for j = 0..m with b_j = (j!)^{-1} e^{sigma j} || d^j f ||_{H^2}.
std::vector<double> log_b(const ModeData& md, double sigma, int m) {
  std::vector<double> b(static_cast<size_t>(m) + 1);
  for (int j = 0; j <= m; ++j)
    b[j] = sigma * j - std::lgamma(j + 1.0) + 0.5 * log_deriv_sq(md, j, KMParams::s_base);
  return b;
}

double checked_exp(double logv, const char* what) {
  if (logv > 700.0)
    throw Error(Errc::invalid_parameter,
                std::string(what) + " exceeds double range; use the log-space variant");
  return std::exp(logv);
}

}  // namespace

void GevreyParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(Errc::invalid_parameter, "sigma must be > 0");
  if (!std::isfinite(s)) throw Error(Errc::invalid_parameter, "s must be finite");
}

void KMParams::validate() const {
  if (m < 0) throw Error(Errc::invalid_parameter, "m must be >= 0");
  if (!std::isfinite(sigma)) throw Error(Errc::invalid_parameter, "sigma must be finite");
}

void HMParams::validate() const {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw Error(Errc::invalid_parameter, "sigma must be in (0,1]");
  if (m < 1) throw Error(Errc::invalid_parameter, "m must be >= 1");
  if (j_max < 8) throw Error(Errc::invalid_parameter, "j_max must be >= 8");
}

double derivative_sobolev_log_norm(const Field& f, int j, double s) {
  return 0.5 * log_deriv_sq(mode_data(f), j, s);
}

double derivative_sobolev_norm(const Field& f, int j, double s) {
  const double lg = derivative_sobolev_log_norm(f, j, s);
  return lg == kNegInf ? 0.0 : std::exp(lg);
}

double sobolev_norm(const Field& f, double s) { return derivative_sobolev_norm(f, 0, s); }

GevreyResult gevrey_norm(const Field& f, const GevreyParams& p) {
  p.validate();
  const ModeData md = mode_data(f);
  std::vector<double> all, top;
  all.reserve(md.n_modes);
  for (int k = 0; k < md.n_modes; ++k) {
    if (md.log_c2[k] == kNegInf) continue;
    const double xik = f.grid().xi(k);
    const double t = md.log_2l_w[k] + 2.0 * p.sigma * xik + p.s * md.log_1pxi2[k] + md.log_c2[k];
    all.push_back(t);
    if (md.top_band[k]) top.push_back(t);
  }
  const double log_total = log_sum_exp(all);
  GevreyResult r;
  if (log_total == kNegInf) return r;
  r.value = checked_exp(0.5 * log_total, "gevrey norm");
  const double log_top = log_sum_exp(top);
  r.unresolved = log_top != kNegInf && log_top - log_total > std::log(1e-6);
  return r;
}

double km_log_norm(const Field& f, const KMParams& p) {
  p.validate();
  const auto b = log_b(mode_data(f), p.sigma, p.m);
  std::vector<double> t(b.size());
  for (size_t j = 0; j < b.size(); ++j) t[j] = 2.0 * b[j];
  return 0.5 * log_sum_exp(t);
}

double km_norm(const Field& f, const KMParams& p) {
  const double lg = km_log_norm(f, p);
  return lg == kNegInf ? 0.0 : checked_exp(lg, "km norm");
}

double km_sigma_derivative(const Field& f, const KMParams& p) {
  p.validate();
  const auto b = log_b(mode_data(f), p.sigma, p.m);
  std::vector<double> t;
  t.reserve(b.size());
  for (size_t j = 1; j < b.size(); ++j) {
    if (b[j] == kNegInf) continue;
    t.push_back(std::log(static_cast<double>(j)) + 2.0 * b[j]);
  }
  const double lg = log_sum_exp(t);
  return lg == kNegInf ? 0.0 : checked_exp(lg, "km sigma derivative");
}

double phi_log(const Field& f, const KMParams& p) {
  const double lg = km_log_norm(f, p);
  return lg == kNegInf ? kNegInf : std::log(0.5) + 2.0 * lg;
}

double phi(const Field& f, const KMParams& p) {
  const double lg = phi_log(f, p);
  return lg == kNegInf ? 0.0 : checked_exp(lg, "phi");
}

int adaptive_km_order(const Field& f, double sigma, double tail_rel, int m_cap) {
  const ModeData md = mode_data(f);
  const double log_tail = std::log(tail_rel);
  double running = kNegInf;  // log of the partial sum of squared terms
  for (int j = 0; j <= m_cap; ++j) {
    const double ld = log_deriv_sq(md, j, KMParams::s_base);
    const double term = ld == kNegInf ? kNegInf : 2.0 * (sigma * j - std::lgamma(j + 1.0)) + ld;
    if (term == kNegInf) return std::max(0, j - 1);
    if (running != kNegInf && j >= 2 && term - running < log_tail) return j;
    if (running == kNegInf) {
      running = term;
    } else {
      const double hi = std::max(running, term);
      const double lo = std::min(running, term);
      running = hi + std::log1p(std::exp(lo - hi));
    }
  }
  return m_cap;
}

double km_tail_share(const Field& f, const KMParams& p) {
  p.validate();
  const ModeData md = mode_data(f);
  // S_m(xi) = sum_j e^{2 sigma j} xi^{2j} / (j!)^2, accumulated per mode.
  std::vector<double> all, top;
  for (int k = 0; k < md.n_modes; ++k) {
    if (md.log_c2[k] == kNegInf) continue;
    std::vector<double> jt;
    jt.reserve(p.m + 1);
    for (int j = 0; j <= p.m; ++j) {
      double t = 2.0 * (p.sigma * j - std::lgamma(j + 1.0));
      if (j > 0) {
        if (md.log_xi[k] == kNegInf) continue;
        t += 2.0 * j * md.log_xi[k];
      }
      jt.push_back(t);
    }
    const double log_s = log_sum_exp(jt);
    const double term = md.log_2l_w[k] + 2.0 * md.log_1pxi2[k] + md.log_c2[k] + log_s;
    all.push_back(term);
    if (md.top_band[k]) top.push_back(term);
  }
  const double log_total = log_sum_exp(all);
  const double log_top = log_sum_exp(top);
  if (log_total == kNegInf || log_top == kNegInf) return 0.0;
  return std::exp(log_top - log_total);
}

HMResult hm_norm(const Field& f, const HMParams& p) {
  if (!(p.sigma > 0.0 && p.sigma <= 1.0)) throw Error(Errc::invalid_parameter, "sigma must be in (0,1]");
  if (p.m < 1) throw Error(Errc::invalid_parameter, "m must be >= 1");
  if (p.j_max < 0) throw Error(Errc::invalid_parameter, "j_max must be >= 0");
  const ModeData md = mode_data(f);
  HMResult r;
  double best = kNegInf;
  for (int j = 0; j <= p.j_max; ++j) {
    const double lg = j * std::log(p.sigma) + 2.0 * std::log(j + 1.0) - std::lgamma(j + 1.0) +
                      0.5 * log_deriv_sq(md, j, 2.0 * p.m);
    if (lg > best) {
      best = lg;
      r.argmax_j = j;
    }
  }
  r.value = best == kNegInf ? 0.0 : checked_exp(best, "hm norm");
  return r;
}

double h2_inner(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw Error(Errc::grid_mismatch, "inner product of different grids");
  const GridSpec& grid = f.grid();
  const int half = grid.nyquist();
  double s = 0.0;
  for (int k = 0; k <= half; ++k) {
    const double w = (k == 0 || k == half) ? 1.0 : 2.0;
    const double xik = grid.xi(k);
    const double wt = (1.0 + xik * xik) * (1.0 + xik * xik);
    s += w * wt * (f.coeffs()[k].real() * g.coeffs()[k].real() +
                   f.coeffs()[k].imag() * g.coeffs()[k].imag());
  }
  return 2.0 * grid.half_width * s;
}

double prop32_lhs(const Field& u, const Field& f_of_u, const KMParams& p) {
  p.validate();
  if (!(u.grid() == f_of_u.grid())) throw Error(Errc::grid_mismatch, "fields on different grids");
  const ModeData mu = mode_data(u);
  const ModeData mf = mode_data(f_of_u);
  const GridSpec& grid = u.grid();
  double acc = 0.0;
  for (int k = 0; k < mu.n_modes; ++k) {
    if (mu.log_c2[k] == kNegInf || mf.log_c2[k] == kNegInf) continue;
    std::vector<double> jt;
    jt.reserve(p.m + 1);
    for (int j = 0; j <= p.m; ++j) {
      double t = 2.0 * (p.sigma * j - std::lgamma(j + 1.0));
      if (j > 0) {
        if (mu.log_xi[k] == kNegInf) continue;
        t += 2.0 * j * mu.log_xi[k];
      }
      jt.push_back(t);
    }
    const double sm = checked_exp(log_sum_exp(jt), "prop32 weight");
    const double w = (k == 0 || k == grid.nyquist()) ? 1.0 : 2.0;
    const double xik = grid.xi(k);
    const double wt = (1.0 + xik * xik) * (1.0 + xik * xik);
    const double re = u.coeffs()[k].real() * f_of_u.coeffs()[k].real() +
                      u.coeffs()[k].imag() * f_of_u.coeffs()[k].imag();
    acc += w * wt * re * sm;
  }
  return std::abs(2.0 * grid.half_width * acc);
}

double prop32_kbar(double p) { return 144.0 * p; }
double prop32_alphabar(double p, double q) { return 64.0 * std::sqrt(q) * (4.0 + 3.0 * p); }

double prop32_rhs(const Field& u, const KMParams& p) {
  const double h2 = sobolev_norm(u, 2.0);
  const double ph = phi(u, p);
  const double dph = km_sigma_derivative(u, p);
  return prop32_kbar(h2) * ph + prop32_alphabar(h2, ph) * dph;
}

LemmaSides lemma32_sides(const Field& u, const KMParams& p) {
  p.validate();
  const auto blog = log_b(mode_data(u), p.sigma, p.m);
  std::vector<double> b(blog.size());
  for (size_t j = 0; j < blog.size(); ++j)
    b[j] = blog[j] == kNegInf ? 0.0 : checked_exp(blog[j], "lemma32 term");
  LemmaSides r;
  for (int j = 1; j <= p.m; ++j)
    for (int l = 1; l <= j; ++l) r.lhs += b[j] * b[l] * b[j - l];
  r.rhs = km_norm(u, p) * 2.0 * km_sigma_derivative(u, p);
  return r;
}

std::vector<IneqRow> operator_inequality_suite(const Field& f, double sigma, double sigma_prime,
                                               double s) {
  if (!(0.0 < sigma_prime && sigma_prime < sigma && sigma <= 1.0))
    throw Error(Errc::invalid_parameter, "require 0 < sigma' < sigma <= 1");
  const Field fx = f.derivative(1);
  std::vector<IneqRow> rows;

  const double lhs_a = gevrey_norm(fx, {sigma_prime, s}).value;
  const double rhs_a = std::exp(-1.0) / (sigma - sigma_prime) * gevrey_norm(f, {sigma, s}).value;
  rows.push_back({"dx_scale_shift", lhs_a, rhs_a, rhs_a - lhs_a, lhs_a <= rhs_a * (1.0 + 1e-12)});

  const double lhs_b = gevrey_norm(fx, {sigma, s}).value;
  const double rhs_b = gevrey_norm(f, {sigma, s + 1.0}).value;
  rows.push_back({"dx_index_shift", lhs_b, rhs_b, rhs_b - lhs_b, lhs_b <= rhs_b * (1.0 + 1e-12)});

  const double lhs_c = gevrey_norm(f.helmholtz_inverse(), {sigma, s}).value;
  const double rhs_c = gevrey_norm(f, {sigma, s - 2.0}).value;
  const double rel_c = rhs_c > 0.0 ? std::abs(lhs_c - rhs_c) / rhs_c : std::abs(lhs_c - rhs_c);
  rows.push_back({"helmholtz_index_shift_eq", lhs_c, rhs_c, rel_c, rel_c <= 1e-12});

  const double h2 = sobolev_norm(f, 2.0);
  const double lhs_d = sobolev_norm(product(f, f), 2.0);
  const double rhs_d = 8.0 * h2 * h2;
  rows.push_back({"h2_algebra", lhs_d, rhs_d, rhs_d - lhs_d, lhs_d <= rhs_d * (1.0 + 1e-12)});
  return rows;
}

Field random_band_limited(const GridSpec& grid, int k_band, double amplitude, std::uint64_t seed) {
  if (k_band < 1 || k_band > grid.dealias_cutoff())
    throw Error(Errc::invalid_parameter, "k_band must be in [1, dealias cutoff]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::complex<double>> c(static_cast<size_t>(grid.nyquist()) + 1, {0.0, 0.0});
  c[0] = {0.2 * unif(rng), 0.0};
  for (int k = 1; k <= k_band; ++k) {
    const double decay = 1.0 / (1.0 + 9.0 * static_cast<double>(k) * k / (k_band * k_band));
    c[k] = {decay * unif(rng), decay * unif(rng)};
  }
  Field raw = Field::from_spectrum(grid, std::move(c));
  const double mx = raw.max_abs();
  if (mx == 0.0) return raw;
  std::vector<std::complex<double>> scaled(raw.coeffs().begin(), raw.coeffs().end());
  for (auto& v : scaled) v *= amplitude / mx;
  return Field::from_spectrum(grid, std::move(scaled));
}

double measure_algebra_constant(const GridSpec& grid, double sigma, double s, int n_pairs,
                                std::uint64_t seed) {
  GevreyParams p{sigma, s};
  p.validate();
  // Keep individual bands at N/6 so products stay exactly resolved.
  const int k_band = std::max(2, grid.n_points / 6 - 1);
  double worst = 0.0;
  for (int i = 0; i < n_pairs; ++i) {
    const Field f = random_band_limited(grid, k_band, 1.0, seed + 2 * i);
    const Field g = random_band_limited(grid, k_band, 1.0, seed + 2 * i + 1);
    const double nf = gevrey_norm(f, p).value;
    const double ng = gevrey_norm(g, p).value;
    if (nf == 0.0 || ng == 0.0) continue;
    const double np = gevrey_norm(product(f, g), p).value;
    worst = std::max(worst, np / (nf * ng));
  }
  return worst;
}

}  // namespace psn
