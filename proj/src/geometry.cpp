#include "psn/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "psn/evolution.hpp"

namespace psn {

namespace {

Field constant_field(const GridSpec& grid, double value) {
  return Field::from_samples(grid, std::vector<double>(grid.n_points, value));
}

}  // namespace

void PSSParams::validate() const {
  if (m1 != -2 && m1 != 1) throw Error(Errc::invalid_parameter, "m1 must be -2 or 1");
  if (sign != 1 && sign != -1) throw Error(Errc::invalid_parameter, "sign must be +1 or -1");
  if (!std::isfinite(mu_metric)) throw Error(Errc::invalid_parameter, "mu_metric must be finite");
}

Field psi(const Field& u, const PSSParams& p) {
  p.validate();
  const Field ux = u.derivative(1);
  const Field uux = product(u, ux);
  const Field ux2 = product(ux, ux);
  const Field u2 = product(u, u);
  Field r = linear_combination(4.0 / p.m1, uux, -2.0, ux2);
  return linear_combination(1.0, r, -2.0, u2);
}

OneForms one_forms(const Field& u, const Field& u_t, const PSSParams& p) {
  p.validate();
  const GridSpec& grid = u.grid();
  const double q = std::sqrt(1.0 + p.mu_metric * p.mu_metric);
  const double sq = p.sign * q;
  const Field m = momentum(u);
  const Field g2 = linear_combination(2.0, product(u, m), 1.0, psi(u, p));  // 2um + psi

  Field f11 = m;
  Field f12 = g2;
  Field f21 = linear_combination(p.mu_metric, m, 1.0, constant_field(grid, sq * p.m1));
  Field f22 = p.mu_metric * g2;
  Field f31 = linear_combination(sq, m, 1.0, constant_field(grid, p.m1 * p.mu_metric));
  Field f32 = sq * g2;
  return OneForms{std::move(f11), std::move(f12), std::move(f21),
                  std::move(f22), std::move(f31), std::move(f32), u, u_t, p};
}

MetricSample metric(const OneForms& forms, double t) {
  const Field E = product(forms.f11, forms.f11) + product(forms.f21, forms.f21);
  const Field F = product(forms.f11, forms.f12) + product(forms.f21, forms.f22);
  const Field G = product(forms.f12, forms.f12) + product(forms.f22, forms.f22);

  // Cross-check against the expanded closed-form components in terms of
  // m and 2um + psi, grouped differently from the defining sums of squares.
  const PSSParams& p = forms.params;
  const double mu = p.mu_metric;
  const double q2 = 1.0 + mu * mu;
  const double sq = p.sign * std::sqrt(q2);
  const Field& m = forms.f11;
  const Field& g2 = forms.f12;
  const GridSpec& grid = m.grid();
  // E = (1+mu^2) m^2 + 2 mu m1 (sign q) m + m1^2 (1+mu^2)
  Field E_ref = linear_combination(q2, product(m, m), 2.0 * mu * p.m1 * sq, m);
  E_ref = E_ref + constant_field(grid, static_cast<double>(p.m1) * p.m1 * q2);
  // F = g2 [(1+mu^2) m + m1 mu (sign q)]
  const Field F_ref =
      product(g2, linear_combination(q2, m, 1.0, constant_field(grid, p.m1 * mu * sq)));
  // G = (1+mu^2) g2^2
  const Field G_ref = q2 * product(g2, g2);

  const double scale = std::max({E.max_abs(), F.max_abs(), G.max_abs(), 1.0});
  const double worst =
      std::max({(E - E_ref).max_abs(), (F - F_ref).max_abs(), (G - G_ref).max_abs()});
  if (worst > 1e-10 * scale)
    throw Error(Errc::internal_inconsistency,
                "metric routes disagree by " + format_g17(worst / scale) + " of scale");

  Field det = product(E, G) - product(F, F);
  Field gen = product(forms.f11, forms.f22) - product(forms.f12, forms.f21);
  return MetricSample{t, E, F, G, std::move(det), std::move(gen)};
}

Field genericity_indicator(const OneForms& forms) {
  return product(forms.f11, forms.f22) - product(forms.f12, forms.f21);
}

AknsPair akns_matrices(const OneForms& forms) {
  auto half = [](const Field& f) { return 0.5 * f; };
  AknsPair p{{half(forms.f21), half(forms.f11 - forms.f31), half(forms.f11 + forms.f31),
              -0.5 * forms.f21},
             {half(forms.f22), half(forms.f12 - forms.f32), half(forms.f12 + forms.f32),
              -0.5 * forms.f22}};
  return p;
}

double zero_curvature_residual(const Field& u, const Field& u_t, const PSSParams& p) {
  p.validate();
  if (p.m1 != -2)
    throw Error(Errc::invalid_parameter,
                "the AKNS formulation is carried by the m1 = -2 branch only");
  const Field m_t = momentum(u_t);
  const OneForms forms = one_forms(u, u_t, p);
  const AknsPair akns = akns_matrices(forms);

  // d/dt of X through m: f11_t = m_t, f21_t = mu m_t, f31_t = (sign q) m_t.
  const double mu = p.mu_metric;
  const double sq = p.sign * std::sqrt(1.0 + mu * mu);
  const std::array<Field, 4> xt = {0.5 * (mu * m_t), 0.5 * ((1.0 - sq) * m_t),
                                   0.5 * ((1.0 + sq) * m_t), -0.5 * (mu * m_t)};
  const std::array<Field, 4> tx = {akns.T[0].derivative(1), akns.T[1].derivative(1),
                                   akns.T[2].derivative(1), akns.T[3].derivative(1)};

  const int n = u.grid().n_points;
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x11 = akns.X[0].samples()[j], x12 = akns.X[1].samples()[j];
    const double x21 = akns.X[2].samples()[j], x22 = akns.X[3].samples()[j];
    const double t11 = akns.T[0].samples()[j], t12 = akns.T[1].samples()[j];
    const double t21 = akns.T[2].samples()[j], t22 = akns.T[3].samples()[j];
    const double c11 = x12 * t21 - t12 * x21;
    const double c12 = x11 * t12 + x12 * t22 - (t11 * x12 + t12 * x22);
    const double c21 = x21 * t11 + x22 * t21 - (t21 * x11 + t22 * x21);
    const double c22 = x21 * t12 - t21 * x12;
    const double r11 = xt[0].samples()[j] - tx[0].samples()[j] + c11;
    const double r12 = xt[1].samples()[j] - tx[1].samples()[j] + c12;
    const double r21 = xt[2].samples()[j] - tx[2].samples()[j] + c21;
    const double r22 = xt[3].samples()[j] - tx[3].samples()[j] + c22;
    worst = std::max({worst, std::abs(r11), std::abs(r12), std::abs(r21), std::abs(r22)});
  }
  return worst;
}

double zero_curvature_residual(const Field& u, const PSSParams& p, double resolution_guard) {
  return zero_curvature_residual(u, rhs(u, resolution_guard), p);
}

namespace {

double det3(const std::array<double, 9>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

}  // namespace

std::vector<CurvatureSlice> gaussian_curvature(const std::vector<MetricSample>& series,
                                               double dt_stencil, double threshold_rel) {
  if (series.size() < 5)
    throw Error(Errc::invalid_parameter, "need at least 5 consecutive metric snapshots");
  for (size_t i = 1; i < series.size(); ++i) {
    const double gap = series[i].t - series[i - 1].t;
    if (std::abs(gap - dt_stencil) > 1e-9 * std::max(1.0, dt_stencil))
      throw Error(Errc::invalid_parameter, "metric snapshots are not uniformly spaced");
  }
  const GridSpec& grid = series.front().E.grid();
  const int n = grid.n_points;

  double gen_max = 0.0;
  for (const auto& ms : series) gen_max = std::max(gen_max, ms.genericity.max_abs());
  if (gen_max <= 0.0)
    throw Error(Errc::domain_error, "metric is degenerate everywhere at the given threshold");
  const double threshold = threshold_rel * gen_max;

  std::vector<CurvatureSlice> out;
  bool any_eval = false;
  for (size_t i = 2; i + 2 < series.size(); ++i) {
    const auto& ms = series[i];
    auto d1 = [&](auto&& get) {
      std::vector<double> r(static_cast<size_t>(n));
      for (int j = 0; j < n; ++j)
        r[j] = (-get(i + 2, j) + 8.0 * get(i + 1, j) - 8.0 * get(i - 1, j) + get(i - 2, j)) /
               (12.0 * dt_stencil);
      return r;
    };
    auto d2 = [&](auto&& get) {
      std::vector<double> r(static_cast<size_t>(n));
      for (int j = 0; j < n; ++j)
        r[j] = (-get(i + 2, j) + 16.0 * get(i + 1, j) - 30.0 * get(i, j) +
                16.0 * get(i - 1, j) - get(i - 2, j)) /
               (12.0 * dt_stencil * dt_stencil);
      return r;
    };
    auto e_at = [&](size_t s, int j) { return series[s].E.samples()[j]; };
    auto f_at = [&](size_t s, int j) { return series[s].F.samples()[j]; };
    auto g_at = [&](size_t s, int j) { return series[s].G.samples()[j]; };

    const std::vector<double> E_t = d1(e_at);
    const std::vector<double> E_tt = d2(e_at);
    const std::vector<double> F_t = d1(f_at);
    const std::vector<double> G_t = d1(g_at);
    const Field F_tx = Field::from_samples(grid, F_t).derivative(1);
    const Field E_x = ms.E.derivative(1);
    const Field F_x = ms.F.derivative(1);
    const Field G_x = ms.G.derivative(1);
    const Field G_xx = ms.G.derivative(2);

    CurvatureSlice slice;
    slice.t = ms.t;
    slice.K.assign(static_cast<size_t>(n), 0.0);
    slice.evaluated.assign(static_cast<size_t>(n), 0);
    for (int j = 0; j < n; ++j) {
      if (std::abs(ms.genericity.samples()[j]) < threshold) continue;
      const double E = ms.E.samples()[j], F = ms.F.samples()[j], G = ms.G.samples()[j];
      const double det = E * G - F * F;
      const std::array<double, 9> m1 = {
          -0.5 * E_tt[j] + F_tx.samples()[j] - 0.5 * G_xx.samples()[j],
          0.5 * E_x.samples()[j],
          F_x.samples()[j] - 0.5 * E_t[j],
          F_t[j] - 0.5 * G_x.samples()[j],
          E,
          F,
          0.5 * G_t[j],
          F,
          G};
      const std::array<double, 9> m2 = {0.0,
                                        0.5 * E_t[j],
                                        0.5 * G_x.samples()[j],
                                        0.5 * E_t[j],
                                        E,
                                        F,
                                        0.5 * G_x.samples()[j],
                                        F,
                                        G};
      slice.K[j] = (det3(m1) - det3(m2)) / (det * det);
      slice.evaluated[j] = 1;
      slice.n_eval += 1;
      slice.max_abs_k_plus_one = std::max(slice.max_abs_k_plus_one, std::abs(slice.K[j] + 1.0));
      any_eval = true;
    }
    out.push_back(std::move(slice));
  }
  if (!any_eval)
    throw Error(Errc::domain_error, "metric is degenerate everywhere at the given threshold");
  return out;
}

WindowedField nongeneric_reference(const GridSpec& grid, NongenericKind kind, double a, double b,
                                   double lo, double hi, double taper_width) {
  if (!(lo < hi)) throw Error(Errc::invalid_parameter, "window is empty");
  if (!(taper_width > 0.0)) throw Error(Errc::invalid_parameter, "taper width must be positive");
  // The taper sits outside [lo, hi]: transitions are centered 7 widths out,
  // so the cutoff equals 1 to roundoff on the whole requested window.
  const double c_lo = lo - 7.0 * taper_width;
  const double c_hi = hi + 7.0 * taper_width;
  if (c_lo - 7.0 * taper_width < -grid.half_width || c_hi + 7.0 * taper_width > grid.half_width)
    throw Error(Errc::invalid_parameter, "window plus taper does not fit in the domain");
  auto radicand = [&](double x) -> double {
    return kind == NongenericKind::sqrt_exp_m2 ? a * std::exp(-x) + b : a * std::exp(2.0 * x) + b;
  };
  auto cutoff = [&](double x) {
    const double left = 0.5 * (1.0 + std::erf((x - c_lo) / taper_width));
    const double right = 0.5 * (1.0 + std::erf((c_hi - x) / taper_width));
    return left * right;
  };
  std::vector<double> s(static_cast<size_t>(grid.n_points));
  for (int j = 0; j < grid.n_points; ++j) {
    const double x = grid.x(j);
    const double chi = cutoff(x);
    if (chi < 1e-300) {
      s[j] = 0.0;
      continue;
    }
    double v;
    if (kind == NongenericKind::f_exp) {
      v = a * std::exp(x);  // f(t) e^x at a frozen time, f = a
    } else {
      const double rad = radicand(x);
      if (rad <= 0.0)
        throw Error(Errc::domain_error, "radicand is nonpositive at x=" + format_g17(x));
      v = std::sqrt(rad);
    }
    s[j] = v * chi;
  }
  return WindowedField{Field::from_samples(grid, std::move(s)), lo, hi};
}

}  // namespace psn
