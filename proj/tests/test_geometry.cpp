#include <cmath>

#include "doctest.h"
#include "psn/evolution.hpp"
#include "psn/geometry.hpp"
#include "psn/norms.hpp"
#include "testutil.hpp"

using namespace psn;
using test::sech;

namespace {
const GridSpec kGrid(40.0, 1024);
const GridSpec kMid(40.0, 512);

OneForms forms_of(const Field& u, const PSSParams& p) { return one_forms(u, rhs(u), p); }
}  // namespace

TEST_CASE("psi: zero, constant and the sech closed form") {
  const PSSParams p{0.0, -2, 1};
  CHECK(psi(Field::zero(kMid), p).max_abs() == 0.0);

  const Field c = Field::from_function(kMid, [](double) { return 1.4; });
  const Field pc = psi(c, p);
  double worst = 0.0;
  for (double v : pc.samples()) worst = std::max(worst, std::abs(v + 2.0 * 1.4 * 1.4));
  CHECK(worst < 1e-12);

  // psi(m1 = -2) = -2 u u_x - 2 u_x^2 - 2 u^2 with u = sech
  const Field ps = psi(test::sech_field(kGrid), p);
  worst = 0.0;
  for (int j = 0; j < kGrid.n_points; ++j) {
    const double s = sech(kGrid.x(j)), tau = std::tanh(kGrid.x(j));
    const double ux = -s * tau;
    const double expect = -2.0 * s * ux - 2.0 * ux * ux - 2.0 * s * s;
    worst = std::max(worst, std::abs(ps.samples()[j] - expect));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("one forms at u = 0 reduce to constants") {
  for (int m1 : {-2, 1}) {
    for (int sign : {1, -1}) {
      const PSSParams p{0.7, m1, sign};
      const OneForms f = forms_of(Field::zero(kMid), p);
      const double q = std::sqrt(1.0 + 0.49);
      CHECK(f.f11.max_abs() == 0.0);
      CHECK(std::abs(f.f21.samples()[0] - sign * m1 * q) < 1e-12);
      CHECK(std::abs(f.f31.samples()[0] - m1 * 0.7) < 1e-12);
      CHECK(f.f12.max_abs() < 1e-12);
      CHECK(f.f22.max_abs() < 1e-12);
      CHECK(f.f32.max_abs() < 1e-12);
    }
  }
}

TEST_CASE("one forms specialize at mu = 0, sign +, m1 = 1") {
  const Field u = test::sech_field(kMid);
  const OneForms f = forms_of(u, PSSParams{0.0, 1, 1});
  const Field m = momentum(u);
  double worst21 = 0.0, worst31 = 0.0;
  for (int j = 0; j < kMid.n_points; ++j) {
    worst21 = std::max(worst21, std::abs(f.f21.samples()[j] - 1.0));
    worst31 = std::max(worst31, std::abs(f.f31.samples()[j] - m.samples()[j]));
  }
  CHECK(worst21 < 1e-12);
  CHECK(worst31 < 1e-12);
  CHECK(f.f22.max_abs() < 1e-12);
}

TEST_CASE("one forms of sech match the symbolic expansion oracle") {
  const Field u = test::sech_field(kGrid);
  const double mu = 0.5;
  for (int m1 : {-2, 1}) {
    const PSSParams p{mu, m1, 1};
    const OneForms f = forms_of(u, p);
    const double q = std::sqrt(1.0 + mu * mu);
    double worst = 0.0;
    for (int j = 0; j < kGrid.n_points; ++j) {
      const double x = kGrid.x(j);
      const double s = sech(x), tau = std::tanh(x);
      const double ux = -s * tau;
      const double m = 2.0 * s * s * s;  // u - u_xx for sech
      const double ps = 4.0 * s * ux / m1 - 2.0 * ux * ux - 2.0 * s * s;
      const double g2 = 2.0 * s * m + ps;
      worst = std::max({worst, std::abs(f.f11.samples()[j] - m),
                        std::abs(f.f12.samples()[j] - g2),
                        std::abs(f.f21.samples()[j] - (mu * m + m1 * q)),
                        std::abs(f.f22.samples()[j] - mu * g2),
                        std::abs(f.f31.samples()[j] - (q * m + m1 * mu)),
                        std::abs(f.f32.samples()[j] - q * g2)});
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("metric of the zero solution is degenerate") {
  const PSSParams p{0.3, -2, 1};
  const MetricSample ms = metric(forms_of(Field::zero(kMid), p));
  const double expectE = 4.0 * (1.0 + 0.09);  // m1^2 (1 + mu^2)
  double worst = 0.0;
  for (double v : ms.E.samples()) worst = std::max(worst, std::abs(v - expectE));
  CHECK(worst < 1e-12);
  CHECK(ms.F.max_abs() < 1e-12);
  CHECK(ms.G.max_abs() < 1e-12);
  CHECK(ms.genericity.max_abs() < 1e-12);
}

TEST_CASE("metric components equal their defining sums of squares") {
  const Field u = random_band_limited(kMid, 60, 0.8, 21);
  const PSSParams p{1.0, -2, -1};
  const OneForms f = forms_of(u, p);
  const MetricSample ms = metric(f);
  const Field e_def = product(f.f11, f.f11) + product(f.f21, f.f21);
  CHECK((ms.E - e_def).max_abs() < 1e-12 * std::max(1.0, e_def.max_abs()));
}

TEST_CASE("sech metric at mu = 0, m1 = -2: G is the squared second form") {
  const Field u = test::sech_field(kGrid);
  const PSSParams p{0.0, -2, 1};
  const OneForms f = forms_of(u, p);
  const MetricSample ms = metric(f);
  double worst = 0.0;
  for (int j = 0; j < kGrid.n_points; ++j) {
    const double g2 = f.f12.samples()[j];
    worst = std::max(worst, std::abs(ms.G.samples()[j] - g2 * g2));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("Lagrange identity: det = genericity^2") {
  // quartic in the forms: keep 4x the input band inside the dealias cutoff
  for (std::uint64_t seed : {1, 2, 3}) {
    const Field u = random_band_limited(kGrid, kGrid.n_points / 12 - 1, 1.0, seed);
    for (double mu : {0.0, 1.0, 3.0}) {
      for (int sign : {1, -1}) {
        const MetricSample ms = metric(forms_of(u, PSSParams{mu, -2, sign}));
        const Field gen2 = product(ms.genericity, ms.genericity);
        const double scale = std::max(1.0, gen2.max_abs());
        CHECK((ms.det - gen2).max_abs() < 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("genericity indicator equals its closed form") {
  const Field u = test::sech_field(kGrid);
  for (int m1 : {-2, 1}) {
    for (int sign : {1, -1}) {
      const PSSParams p{0.8, m1, sign};
      const OneForms f = forms_of(u, p);
      const Field gen = genericity_indicator(f);
      const Field closed = (-sign * m1 * std::sqrt(1.0 + 0.64)) * f.f12;
      CHECK((gen - closed).max_abs() < 1e-11 * std::max(1.0, closed.max_abs()));
    }
  }
}

TEST_CASE("nongeneric reference profiles annihilate the indicator") {
  // sqrt(a e^{-x} + b) on the m1 = -2 branch
  {
    const WindowedField w =
        nongeneric_reference(kGrid, NongenericKind::sqrt_exp_m2, 1.0, 1.0, 0.0, 5.0);
    const Field gen = genericity_indicator(forms_of(w.field, PSSParams{0.0, -2, 1}));
    const double scale = gen.max_abs();
    double inner = 0.0;
    for (int j = 0; j < kGrid.n_points; ++j) {
      const double x = kGrid.x(j);
      if (x >= w.inner_lo && x <= w.inner_hi) inner = std::max(inner, std::abs(gen.samples()[j]));
    }
    CHECK(inner <= 1e-9 * scale);
  }
  // sqrt(a e^{2x} + b) and f(t) e^x on the m1 = 1 branch
  for (NongenericKind kind : {NongenericKind::sqrt_exp_p1, NongenericKind::f_exp}) {
    const WindowedField w = nongeneric_reference(kGrid, kind, 1.0, 1.0, -6.0, 0.0);
    const Field gen = genericity_indicator(forms_of(w.field, PSSParams{0.0, 1, 1}));
    const double scale = gen.max_abs();
    double inner = 0.0;
    for (int j = 0; j < kGrid.n_points; ++j) {
      const double x = kGrid.x(j);
      if (x >= w.inner_lo && x <= w.inner_hi) inner = std::max(inner, std::abs(gen.samples()[j]));
    }
    CHECK(inner <= 1e-9 * scale);
  }
}

TEST_CASE("nongeneric reference: constant profile and domain errors") {
  const WindowedField w =
      nongeneric_reference(kMid, NongenericKind::sqrt_exp_m2, 0.0, 1.0, -2.0, 2.0);
  double inner_dev = 0.0;
  for (int j = 0; j < kMid.n_points; ++j) {
    const double x = kMid.x(j);
    if (x >= -2.0 && x <= 2.0)
      inner_dev = std::max(inner_dev, std::abs(w.field.samples()[j] - 1.0));
  }
  CHECK(inner_dev < 1e-14);
  CHECK_THROWS_AS(
      (void)nongeneric_reference(kMid, NongenericKind::sqrt_exp_m2, -1.0, 0.5, 0.0, 5.0), Error);
  CHECK_THROWS_AS(
      (void)nongeneric_reference(kMid, NongenericKind::sqrt_exp_m2, 1.0, 1.0, 30.0, 39.0), Error);
}

TEST_CASE("AKNS matrices are trace free and match the form combinations") {
  const Field u = random_band_limited(kMid, 50, 1.0, 9);
  const OneForms f = forms_of(u, PSSParams{0.4, -2, 1});
  const AknsPair a = akns_matrices(f);
  CHECK((a.X[0] + a.X[3]).max_abs() < 1e-14);
  CHECK((a.T[0] + a.T[3]).max_abs() < 1e-14);
  CHECK((a.X[1] - 0.5 * (f.f11 - f.f31)).max_abs() < 1e-14);
  CHECK((a.T[2] - 0.5 * (f.f12 + f.f32)).max_abs() < 1e-14);
}

TEST_CASE("zero-curvature residual vanishes on equilibria") {
  const PSSParams p{0.0, -2, 1};
  CHECK(zero_curvature_residual(Field::zero(kMid), p) == 0.0);
  const Field c = Field::from_function(kMid, [](double) { return 0.6; });
  CHECK(zero_curvature_residual(c, p) <= 1e-12);
}

TEST_CASE("zero-curvature residual is tiny for sech and O(1) for corrupted data") {
  const Field u = test::sech_field(kGrid);
  for (double mu : {0.0, 1.0}) {
    for (int sign : {1, -1}) {
      CHECK(zero_curvature_residual(u, PSSParams{mu, -2, sign}) <= 1e-6);
    }
  }
  // corrupting the state while keeping the clean time derivative breaks the pair
  const Field noise = random_band_limited(kGrid, 100, 1.0, 13);
  const Field corrupted = linear_combination(1.0, u, 0.1, noise);
  CHECK(zero_curvature_residual(corrupted, rhs(u), PSSParams{0.0, -2, 1}) > 1e-3);
}

TEST_CASE("zero-curvature residual rejects the m1 = 1 branch") {
  CHECK_THROWS_AS((void)zero_curvature_residual(test::sech_field(kMid), PSSParams{0.0, 1, 1}),
                  Error);
}

TEST_CASE("Brioschi recovers K = -1 on the textbook pseudosphere metric") {
  // E = 1, F = 0, G = e^{2x} (windowed to be periodic); K = -1 analytically.
  const GridSpec grid(40.0, 1024);
  const double lo = -2.0, hi = 2.0, taper = 0.5;
  const double c_lo = lo - 7.0 * taper, c_hi = hi + 7.0 * taper;
  auto chi = [&](double x) {
    return 0.25 * (1.0 + std::erf((x - c_lo) / taper)) * (1.0 + std::erf((c_hi - x) / taper));
  };
  const Field E = Field::from_function(grid, [](double) { return 1.0; });
  const Field F = Field::zero(grid);
  const Field G = Field::from_function(grid, [&](double x) { return chi(x) * std::exp(2.0 * x); });
  const Field mask = Field::from_function(
      grid, [&](double x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
  std::vector<MetricSample> series;
  for (int i = 0; i < 5; ++i) {
    const Field det = product(E, G) - product(F, F);
    series.push_back(MetricSample{0.01 * i, E, F, G, det, mask});
  }
  const auto slices = gaussian_curvature(series, 0.01, 0.5);
  REQUIRE(slices.size() == 1);
  CHECK(slices[0].n_eval > 0);
  CHECK(slices[0].max_abs_k_plus_one < 1e-5);
}

TEST_CASE("curvature of a short sech run is -1 on nondegenerate points") {
  const Field u0 = test::sech_field(kMid);
  StepConfig cfg;
  cfg.dt = 5e-4;
  cfg.t_end = 0.008;
  const EvolveResult r = evolve(u0, cfg, {0.002, 0.004, 0.006, 0.008});
  REQUIRE_FALSE(r.aborted);
  std::vector<EvolutionState> states;
  states.push_back(make_state(0.0, u0, 2.0));
  for (const auto& st : r.states) states.push_back(st);
  REQUIRE(states.size() == 5);

  const PSSParams p{0.0, -2, 1};
  std::vector<MetricSample> series;
  for (const auto& st : states)
    series.push_back(metric(one_forms(st.u, rhs(st.u), p), st.t));
  const auto slices = gaussian_curvature(series, 0.002);
  REQUIRE(slices.size() == 1);
  CHECK(slices[0].n_eval > 0);
  CHECK(slices[0].max_abs_k_plus_one < 1e-3);

  // shrinking the genericity cut can only inflate the worst-case error
  const auto loose = gaussian_curvature(series, 0.002, 1e-6);
  CHECK(loose[0].n_eval >= slices[0].n_eval);
  CHECK(loose[0].max_abs_k_plus_one >= slices[0].max_abs_k_plus_one);
}

TEST_CASE("curvature requires enough snapshots and a nondegenerate metric") {
  const Field u = test::sech_field(kMid);
  const PSSParams p{0.0, -2, 1};
  const MetricSample ms = metric(forms_of(u, p));
  std::vector<MetricSample> series(3, ms);
  CHECK_THROWS_AS((void)gaussian_curvature(series, 0.01), Error);

  std::vector<MetricSample> zs;
  for (int i = 0; i < 5; ++i) zs.push_back(metric(forms_of(Field::zero(kMid), p), 0.01 * i));
  CHECK_THROWS_AS((void)gaussian_curvature(zs, 0.01), Error);
}
