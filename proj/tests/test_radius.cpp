#include <cmath>

#include "doctest.h"
#include "psn/norms.hpp"
#include "psn/radius.hpp"
#include "testutil.hpp"

using namespace psn;

namespace {
const GridSpec kGrid(40.0, 1024);

Field synthetic_exponential(const GridSpec& g, double rate) {
  std::vector<std::complex<double>> c(g.nyquist() + 1, {0.0, 0.0});
  for (int k = 0; k <= g.nyquist(); ++k) c[k] = {std::exp(-rate * g.xi(k)), 0.0};
  return Field::from_spectrum(g, std::move(c));
}
}  // namespace

TEST_CASE("radius fit recovers a pure exponential spectrum within 1%") {
  const Field u = synthetic_exponential(kGrid, 0.8);
  const RadiusEstimate est = radius_from_spectrum(u);
  CHECK(est.r_measured == doctest::Approx(0.8).epsilon(0.01));
  CHECK(est.fit_r2 > 0.999);
  CHECK(est.n_modes >= 8);
}

TEST_CASE("radius of sech is the pole distance pi/2") {
  const RadiusEstimate est = radius_from_spectrum(test::sech_field(kGrid));
  CHECK(est.r_measured == doctest::Approx(GridSpec::kPi / 2.0).epsilon(0.05));
}

TEST_CASE("gaussian decay hits the floor and reports a lower-bound-only rate") {
  const Field g = Field::from_function(kGrid, [](double x) { return std::exp(-x * x); });
  const RadiusEstimate est = radius_from_spectrum(g);
  CHECK(est.floor_hit);
  CHECK(est.r_measured > 0.0);
}

TEST_CASE("radius estimate is scale invariant") {
  const Field u = test::sech_field(kGrid);
  const RadiusEstimate a = radius_from_spectrum(u);
  const RadiusEstimate b = radius_from_spectrum(2.0 * u);
  CHECK(a.r_measured == doctest::Approx(b.r_measured).epsilon(1e-10));
}

TEST_CASE("radius fit needs a usable band") {
  CHECK_THROWS_AS((void)radius_from_spectrum(Field::zero(kGrid)), Error);
  // band-limited field leaves nothing above xi_max/4
  const Field narrow = random_band_limited(kGrid, 10, 1.0, 3);
  CHECK_THROWS_AS((void)radius_from_spectrum(narrow), Error);
}

TEST_CASE("bound constants at the desk values") {
  const BoundConstants c = bound_constants_from_norm(1.0, -0.1, 1.0);
  const double sqrt2 = std::sqrt(2.0);
  CHECK(c.K == 144.0);
  CHECK(c.B == 72.0);
  CHECK(c.L2 == 72.0);
  CHECK(c.A == doctest::Approx(28.0 * sqrt2 / 9.0).epsilon(1e-14));
  CHECK(c.L1 == doctest::Approx(28.0 * sqrt2 / 9.0).epsilon(1e-14));
  CHECK(c.A == c.L1);  // equality exactly at mu = 1
  // L3 e^{-L1} = e^{sigma0}, evaluated in log space
  CHECK(lower_bound_r(c, 0.0) == doctest::Approx(std::exp(-0.1)).epsilon(1e-15));
}

TEST_CASE("bound constants scale linearly in the data norm") {
  const BoundConstants c1 = bound_constants_from_norm(1.0, -0.1, 1.0);
  const BoundConstants c2 = bound_constants_from_norm(2.0, -0.1, 1.0);
  CHECK(c2.A == doctest::Approx(2.0 * c1.A).epsilon(1e-14));
  CHECK(c2.L1 == doctest::Approx(2.0 * c1.L1).epsilon(1e-14));
  CHECK(c2.B == c1.B);
  CHECK(c2.K == c1.K);
}

TEST_CASE("A stays below L1 for mu > 1") {
  for (double mu : {1.0, 1.5, 3.0, 10.0}) {
    const BoundConstants c = bound_constants_from_norm(1.7, -0.3, mu);
    CHECK(c.A <= c.L1 * (1.0 + 1e-14));
  }
}

TEST_CASE("bound constants reject invalid parameters") {
  CHECK_THROWS_AS((void)bound_constants_from_norm(1.0, 0.1, 1.0), Error);
  CHECK_THROWS_AS((void)bound_constants_from_norm(1.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS((void)bound_constants_from_norm(1.0, -0.1, 0.5), Error);
  CHECK_THROWS_AS((void)bound_constants_from_norm(0.0, -0.1, 1.0), Error);
}

TEST_CASE("sigma(t) starts at sigma0 and decreases strictly") {
  const BoundConstants c = bound_constants_from_norm(1.0, -0.1, 1.0);
  CHECK(sigma_of_t(c, 0.0) == -0.1);
  double prev = sigma_of_t(c, 0.0);
  for (int i = 1; i <= 100; ++i) {
    const double s = sigma_of_t(c, i / 100.0);
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("sigma(0.01) matches the plug-in arithmetic") {
  const BoundConstants c = bound_constants_from_norm(1.0, -0.1, 1.0);
  const double expect = -0.1 - (28.0 * std::sqrt(2.0) / 9.0) * std::expm1(0.72);
  CHECK(sigma_of_t(c, 0.01) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("rho grows exponentially from half the squared norm") {
  const BoundConstants c = bound_constants_from_norm(1.3, -0.2, 1.0);
  CHECK(rho_of_t(c, 0.0) == doctest::Approx(0.5 * 1.3 * 1.3).epsilon(1e-14));
  const double r1 = rho_log_of_t(c, 0.01);
  const double r2 = rho_log_of_t(c, 0.03);
  CHECK(r2 - r1 == doctest::Approx(c.K * 0.02).epsilon(1e-12));
}

TEST_CASE("the radius curve dominates the lower bound pointwise") {
  const BoundConstants c = bound_constants_from_norm(1.0, -0.1, 1.0);
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    CHECK(sigma_of_t(c, t) >= lower_bound_r_log(c, t));  // log r(t) = sigma(t)
  }
}

TEST_CASE("log lower bound at t = 0.1 matches the plug-in arithmetic") {
  const BoundConstants c = bound_constants_from_norm(1.0, -0.1, 1.0);
  const double L1 = 28.0 * std::sqrt(2.0) / 9.0;
  const double expect = -0.1 + L1 - L1 * std::exp(7.2);
  CHECK(lower_bound_r_log(c, 0.1) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("bound constants from a field certify the truncation") {
  const Field u0 = test::sech_field(kGrid);
  const BoundConstants c = bound_constants(u0, -0.1, 1.5);
  CHECK(c.u0_km > 0.0);
  CHECK(c.km_order >= 8);
  CHECK(c.u0_km == doctest::Approx(km_norm(u0, {-0.1, c.km_order})).epsilon(1e-13));
  CHECK(c.A <= c.L1);
  CHECK_FALSE(c.u0_unresolved);
}

TEST_CASE("track reports pass rows for a short sech run") {
  const Field u0 = test::sech_field(kGrid);
  StepConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.05;
  const EvolveResult r = evolve(u0, cfg, {0.0, 0.025, 0.05});
  REQUIRE_FALSE(r.aborted);
  double max_h2 = 0.0;
  for (const auto& st : r.states) max_h2 = std::max(max_h2, st.diag.u_h2);
  const BoundConstants c = bound_constants(u0, -0.1, 1.0 + max_h2);
  const auto rows = track(r.states, c);
  REQUIRE(rows.size() == r.states.size());
  CHECK(rows.front().r_measured == doctest::Approx(GridSpec::kPi / 2.0).epsilon(0.05));
  for (const auto& row : rows) {
    CHECK_FALSE(row.flagged);
    CHECK(row.pass);
    CHECK(row.phi_ok);
  }
}
