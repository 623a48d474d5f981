// Acceptance suite: one pass/fail line per criterion, exit 1 on any failure.
// argv[1] is the path to the command line tool (used for the process-level
// criteria); the numerical criteria run in process.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "psn/config.hpp"
#include "psn/geometry.hpp"
#include "psn/radius.hpp"
#include "psn/runner.hpp"
#include "psn/taylor.hpp"

using namespace psn;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int n, const std::string& what, bool pass, const std::string& detail = "") {
  std::printf("%s - criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", n, what.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& cli, const std::string& args) {
  CliResult r;
  const std::string cmd = cli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

double parse_value(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + " = ");
  if (pos == std::string::npos) return std::nan("");
  return std::stod(text.substr(pos + key.size() + 3));
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

const fs::path kTmp = fs::temp_directory_path() / "psnovikov_acceptance";

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "./psnovikov";
  fs::remove_all(kTmp);
  fs::create_directories(kTmp);

  // ---- criterion 1: lifespan formulas through the CLI -----------------------
  {
    Timer timer;
    const CliResult r =
        run_cli(cli, "lifespan --u0-norm 1 --cs 1 --R 1 --out " + (kTmp / "c1").string());
    const double e = std::exp(1.0);
    const double M = parse_value(r.output, "M");
    const double L = parse_value(r.output, "L");
    const double T = parse_value(r.output, "T_aot");
    const double T22 = parse_value(r.output, "T_thm22");
    const bool ok = r.exit_code == 0 && rel_close(M, 3.0 / e, 1e-12) &&
                    rel_close(L, 12.0 / e, 1e-12) && rel_close(T, e / 216.0, 1e-12) &&
                    rel_close(T22, e / 216.0, 1e-12) && timer.seconds() < 1.0;
    char detail[160];
    std::snprintf(detail, sizeof(detail), "M=%.15g L=%.15g T=%.15g (%.2fs)", M, L, T,
                  timer.seconds());
    report(1, "lifespan formulas M = 3/e, L = 12/e, T = e/216", ok, detail);
  }

  // ---- criterion 2: section-3 constants -------------------------------------
  {
    Timer timer;
    const BoundConstants c = bound_constants_from_norm(1.0, -0.1, 1.0);
    const double l1 = 28.0 * std::sqrt(2.0) / 9.0;
    const bool ok = c.K == 144.0 && c.B == 72.0 && c.L2 == 72.0 &&
                    rel_close(c.A, l1, 1e-14) && rel_close(c.L1, l1, 1e-14) && c.A == c.L1 &&
                    lower_bound_r(c, 0.0) == std::exp(-0.1) && timer.seconds() < 1.0;
    report(2, "bound constants K=144, B=L2=72, A=L1=28*sqrt(2)/9, r_lb(0)=e^{-0.1}", ok);
  }

  // ---- shared sech run for criteria 3, 4 and 11 ------------------------------
  RunConfig cfg;  // defaults: sech, L = 40, N = 1024, dt = 1e-3, t_end = 1
  const Field u0 = initial_data(cfg.grid(), cfg.initial_spec());
  std::vector<double> samples;
  for (int i = 0; i <= 10; ++i) samples.push_back(0.1 * i);
  Timer run_timer;
  const EvolveResult run = evolve(u0, cfg.step_config(), samples, cfg.gevrey_s);
  const double run_seconds = run_timer.seconds();

  // ---- criterion 3: conservation ---------------------------------------------
  {
    bool ok = !run.aborted && run_seconds < 120.0;
    double worst_m = 0.0, worst_id = 0.0;
    for (const auto& st : run.states) {
      worst_m = std::max(worst_m, std::abs(st.diag.m_l1 - GridSpec::kPi) / GridSpec::kPi);
      worst_id = std::max(worst_id, std::abs(st.diag.u_l1 - st.diag.m_l1) / st.diag.m_l1);
    }
    ok = ok && worst_m <= 1e-6 && worst_id <= 1e-8;
    char detail[160];
    std::snprintf(detail, sizeof(detail), "|m_l1 - pi|/pi <= %.3g, |u_l1 - m_l1| rel <= %.3g (%.1fs)",
                  worst_m, worst_id, run_seconds);
    report(3, "conservation of ||m||_L1 = pi and ||u||_L1 = ||m||_L1 over [0,1]", ok, detail);
  }

  // ---- criterion 4: positivity persistence -----------------------------------
  {
    double min_m = 0.0, min_u = 0.0;
    for (const auto& st : run.states) {
      min_m = std::min(min_m, st.diag.min_m);
      min_u = std::min(min_u, st.diag.min_u);
    }
    const bool ok = !run.aborted && min_m >= -1e-8 && min_u >= -1e-10;
    char detail[120];
    std::snprintf(detail, sizeof(detail), "min m = %.3g, min u = %.3g", min_m, min_u);
    report(4, "positivity persistence of m and u over [0,1]", ok, detail);
  }

  // ---- criterion 5: form equivalence ------------------------------------------
  {
    std::mt19937_64 rng(2718);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Field f = random_band_limited(cfg.grid(), 160, 1.0, rng());
      worst = std::max(worst, rhs_form_check(f));
    }
    report(5, "two right-hand-side forms agree to 1e-10 on 100 random fields", worst <= 1e-10,
           "max diff = " + format_g17(worst));
  }

  // ---- criteria 6, 7, 8: the 500-field inequality corpus ----------------------
  {
    Timer timer;
    RunConfig ncfg = cfg;
    ncfg.corpus_fields = 500;
    const auto rows = norm_check_rows(ncfg);
    int bad6 = 0, bad7 = 0, bad8 = 0;
    double worst_eq = 0.0;
    for (const auto& r : rows) {
      if (r.test == "prop32" && !r.pass) ++bad6;
      if (r.test == "lemma32" && !r.pass) ++bad7;
      if ((r.test == "dx_scale_shift" || r.test == "dx_index_shift" || r.test == "h2_algebra") &&
          !r.pass)
        ++bad8;
      if (r.test == "helmholtz_index_shift_eq") {
        worst_eq = std::max(worst_eq, r.slack);
        if (!r.pass) ++bad8;
      }
    }
    const double secs = timer.seconds();
    report(6, "proposition inequality lhs <= rhs on 500 random fields",
           bad6 == 0 && secs < 120.0, std::to_string(bad6) + " violations");
    report(7, "convolution lemma lhs <= rhs on the same corpus", bad7 == 0,
           std::to_string(bad7) + " violations");
    report(8, "operator inequalities (a),(b),(c) and the H2 algebra bound", bad8 == 0,
           std::to_string(bad8) + " violations, worst equality residual " + format_g17(worst_eq));
  }

  // ---- criterion 9: Taylor series vs the time stepper --------------------------
  {
    Timer timer;
    const TaylorSeries series = taylor_coefficients(u0, 20);
    const RadiusFit fit = convergence_radius_estimate(series);
    const AlgebraConstant cs = resolve_cs(cfg);
    const double g = gevrey_norm(u0, {1.0, cfg.gevrey_s}).value;
    const double t22 = lifespan_thm22(g, cs.value);
    const double t_max = 0.5 * std::min(fit.radius, 0.5 * t22);
    StepConfig sc = cfg.step_config();
    sc.t_end = t_max;
    sc.dt = std::min(1e-3, t_max / 64.0);
    std::vector<double> ts;
    for (int i = 1; i <= 8; ++i) ts.push_back(t_max * i / 8);
    const EvolveResult r = evolve(u0, sc, ts, cfg.gevrey_s);
    double worst = 0.0;
    for (const auto& st : r.states)
      worst = std::max(worst, (taylor_eval(series, st.t) - st.u).max_abs());
    const bool ok = !r.aborted && worst <= 1e-7 && timer.seconds() < 60.0;
    char detail[160];
    std::snprintf(detail, sizeof(detail), "t_max=%.4g, max diff=%.3g (%.1fs)", t_max, worst,
                  timer.seconds());
    report(9, "Taylor series matches RK4 to 1e-7 on the guaranteed window", ok, detail);
  }

  // ---- criterion 10: radius estimator calibration ------------------------------
  {
    const RadiusEstimate sech_est = radius_from_spectrum(u0);
    std::vector<std::complex<double>> c(cfg.grid().nyquist() + 1, {0.0, 0.0});
    for (int k = 0; k <= cfg.grid().nyquist(); ++k)
      c[k] = {std::exp(-0.8 * cfg.grid().xi(k)), 0.0};
    const RadiusEstimate synth = radius_from_spectrum(Field::from_spectrum(cfg.grid(), std::move(c)));
    const bool ok = rel_close(sech_est.r_measured, GridSpec::kPi / 2.0, 0.05) &&
                    rel_close(synth.r_measured, 0.8, 0.01);
    char detail[120];
    std::snprintf(detail, sizeof(detail), "sech r=%.4g (pi/2=%.4g), synthetic r=%.5g",
                  sech_est.r_measured, GridSpec::kPi / 2.0, synth.r_measured);
    report(10, "radius estimator: sech within 5% of pi/2, synthetic within 1%", ok, detail);
  }

  // ---- criterion 11: the double-exponential lower bound -------------------------
  {
    double max_h2 = 0.0;
    for (const auto& st : run.states) max_h2 = std::max(max_h2, st.diag.u_h2);
    const BoundConstants bc = bound_constants(u0, -0.1, 1.0 + max_h2);
    const auto rows = track(run.states, bc);
    bool bound_ok = true, phi_ok = true, linear_ok = true;
    for (const auto& row : rows) {
      if (row.flagged || !row.pass) bound_ok = false;
      if (!row.phi_ok) phi_ok = false;
      if (row.t <= 0.2) {
        // linear-space comparison is required below t = 0.2 where rho is finite
        const double rho_lin = std::exp(row.rho_log);
        const double phi_lin = row.phi_log == -std::numeric_limits<double>::infinity()
                                   ? 0.0
                                   : std::exp(row.phi_log);
        if (!(phi_lin <= rho_lin) || !std::isfinite(rho_lin)) linear_ok = false;
      }
    }
    report(11, "log r(t) >= log L3 - L1 e^{L2 t} and Phi <= rho along the run",
           bound_ok && phi_ok && linear_ok);
  }

  // ---- criterion 12: geometry -----------------------------------------------
  {
    Timer timer;
    const PSSParams pss{0.0, -2, 1};

    auto geometry_run = [&](int n_points) {
      RunConfig gcfg = cfg;
      gcfg.N = n_points;
      gcfg.dt = 5e-4;
      const Field g_u0 = initial_data(gcfg.grid(), gcfg.initial_spec());
      std::vector<double> ts;
      for (int i = 1; i < 9; ++i) ts.push_back(i * 0.01);
      StepConfig sc = gcfg.step_config();
      sc.t_end = ts.back();
      const EvolveResult r = evolve(g_u0, sc, ts, 2.0);
      std::vector<EvolutionState> states;
      states.push_back(make_state(0.0, g_u0, 2.0));
      for (const auto& st : r.states) states.push_back(st);
      double worst_res = 0.0;
      std::vector<MetricSample> ms;
      for (const auto& st : states) {
        worst_res = std::max(worst_res, zero_curvature_residual(st.u, pss));
        ms.push_back(metric(one_forms(st.u, rhs(st.u), pss), st.t));
      }
      double worst_k = 0.0;
      for (const auto& slice : gaussian_curvature(ms, 0.01)) {
        worst_k = std::max(worst_k, slice.max_abs_k_plus_one);
      }
      return std::pair<double, double>{worst_res, worst_k};
    };

    const auto [res_1024, k_1024] = geometry_run(1024);
    const auto [res_2048, k_2048] = geometry_run(2048);

    const WindowedField w =
        nongeneric_reference(cfg.grid(), NongenericKind::sqrt_exp_m2, 1.0, 1.0, 0.0, 5.0);
    const Field gen = genericity_indicator(one_forms(w.field, rhs(w.field), pss));
    double inner = 0.0;
    for (int j = 0; j < cfg.grid().n_points; ++j) {
      const double x = cfg.grid().x(j);
      if (x >= w.inner_lo && x <= w.inner_hi) inner = std::max(inner, std::abs(gen.samples()[j]));
    }
    const double scale = gen.max_abs();

    const bool residual_ok = res_1024 <= 1e-6;
    const bool refine_ok = res_2048 < res_1024;
    const bool curvature_ok = k_1024 <= 1e-3;
    const bool nongeneric_ok = inner <= 1e-9 * scale;
    const bool ok =
        residual_ok && refine_ok && curvature_ok && nongeneric_ok && timer.seconds() < 300.0;
    char detail[240];
    std::snprintf(detail, sizeof(detail),
                  "residual %.3g -> %.3g under N refinement, |K+1| %.3g -> %.3g, nongeneric "
                  "indicator %.3g of scale (%.1fs)",
                  res_1024, res_2048, k_1024, k_2048, inner / scale, timer.seconds());
    report(12, "zero-curvature residual, K = -1 curvature, nongeneric family", ok, detail);
  }

  // ---- criterion 13: determinism ----------------------------------------------
  {
    const std::string base = (kTmp / "det").string();
    const std::string common = " --seed 42 --t-end 0.05 ";
    const CliResult a1 = run_cli(cli, "norm-check" + common + "--out " + base + "_n1");
    const CliResult a2 = run_cli(cli, "norm-check" + common + "--out " + base + "_n2");
    const CliResult e1 = run_cli(cli, "evolve" + common + "--out " + base + "_e1");
    const CliResult e2 = run_cli(cli, "evolve" + common + "--out " + base + "_e2");
    const bool ok = a1.exit_code == 0 && a2.exit_code == 0 && e1.exit_code == 0 &&
                    e2.exit_code == 0 &&
                    slurp(base + "_n1/norm_check.csv") == slurp(base + "_n2/norm_check.csv") &&
                    !slurp(base + "_n1/norm_check.csv").empty() &&
                    slurp(base + "_e1/evolve.csv") == slurp(base + "_e2/evolve.csv") &&
                    !slurp(base + "_e1/evolve.csv").empty();
    report(13, "identical config and seed reproduce byte-identical CSVs", ok);
  }

  std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
