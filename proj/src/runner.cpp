#include "psn/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include <limits>

#include "json.hpp"
#include "psn/geometry.hpp"
#include "psn/radius.hpp"
#include "psn/taylor.hpp"

namespace psn {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

json config_json(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : config_as_pairs(cfg)) j[k] = v;
  return j;
}

json cs_json(const AlgebraConstant& cs) {
  json j;
  j["value"] = cs.value;
  j["mode"] = cs.measured ? "measured" : "configured";
  if (cs.measured) {
    j["raw_max"] = cs.raw_max;
    j["safety_factor"] = 2.0;
    j["pairs"] = cs.pairs;
    j["seed"] = cs.seed;
  }
  return j;
}

std::ofstream open_out(const std::string& out_dir, const std::string& name) {
  fs::create_directories(out_dir);
  std::ofstream os(fs::path(out_dir) / name, std::ios::binary);
  if (!os) throw Error(Errc::io_error, "cannot write " + name + " in " + out_dir);
  return os;
}

void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const RunConfig& cfg, json extra, const Stopwatch& sw) {
  json j;
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["config"] = config_json(cfg);
  j["wall_clock_ms"] = sw.ms();
  j.update(extra);
  auto os = open_out(out_dir, "manifest.json");
  os << j.dump(2) << '\n';
}

std::vector<double> default_samples(double t_end, int n_intervals = 10) {
  std::vector<double> t;
  if (t_end == 0.0) return {0.0};
  for (int i = 0; i <= n_intervals; ++i) t.push_back(t_end * i / n_intervals);
  return t;
}

json events_json(const std::vector<GuardEvent>& events) {
  json arr = json::array();
  for (const auto& e : events) arr.push_back({{"t", e.t}, {"kind", e.kind}, {"detail", e.detail}});
  return arr;
}

}  // namespace

RunOutcome run_lifespan(const RunConfig& cfg, const std::string& out_dir, std::ostream& out) {
  Stopwatch sw;
  const AlgebraConstant cs = resolve_cs(cfg);
  double u0_gnorm = cfg.u0_gnorm;
  bool unresolved = false;
  if (u0_gnorm <= 0.0) {
    const Field u0 = initial_data(cfg.grid(), cfg.initial_spec());
    const GevreyResult g = gevrey_norm(u0, {cfg.gevrey_sigma, cfg.gevrey_s});
    u0_gnorm = g.value;
    unresolved = g.unresolved;
  }
  const double R = cfg.lifespan_R > 0.0 ? cfg.lifespan_R : u0_gnorm;
  LifespanReport rep = lifespan_aot(u0_gnorm, R, cs.value);
  rep.u0_gnorm_unresolved = unresolved;

  out << "u0_gnorm = " << fmt12(rep.u0_gnorm) << (unresolved ? "  (unresolved)" : "") << '\n';
  out << "R = " << fmt12(rep.R) << '\n';
  out << "c_s = " << fmt12(rep.c_s) << '\n';
  out << "M = " << fmt12(rep.M) << '\n';
  out << "L = " << fmt12(rep.L) << '\n';
  out << "T_aot = " << fmt12(rep.T_aot) << '\n';
  out << "T_thm22 = " << fmt12(rep.T_thm22) << '\n';

  json extra;
  extra["lifespan"] = {{"u0_gnorm", rep.u0_gnorm},
                       {"u0_gnorm_unresolved", rep.u0_gnorm_unresolved},
                       {"R", rep.R},
                       {"M", rep.M},
                       {"L", rep.L},
                       {"T_aot", rep.T_aot},
                       {"T_thm22", rep.T_thm22}};
  extra["cs"] = cs_json(cs);
  write_manifest(out_dir, "lifespan", cfg, extra, sw);
  return {};
}

RunOutcome run_evolve(const RunConfig& cfg, const std::string& out_dir, std::ostream& out,
                      const RunnerOptions& opts) {
  Stopwatch sw;
  RunOutcome outcome;
  const Field u0 = initial_data(cfg.grid(), cfg.initial_spec());
  const std::vector<double> samples =
      cfg.sample_times.empty() ? default_samples(cfg.t_end) : cfg.sample_times;
  const EvolveResult res = evolve(u0, cfg.step_config(), samples, cfg.gevrey_s);

  auto csv = open_out(out_dir, "evolve.csv");
  csv << "t,m_l1,u_l1,u_h2,u_hs,min_m,min_u,energy_tail\n";
  for (const auto& st : res.states) {
    const auto& d = st.diag;
    csv << format_g17(st.t) << ',' << format_g17(d.m_l1) << ',' << format_g17(d.u_l1) << ','
        << format_g17(d.u_h2) << ',' << format_g17(d.u_hs) << ',' << format_g17(d.min_m) << ','
        << format_g17(d.min_u) << ',' << format_g17(d.energy_tail) << '\n';
  }
  if (opts.write_snapshots) {
    int idx = 0;
    for (const auto& st : res.states) {
      auto snap = open_out(out_dir, "snapshot_" + std::to_string(idx++) + ".csv");
      st.u.save_samples_csv(snap);
    }
  }

  // conservation, L1 identity and positivity assertions (sign-definite data)
  int failures = 0;
  if (cfg.require_positive_momentum && !res.states.empty()) {
    const double m0_l1 = res.states.front().diag.m_l1;
    for (const auto& st : res.states) {
      const auto& d = st.diag;
      if (std::abs(d.m_l1 - m0_l1) > 1e-6 * m0_l1) {
        ++failures;
        outcome.messages.push_back("m_l1 drift at t=" + fmt12(st.t));
      }
      if (std::abs(d.u_l1 - d.m_l1) > 1e-8 * d.m_l1) {
        ++failures;
        outcome.messages.push_back("u_l1 != m_l1 at t=" + fmt12(st.t));
      }
      if (d.min_m < -1e-8) {
        ++failures;
        outcome.messages.push_back("min_m < -1e-8 at t=" + fmt12(st.t));
      }
      if (d.min_u < -1e-10) {
        ++failures;
        outcome.messages.push_back("min_u < -1e-10 at t=" + fmt12(st.t));
      }
    }
  }

  json extra;
  extra["guard_events"] = events_json(res.events);
  extra["aborted"] = res.aborted;
  extra["assertion_failures"] = failures;
  write_manifest(out_dir, "evolve", cfg, extra, sw);

  for (const auto& m : outcome.messages) out << m << '\n';
  outcome.exit_code = res.aborted ? 2 : (failures > 0 ? 1 : 0);
  out << "evolve: " << res.states.size() << " states, "
      << (outcome.exit_code == 0 ? "ok" : "FAILED") << '\n';
  return outcome;
}

std::vector<NormCheckRow> norm_check_rows(const RunConfig& cfg) {
  const GridSpec grid = cfg.grid();
  const int k_band_cap = cfg.corpus_kband > 0 ? cfg.corpus_kband : grid.n_points / 6 - 1;
  std::mt19937_64 master(cfg.seed);
  std::uniform_int_distribution<int> kband_dist(4, std::max(5, k_band_cap));
  std::uniform_int_distribution<int> m_dist(0, 10);
  std::uniform_real_distribution<double> sigma_dist(-1.0, -0.1);
  std::uniform_real_distribution<double> amp_dist(std::log(0.05), std::log(2.0));

  std::vector<NormCheckRow> rows;
  auto push = [&rows](const std::string& test, int id, double lhs, double rhs, double slack,
                      bool pass) { rows.push_back({test, id, lhs, rhs, slack, pass}); };

  for (int id = 0; id < cfg.corpus_fields; ++id) {
    const int k_band = kband_dist(master);
    const double amp = std::exp(amp_dist(master));
    const std::uint64_t fseed = master();
    const KMParams km{sigma_dist(master), m_dist(master)};
    const Field f = random_band_limited(grid, k_band, amp, fseed);

    const Field fu = rhs(f, cfg.resolution_guard);
    const double p_lhs = prop32_lhs(f, fu, km);
    const double p_rhs = prop32_rhs(f, km);
    push("prop32", id, p_lhs, p_rhs, p_rhs - p_lhs, p_lhs <= p_rhs * (1.0 + 1e-12));

    const LemmaSides ls = lemma32_sides(f, km);
    push("lemma32", id, ls.lhs, ls.rhs, ls.rhs - ls.lhs, ls.lhs <= ls.rhs * (1.0 + 1e-12));

    const double sg = std::min(1.0, cfg.gevrey_sigma);
    for (const auto& row : operator_inequality_suite(f, sg, 0.5 * sg, cfg.gevrey_s))
      push(row.name, id, row.lhs, row.rhs, row.slack, row.pass);

    const double g_lo = gevrey_norm(f, {0.5 * sg, cfg.gevrey_s}).value;
    const double g_hi = gevrey_norm(f, {sg, cfg.gevrey_s}).value;
    push("gevrey_monotone_sigma", id, g_lo, g_hi, g_hi - g_lo, g_lo <= g_hi * (1.0 + 1e-12));

    const double s_lo = gevrey_norm(f, {sg, cfg.gevrey_s}).value;
    const double s_hi = gevrey_norm(f, {sg, cfg.gevrey_s + 0.5}).value;
    push("gevrey_monotone_s", id, s_lo, s_hi, s_hi - s_lo, s_lo <= s_hi * (1.0 + 1e-12));

    const double k_lo = km_norm(f, km);
    const double k_hi = km_norm(f, {km.sigma, km.m + 1});
    push("km_monotone_m", id, k_lo, k_hi, k_hi - k_lo, k_lo <= k_hi * (1.0 + 1e-12));
  }
  return rows;
}

RunOutcome run_norm_check(const RunConfig& cfg, const std::string& out_dir, std::ostream& out) {
  Stopwatch sw;
  RunOutcome outcome;
  const std::vector<NormCheckRow> rows = norm_check_rows(cfg);

  auto csv = open_out(out_dir, "norm_check.csv");
  csv << "test,field_id,lhs,rhs,slack,pass\n";
  int failures = 0;
  for (const auto& r : rows) {
    csv << r.test << ',' << r.field_id << ',' << format_g17(r.lhs) << ',' << format_g17(r.rhs)
        << ',' << format_g17(r.slack) << ',' << (r.pass ? 1 : 0) << '\n';
    if (!r.pass) {
      ++failures;
      outcome.messages.push_back(r.test + " failed for field " + std::to_string(r.field_id));
    }
  }

  json extra;
  extra["rows"] = rows.size();
  extra["failures"] = failures;
  write_manifest(out_dir, "norm-check", cfg, extra, sw);

  for (const auto& m : outcome.messages) out << m << '\n';
  outcome.exit_code = failures > 0 ? 1 : 0;
  out << "norm-check: " << rows.size() << " rows, " << failures << " failures\n";
  return outcome;
}

RunOutcome run_taylor_compare(const RunConfig& cfg, const std::string& out_dir,
                              std::ostream& out) {
  Stopwatch sw;
  RunOutcome outcome;
  const Field u0 = initial_data(cfg.grid(), cfg.initial_spec());
  const TaylorSeries series = taylor_coefficients(u0, cfg.taylor_order, cfg.resolution_guard);
  const RadiusFit fit = convergence_radius_estimate(series);

  const AlgebraConstant cs = resolve_cs(cfg);
  const GevreyResult g = gevrey_norm(u0, {cfg.gevrey_sigma, cfg.gevrey_s});
  LifespanReport rep = lifespan_aot(g.value, cfg.lifespan_R > 0.0 ? cfg.lifespan_R : g.value,
                                    cs.value);
  rep.u0_gnorm_unresolved = g.unresolved;

  auto coeff_csv = open_out(out_dir, "taylor_coeffs.csv");
  coeff_csv << "k,coeff_h2norm\n";
  for (size_t k = 0; k < series.h2_norms.size(); ++k)
    coeff_csv << k << ',' << format_g17(series.h2_norms[k]) << '\n';

  const double t_max = 0.5 * std::min(fit.radius, 0.5 * rep.T_thm22);
  const int n_pts = 8;
  std::vector<double> times;
  for (int i = 1; i <= n_pts; ++i) times.push_back(t_max * i / n_pts);
  StepConfig sc = cfg.step_config();
  sc.t_end = t_max;
  sc.dt = std::min(cfg.dt, t_max / 64.0);
  const EvolveResult res = evolve(u0, sc, times, cfg.gevrey_s);
  if (res.aborted) {
    write_manifest(out_dir, "taylor-compare", cfg, {{"aborted", true}}, sw);
    outcome.exit_code = 2;
    return outcome;
  }

  auto cmp_csv = open_out(out_dir, "taylor_compare.csv");
  cmp_csv << "t,taylor_vs_rk4_maxdiff\n";
  int failures = 0;
  for (const auto& st : res.states) {
    const double diff = (taylor_eval(series, st.t) - st.u).max_abs();
    cmp_csv << format_g17(st.t) << ',' << format_g17(diff) << '\n';
    if (diff > 1e-7) {
      ++failures;
      outcome.messages.push_back("taylor/rk4 discrepancy " + fmt12(diff) + " at t=" +
                                 fmt12(st.t));
    }
  }

  json extra;
  extra["lifespan"] = {{"u0_gnorm", rep.u0_gnorm},
                       {"u0_gnorm_unresolved", rep.u0_gnorm_unresolved},
                       {"R", rep.R},
                       {"M", rep.M},
                       {"L", rep.L},
                       {"T_aot", rep.T_aot},
                       {"T_thm22", rep.T_thm22}};
  extra["cs"] = cs_json(cs);
  extra["radius_estimate"] = fit.infinite ? json("infinite") : json(fit.radius);
  extra["radius_fit_residual"] = fit.fit_residual;
  extra["series_truncated"] = series.truncated;
  extra["t_max"] = t_max;
  extra["failures"] = failures;
  write_manifest(out_dir, "taylor-compare", cfg, extra, sw);

  for (const auto& m : outcome.messages) out << m << '\n';
  outcome.exit_code = failures > 0 ? 1 : 0;
  out << "taylor-compare: radius_est=" << fmt12(fit.radius) << " t_max=" << fmt12(t_max) << ' '
      << (failures == 0 ? "ok" : "FAILED") << '\n';
  return outcome;
}

RunOutcome run_analyze_radius(const RunConfig& cfg, const std::string& out_dir,
                              std::ostream& out) {
  Stopwatch sw;
  RunOutcome outcome;
  const Field u0 = initial_data(cfg.grid(), cfg.initial_spec());
  const std::vector<double> samples =
      cfg.sample_times.empty() ? default_samples(cfg.t_end) : cfg.sample_times;
  const EvolveResult res = evolve(u0, cfg.step_config(), samples, cfg.gevrey_s);
  if (res.aborted) {
    json extra;
    extra["guard_events"] = events_json(res.events);
    extra["aborted"] = true;
    write_manifest(out_dir, "analyze-radius", cfg, extra, sw);
    outcome.exit_code = 2;
    return outcome;
  }

  // pass 1 gave the trajectory; mu is 1 + the observed max of ||u||_{H^2}
  double max_h2 = 0.0;
  for (const auto& st : res.states) max_h2 = std::max(max_h2, st.diag.u_h2);
  const double mu = 1.0 + max_h2;
  const BoundConstants bc = bound_constants(u0, cfg.sigma0, mu);
  const std::vector<RadiusRow> rows = track(res.states, bc);

  auto csv = open_out(out_dir, "radius.csv");
  csv << "t,r_measured,fit_r2,sigma_t,log_lower_bound,pass\n";
  auto phi_csv = open_out(out_dir, "phi_rho.csv");
  phi_csv << "t,phi_log,rho_log,pass\n";
  int failures = 0;
  for (const auto& r : rows) {
    csv << format_g17(r.t) << ',' << format_g17(r.r_measured) << ',' << format_g17(r.fit_r2)
        << ',' << format_g17(r.sigma_t) << ',' << format_g17(r.log_lower_bound) << ','
        << (r.flagged ? -1 : (r.pass ? 1 : 0)) << '\n';
    phi_csv << format_g17(r.t) << ',' << format_g17(r.phi_log) << ',' << format_g17(r.rho_log)
            << ',' << (r.phi_ok ? 1 : 0) << '\n';
    if (!r.flagged && !r.pass) {
      ++failures;
      outcome.messages.push_back("radius bound violated at t=" + fmt12(r.t));
    }
    if (!r.phi_ok) {
      ++failures;
      outcome.messages.push_back("phi exceeds rho at t=" + fmt12(r.t));
    }
  }

  json extra;
  extra["constants"] = {{"sigma0", bc.sigma0}, {"mu_bound", bc.mu_bound}, {"u0_km", bc.u0_km},
                        {"u0_unresolved", bc.u0_unresolved}, {"km_order", bc.km_order},
                        {"K", bc.K},         {"A", bc.A},
                        {"B", bc.B},         {"L1", bc.L1},
                        {"L2", bc.L2},       {"L3_log", bc.L3_log}};
  extra["guard_events"] = events_json(res.events);
  extra["failures"] = failures;
  write_manifest(out_dir, "analyze-radius", cfg, extra, sw);

  for (const auto& m : outcome.messages) out << m << '\n';
  outcome.exit_code = failures > 0 ? 1 : 0;
  out << "analyze-radius: " << rows.size() << " samples, "
      << (failures == 0 ? "ok" : "FAILED") << '\n';
  return outcome;
}

RunOutcome run_geometry_check(const RunConfig& cfg, const std::string& out_dir, std::ostream& out,
                              const RunnerOptions& opts) {
  Stopwatch sw;
  RunOutcome outcome;
  const Field u0 = initial_data(cfg.grid(), cfg.initial_spec());
  const PSSParams pss = cfg.pss_params();

  const int n_snap = cfg.curvature_snapshots;
  std::vector<double> times;
  for (int i = 0; i < n_snap; ++i) times.push_back(i * cfg.dt_stencil);
  StepConfig sc = cfg.step_config();
  sc.t_end = times.back();
  std::vector<double> march(times.begin() + 1, times.end());
  const EvolveResult res = evolve(u0, sc, march, cfg.gevrey_s);
  if (res.aborted) {
    json extra;
    extra["guard_events"] = events_json(res.events);
    extra["aborted"] = true;
    write_manifest(out_dir, "geometry-check", cfg, extra, sw);
    outcome.exit_code = 2;
    return outcome;
  }
  std::vector<EvolutionState> states;
  states.push_back(make_state(0.0, u0, cfg.gevrey_s));
  for (const auto& st : res.states) states.push_back(st);

  std::vector<MetricSample> metrics;
  std::vector<double> residuals;
  for (const auto& st : states) {
    const Field u_t = rhs(st.u, cfg.resolution_guard);
    const OneForms forms = one_forms(st.u, u_t, pss);
    metrics.push_back(metric(forms, st.t));
    residuals.push_back(pss.m1 == -2
                            ? zero_curvature_residual(st.u, pss, cfg.resolution_guard)
                            : std::numeric_limits<double>::quiet_NaN());
  }
  const std::vector<CurvatureSlice> slices =
      gaussian_curvature(metrics, cfg.dt_stencil, cfg.genericity_threshold_rel);

  auto csv = open_out(out_dir, "geometry.csv");
  csv << "t,max_abs_residual,min_abs_genericity,max_abs_K_plus_1,n_eval_points\n";
  int failures = 0;
  for (size_t i = 0; i < states.size(); ++i) {
    double min_gen = std::numeric_limits<double>::infinity();
    for (double v : metrics[i].genericity.samples()) min_gen = std::min(min_gen, std::abs(v));
    double k_err = std::numeric_limits<double>::quiet_NaN();
    int n_eval = 0;
    if (i >= 2 && i + 2 < states.size()) {
      const auto& slice = slices[i - 2];
      k_err = slice.max_abs_k_plus_one;
      n_eval = slice.n_eval;
      if (k_err > 1e-3) {
        ++failures;
        outcome.messages.push_back("|K+1| = " + fmt12(k_err) + " at t=" + fmt12(states[i].t));
      }
    }
    if (pss.m1 == -2 && residuals[i] > 1e-6) {
      ++failures;
      outcome.messages.push_back("zero-curvature residual " + fmt12(residuals[i]) + " at t=" +
                                 fmt12(states[i].t));
    }
    csv << format_g17(states[i].t) << ',' << format_g17(residuals[i]) << ','
        << format_g17(min_gen) << ',' << format_g17(k_err) << ',' << n_eval << '\n';
  }
  if (opts.dump_metric) {
    int idx = 0;
    for (const auto& ms : metrics) {
      auto dump = open_out(out_dir, "metric_" + std::to_string(idx++) + ".csv");
      dump << "x,E,F,G,det,genericity\n";
      const GridSpec& grid = ms.E.grid();
      for (int j = 0; j < grid.n_points; ++j)
        dump << format_g17(grid.x(j)) << ',' << format_g17(ms.E.samples()[j]) << ','
             << format_g17(ms.F.samples()[j]) << ',' << format_g17(ms.G.samples()[j]) << ','
             << format_g17(ms.det.samples()[j]) << ',' << format_g17(ms.genericity.samples()[j])
             << '\n';
    }
  }

  json extra;
  extra["guard_events"] = events_json(res.events);
  extra["failures"] = failures;
  write_manifest(out_dir, "geometry-check", cfg, extra, sw);

  for (const auto& m : outcome.messages) out << m << '\n';
  outcome.exit_code = failures > 0 ? 1 : 0;
  out << "geometry-check: " << states.size() << " slices, "
      << (failures == 0 ? "ok" : "FAILED") << '\n';
  return outcome;
}

}  // namespace psn
