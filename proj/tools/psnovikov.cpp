// Command line front end: configuration, orchestration and reproducible
// output for the simulation and verification pipelines.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "psn/runner.hpp"

namespace {

struct Overrides {
  std::optional<double> t_end, L, dt, sigma0, mu_metric, cfl;
  std::optional<int> N, m1, seed, taylor_order, snapshots_n;
  std::optional<std::string> cs, initial;
  std::optional<double> u0_norm, R;
};

void apply(const Overrides& o, psn::RunConfig& cfg) {
  if (o.t_end) cfg.t_end = *o.t_end;
  if (o.L) cfg.L = *o.L;
  if (o.dt) cfg.dt = *o.dt;
  if (o.sigma0) cfg.sigma0 = *o.sigma0;
  if (o.mu_metric) cfg.mu_metric = *o.mu_metric;
  if (o.N) cfg.N = *o.N;
  if (o.m1) cfg.m1 = *o.m1;
  if (o.seed) cfg.seed = static_cast<std::uint64_t>(*o.seed);
  if (o.cs) cfg.cs = *o.cs;
  if (o.initial) cfg.initial = *o.initial;
  if (o.taylor_order) cfg.taylor_order = *o.taylor_order;
  if (o.u0_norm) cfg.u0_gnorm = *o.u0_norm;
  if (o.R) cfg.lifespan_R = *o.R;
  cfg.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudospectral simulation and verification toolkit for the "
               "pseudospherical Novikov equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  Overrides ov;
  psn::RunnerOptions ropts;

  app.add_option("--config", config_path, "configuration file (flat key = value)");
  app.add_option("--out", out_dir, "output directory (overrides out_dir)");
  app.add_option("--seed", ov.seed, "seed for randomized suites");
  app.add_option("--t-end", ov.t_end, "final time");
  app.add_option("--N", ov.N, "grid points");
  app.add_option("--L", ov.L, "domain half width");
  app.add_option("--dt", ov.dt, "time step");
  app.add_option("--sigma0", ov.sigma0, "Kato-Masuda base sigma (negative)");
  app.add_option("--mu-metric", ov.mu_metric, "metric parameter mu");
  app.add_option("--m1", ov.m1, "one-form branch, -2 or 1")->check(CLI::IsMember({-2, 1}));
  app.add_option("--cs", ov.cs, "algebra constant: a number or 'measured'");
  app.add_option("--initial", ov.initial,
                 "initial data kind: sech, gaussian_momentum, mode_perturbation, from_file");
  app.add_option("--taylor-order", ov.taylor_order, "time power series order");
  app.add_option("--u0-norm", ov.u0_norm, "use this ||u0||_{G^{1,s}} instead of measuring");
  app.add_option("--R", ov.R, "ball radius for the lifespan formula");

  auto* evolve = app.add_subcommand("evolve", "march the equation and record diagnostics");
  evolve->add_flag("--snapshots", ropts.write_snapshots, "write per-sample field CSVs");
  auto* radius = app.add_subcommand("analyze-radius",
                                    "measure the analyticity radius against the lower bound");
  auto* taylor = app.add_subcommand("taylor-compare",
                                    "time power series versus the time stepper");
  auto* geometry = app.add_subcommand("geometry-check",
                                      "metric, curvature and zero-curvature residual");
  geometry->add_flag("--dump-metric", ropts.dump_metric, "write metric component CSVs");
  auto* norms = app.add_subcommand("norm-check", "randomized norm inequality suite");
  auto* lifespan = app.add_subcommand("lifespan", "explicit lifespan formulas");

  CLI11_PARSE(app, argc, argv);

  try {
    psn::RunConfig cfg =
        config_path.empty() ? psn::RunConfig{} : psn::parse_config_file(config_path);
    apply(ov, cfg);
    const std::string out = out_dir.empty() ? cfg.out_dir : out_dir;

    psn::RunOutcome outcome;
    if (evolve->parsed()) outcome = psn::run_evolve(cfg, out, std::cout, ropts);
    else if (radius->parsed()) outcome = psn::run_analyze_radius(cfg, out, std::cout);
    else if (taylor->parsed()) outcome = psn::run_taylor_compare(cfg, out, std::cout);
    else if (geometry->parsed()) outcome = psn::run_geometry_check(cfg, out, std::cout, ropts);
    else if (norms->parsed()) outcome = psn::run_norm_check(cfg, out, std::cout);
    else if (lifespan->parsed()) outcome = psn::run_lifespan(cfg, out, std::cout);
    return outcome.exit_code;
  } catch (const psn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case psn::Errc::under_resolved:
      case psn::Errc::cfl_exceeded:
      case psn::Errc::wave_breaking_suspected:
        return 2;
      default:
        return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
