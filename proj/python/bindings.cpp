#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "psn/config.hpp"
#include "psn/evolution.hpp"
#include "psn/geometry.hpp"
#include "psn/norms.hpp"
#include "psn/radius.hpp"
#include "psn/taylor.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace psn;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Field field_from_array(const GridSpec& grid, const py::array_t<double>& a) {
  auto buf = a.request();
  if (buf.ndim != 1) throw Error(Errc::invalid_field, "samples must be one-dimensional");
  const double* p = static_cast<const double*>(buf.ptr);
  return Field::from_samples(grid, std::vector<double>(p, p + buf.shape[0]));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "pseudospectral simulation and verification toolkit for the "
            "pseudospherical Novikov equation";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "PsnError");

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<double, int>(), "half_width"_a, "n_points"_a)
      .def_readonly("half_width", &GridSpec::half_width)
      .def_readonly("n_points", &GridSpec::n_points)
      .def("spacing", &GridSpec::spacing)
      .def("xi_max", &GridSpec::xi_max)
      .def("x", [](const GridSpec& g) {
        py::array_t<double> out(g.n_points);
        for (int j = 0; j < g.n_points; ++j) out.mutable_data()[j] = g.x(j);
        return out;
      });

  py::class_<Field>(m, "Field")
      .def_static("from_samples", &field_from_array, "grid"_a, "samples"_a)
      .def_static("zero", &Field::zero, "grid"_a)
      .def_property_readonly("grid", &Field::grid)
      .def("samples", [](const Field& f) { return to_array(f.samples()); })
      .def("line_transform",
           [](const Field& f) {
             const auto lt = f.line_transform();
             py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(lt.size()));
             std::copy(lt.begin(), lt.end(), out.mutable_data());
             return out;
           })
      .def("derivative", &Field::derivative, "order"_a)
      .def("helmholtz_inverse", &Field::helmholtz_inverse)
      .def("integrate", &Field::integrate)
      .def("integrate_abs", &Field::integrate_abs)
      .def("max_abs", &Field::max_abs)
      .def("min_value", &Field::min_value)
      .def("energy_tail", &Field::energy_tail)
      .def("__add__", [](const Field& a, const Field& b) { return a + b; })
      .def("__sub__", [](const Field& a, const Field& b) { return a - b; })
      .def("__rmul__", [](const Field& a, double c) { return c * a; });

  m.def("product", &product, "f"_a, "g"_a, "pointwise product with 2/3-rule dealiasing");
  m.def("sech_initial", [](const GridSpec& g, double a, double w) {
    return initial_data(g, InitialDataSpec{InitialKind::sech, a, w});
  }, "grid"_a, "amplitude"_a = 1.0, "width"_a = 1.0);
  m.def("gaussian_momentum_initial", [](const GridSpec& g, double a, double w) {
    return initial_data(g, InitialDataSpec{InitialKind::gaussian_momentum, a, w});
  }, "grid"_a, "amplitude"_a = 1.0, "width"_a = 1.0);

  m.def("sobolev_norm", &sobolev_norm, "f"_a, "s"_a);
  m.def("gevrey_norm",
        [](const Field& f, double sigma, double s) {
          const GevreyResult r = gevrey_norm(f, {sigma, s});
          return py::make_tuple(r.value, r.unresolved);
        },
        "f"_a, "sigma"_a, "s"_a, "returns (value, unresolved)");
  m.def("km_norm", [](const Field& f, double sigma, int mm) {
    return km_norm(f, KMParams{sigma, mm});
  }, "f"_a, "sigma"_a, "m"_a);
  m.def("hm_norm", [](const Field& f, double sigma, int mm, int j_max) {
    const HMResult r = hm_norm(f, HMParams{sigma, mm, j_max});
    return py::make_tuple(r.value, r.argmax_j);
  }, "f"_a, "sigma"_a, "m"_a, "j_max"_a = 16);

  m.def("rhs", &rhs, "u"_a, "resolution_guard"_a = 1e-10);
  m.def("rhs_form_check", &rhs_form_check, "u"_a);
  m.def("momentum", &momentum, "u"_a);

  py::class_<DiagnosticsRecord>(m, "DiagnosticsRecord")
      .def_readonly("m_l1", &DiagnosticsRecord::m_l1)
      .def_readonly("u_l1", &DiagnosticsRecord::u_l1)
      .def_readonly("u_h2", &DiagnosticsRecord::u_h2)
      .def_readonly("u_hs", &DiagnosticsRecord::u_hs)
      .def_readonly("min_m", &DiagnosticsRecord::min_m)
      .def_readonly("min_u", &DiagnosticsRecord::min_u)
      .def_readonly("energy_tail", &DiagnosticsRecord::energy_tail);

  py::class_<EvolutionState>(m, "EvolutionState")
      .def_readonly("t", &EvolutionState::t)
      .def_readonly("u", &EvolutionState::u)
      .def_readonly("diag", &EvolutionState::diag);

  m.def("evolve",
        [](const Field& u0, double dt, double t_end, const std::vector<double>& sample_times) {
          StepConfig cfg;
          cfg.dt = dt;
          cfg.t_end = t_end;
          const EvolveResult r = evolve(u0, cfg, sample_times);
          return py::make_tuple(r.states, r.aborted);
        },
        "u0"_a, "dt"_a, "t_end"_a, "sample_times"_a = std::vector<double>{},
        "returns (states, aborted)");

  m.def("bilinear_q", &bilinear_q, "v"_a, "w"_a);
  m.def("taylor_coefficients",
        [](const Field& u0, int order) {
          const TaylorSeries s = taylor_coefficients(u0, order);
          return py::make_tuple(s.coeff, s.h2_norms, s.truncated);
        },
        "u0"_a, "order"_a, "returns (coefficients, h2_norms, truncated)");
  m.def("taylor_eval", [](const std::vector<Field>& coeff, double t) {
    if (coeff.empty()) throw Error(Errc::invalid_parameter, "empty series");
    TaylorSeries s{coeff.front().grid(), coeff, {}, false};
    return taylor_eval(s, t);
  }, "coefficients"_a, "t"_a);

  m.def("lifespan_aot",
        [](double u0_gnorm, double R, double c_s) {
          const LifespanReport r = lifespan_aot(u0_gnorm, R, c_s);
          py::dict d;
          d["M"] = r.M;
          d["L"] = r.L;
          d["T_aot"] = r.T_aot;
          d["T_thm22"] = r.T_thm22;
          return d;
        },
        "u0_gnorm"_a, "R"_a, "c_s"_a);
  m.def("lifespan_thm22", &lifespan_thm22, "u0_gnorm"_a, "c_s"_a);

  py::class_<RadiusEstimate>(m, "RadiusEstimate")
      .def_readonly("r_measured", &RadiusEstimate::r_measured)
      .def_readonly("fit_r2", &RadiusEstimate::fit_r2)
      .def_readonly("xi_lo", &RadiusEstimate::xi_lo)
      .def_readonly("xi_hi", &RadiusEstimate::xi_hi)
      .def_readonly("floor_hit", &RadiusEstimate::floor_hit)
      .def_readonly("n_modes", &RadiusEstimate::n_modes);
  m.def("radius_from_spectrum", &radius_from_spectrum, "u"_a, "floor_rel"_a = 1e-13);

  py::class_<BoundConstants>(m, "BoundConstants")
      .def_readonly("sigma0", &BoundConstants::sigma0)
      .def_readonly("mu_bound", &BoundConstants::mu_bound)
      .def_readonly("u0_km", &BoundConstants::u0_km)
      .def_readonly("K", &BoundConstants::K)
      .def_readonly("A", &BoundConstants::A)
      .def_readonly("B", &BoundConstants::B)
      .def_readonly("L1", &BoundConstants::L1)
      .def_readonly("L2", &BoundConstants::L2)
      .def_readonly("L3_log", &BoundConstants::L3_log);
  m.def("bound_constants_from_norm", &bound_constants_from_norm, "u0_km"_a, "sigma0"_a,
        "mu_bound"_a);
  m.def("bound_constants", &bound_constants, "u0"_a, "sigma0"_a, "mu_bound"_a);
  m.def("sigma_of_t", &sigma_of_t, "constants"_a, "t"_a);
  m.def("rho_of_t", &rho_of_t, "constants"_a, "t"_a);
  m.def("lower_bound_r_log", &lower_bound_r_log, "constants"_a, "t"_a);

  py::class_<PSSParams>(m, "PSSParams")
      .def(py::init([](double mu, int m1, int sign) {
             PSSParams p{mu, m1, sign};
             p.validate();
             return p;
           }),
           "mu_metric"_a = 0.0, "m1"_a = -2, "sign"_a = 1)
      .def_readonly("mu_metric", &PSSParams::mu_metric)
      .def_readonly("m1", &PSSParams::m1)
      .def_readonly("sign", &PSSParams::sign);

  m.def("psi", &psi, "u"_a, "params"_a);
  m.def("genericity_indicator",
        [](const Field& u, const PSSParams& p) {
          return genericity_indicator(one_forms(u, rhs(u), p));
        },
        "u"_a, "params"_a);
  m.def("metric_components",
        [](const Field& u, const PSSParams& p) {
          const MetricSample ms = metric(one_forms(u, rhs(u), p));
          py::dict d;
          d["E"] = ms.E;
          d["F"] = ms.F;
          d["G"] = ms.G;
          d["det"] = ms.det;
          d["genericity"] = ms.genericity;
          return d;
        },
        "u"_a, "params"_a);
  m.def("zero_curvature_residual", &zero_curvature_residual, "u"_a, "params"_a,
        "resolution_guard"_a = 1e-10);
}
