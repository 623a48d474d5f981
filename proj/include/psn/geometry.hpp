#pragma once

#include <array>
#include <vector>

#include "psn/field.hpp"

namespace psn {

/// Parameters of the pseudospherical one-form family: metric parameter mu
/// (unrelated to the H^2 bound mu), the branch m1 in {-2, 1}, and the global
/// sign choice for the sqrt(1+mu^2) terms.
struct PSSParams {
  double mu_metric = 0.0;
  int m1 = -2;
  int sign = 1;
  void validate() const;
};

struct OneForms {
  Field f11, f12, f21, f22, f31, f32;
  Field u, u_t;  // u_t is carried for downstream time derivatives
  PSSParams params;
};

/// psi = 4 u u_x / m1 - 2 u_x^2 - 2 u^2 (spectral derivative).
Field psi(const Field& u, const PSSParams& p);

OneForms one_forms(const Field& u, const Field& u_t, const PSSParams& p);

struct MetricSample {
  double t = 0.0;
  Field E, F, G;
  Field det;         // EG - F^2
  Field genericity;  // f11 f22 - f12 f21 (dx^dt coefficient of w1^w2)
};

/// First fundamental form E dx^2 + 2F dx dt + G dt^2 from the one-forms.
/// Cross-checked against the closed-form metric components; a mismatch beyond
/// 1e-10 of scale is an internal-consistency error.
MetricSample metric(const OneForms& forms, double t = 0.0);

Field genericity_indicator(const OneForms& forms);

/// Pointwise sl(2,R) pair; entries are fields over the grid.
struct AknsPair {
  std::array<Field, 4> X;  // row-major 2x2
  std::array<Field, 4> T;
};

AknsPair akns_matrices(const OneForms& forms);

/// Max-norm of X_t - T_x + [X, T] for the state pair (u, u_t). Vanishes
/// identically when u_t is the evolution right-hand side of u; an
/// inconsistent pair leaves an O(1) residual. Only the m1 = -2 branch
/// carries the formulation.
double zero_curvature_residual(const Field& u, const Field& u_t, const PSSParams& p);
/// Same, with u_t = F(u) substituted analytically (no time differencing).
double zero_curvature_residual(const Field& u, const PSSParams& p,
                               double resolution_guard = 1e-10);

struct CurvatureSlice {
  double t = 0.0;
  std::vector<double> K;            // meaningful where evaluated[j]
  std::vector<unsigned char> evaluated;
  int n_eval = 0;
  double max_abs_k_plus_one = 0.0;
};

/// Default relative genericity cut for curvature evaluation. The Brioschi
/// denominator is (EG - F^2)^2 = indicator^4, so the cut must hold the
/// denominator far enough above the numerator's absolute error floor; 1e-2
/// of max|indicator| keeps |K+1| errors below ~1e-5 at the cut.
inline constexpr double kGenericityThresholdRel = 1e-2;

/// Gaussian curvature via the Brioschi formula in (x, t): spectral x
/// derivatives, 4th-order centered t stencils over >= 5 uniformly spaced
/// metric snapshots. Returns one slice per interior time, restricted to
/// points with |genericity| above the threshold.
std::vector<CurvatureSlice> gaussian_curvature(const std::vector<MetricSample>& series,
                                               double dt_stencil,
                                               double threshold_rel = kGenericityThresholdRel);

enum class NongenericKind { sqrt_exp_m2, sqrt_exp_p1, f_exp };

struct WindowedField {
  Field field;
  double inner_lo = 0.0;  // region where the cutoff is 1 to roundoff
  double inner_hi = 0.0;
};

/// Samples a nongeneric reference profile on [lo, hi], tapered to zero with an
/// erf cutoff of the given width so it lives on the periodic grid. Used only
/// for pointwise genericity tests, never evolved.
WindowedField nongeneric_reference(const GridSpec& grid, NongenericKind kind, double a, double b,
                                   double lo, double hi, double taper_width = 0.5);

}  // namespace psn
