#pragma once

#include <vector>

#include "psn/field.hpp"

namespace psn {

/// Polarized right-hand side: Q(v, w) = dx(vw) - vw + dx L^{-2}(vw) + L^{-2}(vw)
/// with the product dealiased. Q(u, u) equals the evolution right-hand side.
Field bilinear_q(const Field& v, const Field& w);

/// Time power series u(t, x) ~ sum_k a_k(x) t^k built from the recursion
/// a_{k+1} = (k+1)^{-1} sum_{j=0}^{k} Q(a_j, a_{k-j}).
struct TaylorSeries {
  GridSpec grid;
  std::vector<Field> coeff;       // a_0 .. a_K
  std::vector<double> h2_norms;   // ||a_k||_{H^2}
  bool truncated = false;         // stopped early on an under-resolved coefficient
};

TaylorSeries taylor_coefficients(const Field& u0, int order, double resolution_guard = 1e-10);

/// Horner evaluation of the series at time t.
Field taylor_eval(const TaylorSeries& series, double t);

struct RadiusFit {
  double radius = 0.0;
  bool infinite = false;    // all-zero tail
  double fit_residual = 0.0;
  int orders_used = 0;
};

/// Convergence-radius estimate from the decay of ||a_k||_{H^2}: least-squares
/// fit of log||a_k|| against k over the top half of orders, ignoring orders
/// below the 1e-14 noise floor.
RadiusFit convergence_radius_estimate(const TaylorSeries& series);

struct LifespanReport {
  double u0_gnorm = 0.0;  // ||u0||_{G^{1,s}}
  bool u0_gnorm_unresolved = false;
  double R = 0.0;
  double c_s = 0.0;
  double M = 0.0;  // 3 c_s e^{-1} ||u0||^2
  double L = 0.0;  // 6 c_s e^{-1} (R + ||u0||)
  double T_aot = 0.0;    // R / (16 L R + 8 M)
  double T_thm22 = 0.0;  // e / (216 c_s ||u0||)
};

/// Lifespan from the scale-of-spaces contraction: T = R / (16 L R + 8 M).
LifespanReport lifespan_aot(double u0_gnorm, double R, double c_s);
/// Lifespan at the canonical ball radius R = ||u0||: T = e / (216 c_s ||u0||).
double lifespan_thm22(double u0_gnorm, double c_s);

}  // namespace psn
