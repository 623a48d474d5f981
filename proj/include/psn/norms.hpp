#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psn/field.hpp"

namespace psn {

/// Gevrey norm parameters: strip half-width sigma > 0 and Sobolev index s.
struct GevreyParams {
  double sigma = 1.0;
  double s = 2.0;
  void validate() const;
};

/// Truncated Kato-Masuda norm parameters. sigma may be negative; the inner
/// Sobolev index is fixed to 2.
struct KMParams {
  double sigma = -0.1;
  int m = 12;
  static constexpr int s_base = 2;
  void validate() const;
};

/// Himonas-Misiolek norm parameters.
struct HMParams {
  double sigma = 0.5;
  int m = 1;
  int j_max = 16;
  void validate() const;  // CLI-facing validation requires j_max >= 8
};

/// Relative spectral floor applied to all weighted norm measurements: modes
/// with |c_k| below this fraction of max|c| are pure roundoff and would
/// otherwise dominate strongly weighted sums (e.g. e^{2 sigma |xi|}).
inline constexpr double kSpectralFloorRel = 1e-13;

/// || d^j/dx^j f ||_{H^s} under the line-comparison normalization,
/// computed as a floored spectral sum. Returns the log of the norm
/// (-inf for the zero field); `derivative_sobolev_norm` exponentiates.
double derivative_sobolev_log_norm(const Field& f, int j, double s);
double derivative_sobolev_norm(const Field& f, int j, double s);

double sobolev_norm(const Field& f, double s);

struct GevreyResult {
  double value = 0.0;
  bool unresolved = false;  // top-10% wavenumber band carries > 1e-6 of the sum
};
GevreyResult gevrey_norm(const Field& f, const GevreyParams& p);

/// log of ||f||_{sigma,2,m}; never overflows internally.
double km_log_norm(const Field& f, const KMParams& p);
double km_norm(const Field& f, const KMParams& p);
/// d/d sigma of Phi_{sigma,m}: sum_j j e^{2 sigma j} (j!)^{-2} ||d^j f||_{H^2}^2.
double km_sigma_derivative(const Field& f, const KMParams& p);
double phi(const Field& f, const KMParams& p);
double phi_log(const Field& f, const KMParams& p);

/// Smallest truncation order whose last term is below tail_rel of the running
/// sum (capped). Used where the analysis wants the m -> infinity norm.
int adaptive_km_order(const Field& f, double sigma, double tail_rel = 1e-12, int m_cap = 200);

/// Fraction of the KM-weighted sum carried by the top-10% wavenumber band.
double km_tail_share(const Field& f, const KMParams& p);

struct HMResult {
  double value = 0.0;
  int argmax_j = 0;
};
HMResult hm_norm(const Field& f, const HMParams& p);

/// Spectral H^2 inner product, 2L sum (1+xi^2)^2 Re(c_f conj(c_g)).
double h2_inner(const Field& f, const Field& g);

/// |sum_j e^{2 sigma j}(j!)^{-2} <d^j u, d^j w>_{H^2}| with w = F(u) supplied
/// by the caller (the evolution right-hand side).
double prop32_lhs(const Field& u, const Field& f_of_u, const KMParams& p);

/// Kbar(p) = 144 p and alphabar(p, q) = 64 sqrt(q) (4 + 3p).
double prop32_kbar(double p);
double prop32_alphabar(double p, double q);
/// Kbar(||u||_{H^2}) Phi + alphabar(||u||_{H^2}, Phi) dPhi/dsigma.
double prop32_rhs(const Field& u, const KMParams& p);

struct LemmaSides {
  double lhs = 0.0;
  double rhs = 0.0;
};
/// Both sides of the convolution inequality for b_j = (j!)^{-1} e^{sigma j}
/// ||d^j u||_{H^2}: sum_{j=1..m} sum_{l=1..j} b_j b_l b_{j-l} <= ||u|| d_sigma ||u||^2.
LemmaSides lemma32_sides(const Field& u, const KMParams& p);

struct IneqRow {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs (or |lhs-rhs|/rhs for equality rows)
  bool pass = false;
};

/// Evaluates the operator inequalities
///   (a) ||dx f||_{G^{sigma',s}} <= e^{-1}/(sigma - sigma') ||f||_{G^{sigma,s}}
///   (b) ||dx f||_{G^{sigma,s}}  <= ||f||_{G^{sigma,s+1}}
///   (c) ||L^{-2} f||_{G^{sigma,s}} = ||f||_{G^{sigma,s-2}}   (equality)
/// plus the H^2 algebra bound ||f f||_{H^2} <= 8 ||f||_{H^2}^2.
/// Requires 0 < sigma' < sigma <= 1.
std::vector<IneqRow> operator_inequality_suite(const Field& f, double sigma, double sigma_prime,
                                               double s);

/// Deterministic random band-limited field: conjugate-symmetric coefficients
/// supported on 1 <= |k| <= k_band (plus optional mean), scaled to `amplitude`
/// in the max norm.
Field random_band_limited(const GridSpec& grid, int k_band, double amplitude, std::uint64_t seed);

/// Empirical Gevrey algebra constant: max over `n_pairs` random pairs of
/// ||fg|| / (||f|| ||g||) in G^{sigma,s}. The caller applies any safety factor.
double measure_algebra_constant(const GridSpec& grid, double sigma, double s, int n_pairs,
                                std::uint64_t seed);

}  // namespace psn
