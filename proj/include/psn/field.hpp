#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "psn/common.hpp"

namespace psn {

/// Uniform periodic grid on [-L, L) with N (even) points.
///
/// Wavenumbers are xi_k = pi*k/L for k = -N/2 .. N/2-1. Real fields are stored
/// with the half-complex convention, bins k = 0 .. N/2; the Nyquist bin N/2
/// carries the k = -N/2 mode.
struct GridSpec {
  double half_width = 40.0;  // L
  int n_points = 1024;       // N

  GridSpec() = default;
  GridSpec(double L, int N);

  double spacing() const { return 2.0 * half_width / n_points; }
  double x(int j) const { return -half_width + j * spacing(); }
  double xi(int k) const { return kPi * k / half_width; }
  int nyquist() const { return n_points / 2; }
  double xi_max() const { return xi(nyquist()); }
  /// Largest retained |k| under the 2/3 rule for quadratic products.
  int dealias_cutoff() const { return n_points / 3; }

  bool operator==(const GridSpec&) const = default;

  static constexpr double kPi = 3.14159265358979323846;
};

/// Immutable real-valued periodic field carrying both grid samples and the
/// discrete spectrum c_k, with f(x_j) = sum_k c_k exp(i xi_k x_j).
///
/// Both representations are materialized at construction, so every accessor
/// is const and the type is safe to share across threads.
class Field {
 public:
  static Field from_samples(const GridSpec& grid, std::vector<double> samples);
  /// coeff has n/2+1 entries (half-complex). Imaginary parts of bins 0 and
  /// N/2 are forced to zero to keep the field real.
  static Field from_spectrum(const GridSpec& grid, std::vector<std::complex<double>> coeff);
  static Field zero(const GridSpec& grid);
  static Field from_function(const GridSpec& grid, const std::function<double(double)>& f);

  const GridSpec& grid() const { return grid_; }
  int size() const { return grid_.n_points; }
  std::span<const double> samples() const { return samples_; }
  /// Half-complex coefficients c_k, k = 0 .. N/2.
  std::span<const std::complex<double>> coeffs() const { return coeff_; }

  /// Line-comparison Fourier transform view: u_hat(xi_k) ~ (2L/sqrt(2 pi)) c_k,
  /// ordered k = -N/2 .. N/2-1.
  std::vector<std::complex<double>> line_transform() const;

  double max_abs() const;
  double min_value() const;
  double max_value() const;
  /// Fraction of spectral energy carried by modes |k| > dealias cutoff.
  double energy_tail() const;
  /// Fraction of the L2 mass (of f^2) outside |x| <= L/2.
  double halfdomain_mass_fraction() const;

  Field derivative(int order) const;
  Field helmholtz_inverse() const;
  double integrate() const;
  double integrate_abs() const;

  static constexpr int kMaxDerivativeOrder = 16;

  void save_samples_csv(std::ostream& os) const;
  void save_spectrum_csv(std::ostream& os) const;
  static Field load_samples_csv(std::istream& is);

 private:
  friend Field linear_combination(double a, const Field& f, double b, const Field& g);

  Field(GridSpec g, std::vector<double> s, std::vector<std::complex<double>> c)
      : grid_(g), samples_(std::move(s)), coeff_(std::move(c)) {}

  GridSpec grid_;
  std::vector<double> samples_;
  std::vector<std::complex<double>> coeff_;
};

/// a*f + b*g, computed on both representations without transforms.
Field linear_combination(double a, const Field& f, double b, const Field& g);
Field operator+(const Field& f, const Field& g);
Field operator-(const Field& f, const Field& g);
Field operator*(double a, const Field& f);

/// Pointwise product with 2/3-rule dealiasing in spectral space.
Field product(const Field& f, const Field& g);

}  // namespace psn
