#include "psn/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

namespace psn {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_field: return "invalid field";
    case Errc::unsupported_order: return "unsupported derivative order";
    case Errc::grid_mismatch: return "grid mismatch";
    case Errc::under_resolved: return "under-resolved";
    case Errc::cfl_exceeded: return "cfl guard exceeded";
    case Errc::wave_breaking_suspected: return "wave breaking suspected";
    case Errc::nonfinite_state: return "non-finite state";
    case Errc::insufficient_band: return "insufficient band";
    case Errc::invalid_parameter: return "invalid parameter";
    case Errc::domain_error: return "domain error";
    case Errc::io_error: return "io error";
    case Errc::internal_inconsistency: return "internal inconsistency";
    case Errc::positivity_violation: return "positivity violation";
  }
  return "unknown error";
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

// One r2c/c2r plan pair per N, created with FFTW_ESTIMATE so planning is
// deterministic. Plan creation is serialized; execution on distinct buffers
// is thread-safe.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  struct Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
  };

  const Plans& get(int n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> re(static_cast<size_t>(n));
    std::vector<fftw_complex> cx(static_cast<size_t>(n / 2 + 1));
    Plans p;
    p.r2c = fftw_plan_dft_r2c_1d(n, re.data(), cx.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.c2r = fftw_plan_dft_c2r_1d(n, cx.data(), re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    return plans_.emplace(n, p).first->second;
  }

 private:
  PlanCache() = default;
  std::mutex mu_;
  std::map<int, Plans> plans_;
};

// The first sample sits at x = -L, so the e^{i xi_k x} basis differs from the
// DFT basis e^{2 pi i j k / N} by a factor (-1)^k; both directions apply it.
std::vector<std::complex<double>> forward(const GridSpec& grid, const std::vector<double>& samples) {
  const int n = grid.n_points;
  const auto& plans = PlanCache::instance().get(n);
  std::vector<double> in(samples);
  std::vector<std::complex<double>> out(static_cast<size_t>(n / 2 + 1));
  fftw_execute_dft_r2c(plans.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  const double inv_n = 1.0 / n;
  for (int k = 0; k <= n / 2; ++k) out[k] *= (k % 2 == 0) ? inv_n : -inv_n;
  out.front() = {out.front().real(), 0.0};
  out.back() = {out.back().real(), 0.0};
  return out;
}

std::vector<double> inverse(const GridSpec& grid, const std::vector<std::complex<double>>& coeff) {
  const int n = grid.n_points;
  const auto& plans = PlanCache::instance().get(n);
  std::vector<std::complex<double>> in(coeff);
  for (int k = 1; k <= n / 2; k += 2) in[k] = -in[k];
  std::vector<double> out(static_cast<size_t>(n));
  fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  return out;
}

void check_finite(const std::vector<double>& samples) {
  for (double v : samples) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_field, "sample is not finite");
  }
}

}  // namespace

GridSpec::GridSpec(double L, int N) : half_width(L), n_points(N) {
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(Errc::invalid_parameter, "half_width must be positive");
  if (N < 8 || N % 2 != 0) throw Error(Errc::invalid_parameter, "n_points must be even and >= 8");
}

Field Field::from_samples(const GridSpec& grid, std::vector<double> samples) {
  if (static_cast<int>(samples.size()) != grid.n_points)
    throw Error(Errc::invalid_field, "sample count does not match grid");
  check_finite(samples);
  auto coeff = forward(grid, samples);
  return Field(grid, std::move(samples), std::move(coeff));
}

Field Field::from_spectrum(const GridSpec& grid, std::vector<std::complex<double>> coeff) {
  if (static_cast<int>(coeff.size()) != grid.n_points / 2 + 1)
    throw Error(Errc::invalid_field, "coefficient count does not match grid");
  for (const auto& c : coeff) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw Error(Errc::invalid_field, "coefficient is not finite");
  }
  coeff.front() = {coeff.front().real(), 0.0};
  coeff.back() = {coeff.back().real(), 0.0};
  auto samples = inverse(grid, coeff);
  return Field(grid, std::move(samples), std::move(coeff));
}

Field Field::zero(const GridSpec& grid) {
  return Field(grid, std::vector<double>(grid.n_points, 0.0),
               std::vector<std::complex<double>>(grid.n_points / 2 + 1, {0.0, 0.0}));
}

Field Field::from_function(const GridSpec& grid, const std::function<double(double)>& f) {
  std::vector<double> s(static_cast<size_t>(grid.n_points));
  for (int j = 0; j < grid.n_points; ++j) s[j] = f(grid.x(j));
  return from_samples(grid, std::move(s));
}

std::vector<std::complex<double>> Field::line_transform() const {
  const int n = grid_.n_points;
  const double scale = 2.0 * grid_.half_width / std::sqrt(2.0 * GridSpec::kPi);
  std::vector<std::complex<double>> out(static_cast<size_t>(n));
  // ordering k = -N/2 .. N/2-1
  for (int k = -n / 2; k < n / 2; ++k) {
    std::complex<double> c = (k >= 0) ? coeff_[k] : std::conj(coeff_[-k]);
    out[k + n / 2] = scale * c;
  }
  return out;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

double Field::min_value() const {
  return *std::min_element(samples_.begin(), samples_.end());
}

double Field::max_value() const {
  return *std::max_element(samples_.begin(), samples_.end());
}

double Field::energy_tail() const {
  const int kc = grid_.dealias_cutoff();
  double total = 0.0, tail = 0.0;
  for (int k = 0; k <= grid_.nyquist(); ++k) {
    const double w = (k == 0 || k == grid_.nyquist()) ? 1.0 : 2.0;
    const double e = w * std::norm(coeff_[k]);
    total += e;
    if (k > kc) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

double Field::halfdomain_mass_fraction() const {
  const double half = grid_.half_width / 2.0;
  double total = 0.0, outside = 0.0;
  for (int j = 0; j < grid_.n_points; ++j) {
    const double e = samples_[j] * samples_[j];
    total += e;
    if (std::abs(grid_.x(j)) > half) outside += e;
  }
  return total > 0.0 ? outside / total : 0.0;
}

Field Field::derivative(int order) const {
  if (order < 0 || order > kMaxDerivativeOrder)
    throw Error(Errc::unsupported_order, "order " + std::to_string(order) + " exceeds maximum " +
                                             std::to_string(kMaxDerivativeOrder));
  if (order == 0) return *this;
  const int half = grid_.nyquist();
  std::vector<std::complex<double>> c(coeff_);
  // (i xi)^order with phase cycle {1, i, -1, -i}
  const int phase = order % 4;
  for (int k = 0; k <= half; ++k) {
    const double xik = grid_.xi(k);
    const double mag = std::pow(xik, order);
    std::complex<double> m;
    switch (phase) {
      case 0: m = {mag, 0.0}; break;
      case 1: m = {0.0, mag}; break;
      case 2: m = {-mag, 0.0}; break;
      default: m = {0.0, -mag}; break;
    }
    c[k] *= m;
  }
  if (order % 2 == 1) c[half] = {0.0, 0.0};  // no conjugate partner for the Nyquist mode
  return from_spectrum(grid_, std::move(c));
}

Field Field::helmholtz_inverse() const {
  std::vector<std::complex<double>> c(coeff_);
  for (int k = 0; k <= grid_.nyquist(); ++k) {
    const double xik = grid_.xi(k);
    c[k] /= 1.0 + xik * xik;
  }
  return from_spectrum(grid_, std::move(c));
}

double Field::integrate() const {
  double s = 0.0;
  for (double v : samples_) s += v;
  return s * grid_.spacing();
}

double Field::integrate_abs() const {
  double s = 0.0;
  for (double v : samples_) s += std::abs(v);
  return s * grid_.spacing();
}

Field linear_combination(double a, const Field& f, double b, const Field& g) {
  if (!(f.grid() == g.grid())) throw Error(Errc::grid_mismatch, "linear combination of different grids");
  const int n = f.size();
  std::vector<double> s(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) s[j] = a * f.samples()[j] + b * g.samples()[j];
  check_finite(s);
  std::vector<std::complex<double>> c(static_cast<size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k) c[k] = a * f.coeffs()[k] + b * g.coeffs()[k];
  return Field(f.grid(), std::move(s), std::move(c));
}

Field operator+(const Field& f, const Field& g) { return linear_combination(1.0, f, 1.0, g); }
Field operator-(const Field& f, const Field& g) { return linear_combination(1.0, f, -1.0, g); }
Field operator*(double a, const Field& f) { return linear_combination(a, f, 0.0, f); }

Field product(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw Error(Errc::grid_mismatch, "product of fields on different grids");
  const GridSpec& grid = f.grid();
  const int n = grid.n_points;
  std::vector<double> s(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) s[j] = f.samples()[j] * g.samples()[j];
  check_finite(s);
  auto c = forward(grid, s);
  const int kc = grid.dealias_cutoff();
  for (int k = kc + 1; k <= grid.nyquist(); ++k) c[k] = {0.0, 0.0};
  return Field::from_spectrum(grid, std::move(c));
}

void Field::save_samples_csv(std::ostream& os) const {
  os << "x,value\n";
  for (int j = 0; j < grid_.n_points; ++j)
    os << format_g17(grid_.x(j)) << ',' << format_g17(samples_[j]) << '\n';
}

void Field::save_spectrum_csv(std::ostream& os) const {
  os << "k,re,im\n";
  auto lt = line_transform();
  const int n = grid_.n_points;
  for (int k = -n / 2; k < n / 2; ++k) {
    const auto& c = lt[k + n / 2];
    os << k << ',' << format_g17(c.real()) << ',' << format_g17(c.imag()) << '\n';
  }
}

Field Field::load_samples_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,value", 0) != 0)
    throw Error(Errc::io_error, "expected header 'x,value'");
  std::vector<double> xs, vs;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string xs_s, vs_s;
    if (!std::getline(ss, xs_s, ',') || !std::getline(ss, vs_s))
      throw Error(Errc::io_error, "malformed row at line " + std::to_string(lineno));
    try {
      xs.push_back(std::stod(xs_s));
      vs.push_back(std::stod(vs_s));
    } catch (const std::exception&) {
      throw Error(Errc::io_error, "malformed number at line " + std::to_string(lineno));
    }
  }
  const int n = static_cast<int>(vs.size());
  if (n < 8 || n % 2 != 0) throw Error(Errc::io_error, "sample count must be even and >= 8");
  // Recover L from the first two abscissae: x_0 = -L, h = x_1 - x_0, 2L = N h.
  const double h = xs[1] - xs[0];
  const double L = -xs[0];
  if (std::abs(n * h - 2.0 * L) > 1e-9 * (2.0 * L))
    throw Error(Errc::io_error, "abscissae are not a uniform periodic grid on [-L, L)");
  return from_samples(GridSpec(L, n), std::move(vs));
}

}  // namespace psn
