#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace nlslab {

using cplx = std::complex<double>;
using Field = std::vector<cplx>;
using RealField = std::vector<double>;

// Periodic box [-L, L)^n sampled with N points per axis, x_i = -L + i h.
struct GridSpec {
  int dim = 1;
  int points = 64;
  double half_length = 10.0;

  void validate() const;
  double spacing() const { return 2.0 * half_length / points; }
  double cell_volume() const;
  std::size_t size() const;
  double coordinate(int i) const { return -half_length + i * spacing(); }
  // Angular wavenumber of FFT index i; the Nyquist index maps to -N/2.
  double wavenumber(int i) const;
  double max_wavenumber() const;
  GridSpec dilated(double lambda) const { return {dim, points, half_length * lambda}; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct FieldState {
  GridSpec grid;
  double t = 0.0;
  std::vector<Field> components;

  FieldState() = default;
  FieldState(const GridSpec& g, int count, double time = 0.0);

  int count() const { return static_cast<int>(components.size()); }
  bool all_finite() const;
  void check_shape() const;
};

// Coordinates of flat index idx; unused axes are zero.
std::array<double, 3> point_of(const GridSpec& grid, std::size_t idx);

Field sample_field(const GridSpec& grid, const std::function<cplx(const std::array<double, 3>&)>& fn);

// In-place multidimensional DFT on a fixed grid. forward() is unnormalized,
// inverse() divides by N^n so that inverse(forward(f)) = f.
class FourierTransform {
 public:
  explicit FourierTransform(const GridSpec& grid);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;
  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

// Spectral differential operators and quadrature on one grid. Holds FFT plans
// and wavenumber tables; const methods are safe to call concurrently.
class Spectral {
 public:
  explicit Spectral(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  const FourierTransform& fft() const { return fft_; }
  // |xi|^2 per FFT-ordered mode.
  const RealField& k_squared() const { return k2_; }
  // |x|^2 per grid point.
  const RealField& radius_squared() const { return r2_; }

  Field laplacian(std::span<const cplx> f) const;
  // Spectral derivative along an axis; the Nyquist mode is dropped.
  Field derivative(std::span<const cplx> f, int axis) const;
  double gradient_norm_sq(std::span<const cplx> f) const;
  // Same quantity from FFT coefficients of f.
  double gradient_norm_sq_hat(std::span<const cplx> fhat) const;
  double integrate(std::span<const double> f) const;
  double l2_norm_sq(std::span<const cplx> f) const;

 private:
  void check(std::size_t n) const;

  GridSpec grid_;
  FourierTransform fft_;
  RealField k2_;
  RealField r2_;
  std::vector<std::vector<int>> axis_index_;
};

// Cached operator for a grid; the cache is per thread.
const Spectral& spectral_for(const GridSpec& grid);

Field laplacian(std::span<const cplx> f, const GridSpec& grid);
double integrate(std::span<const double> f, const GridSpec& grid);
double gradient_norm_sq(std::span<const cplx> f, const GridSpec& grid);

// Values of x -> f(x / scale) at the points of `target`, from the
// trigonometric interpolant of samples on `source`. Points whose preimage lies
// outside the source box are set to zero.
Field resample(std::span<const cplx> f, const GridSpec& source, const GridSpec& target, double scale);

// Binary field files: little-endian header (n, N as u64; L as f64; l as u64;
// t as f64) followed by l * N^n (re, im) f64 pairs in row-major order.
void write_field(const std::string& path, const FieldState& state);
FieldState read_field(const std::string& path);

}  // namespace nlslab
