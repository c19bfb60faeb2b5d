#include <cmath>

#include "nlslab/error.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

void GridSpec::validate() const {
  if (dim < 1 || dim > 3) throw SpecError("grid dimension must be 1, 2 or 3");
  if (points < 16 || (points & (points - 1)) != 0) {
    throw SpecError("points per axis must be a power of two >= 16");
  }
  if (!(half_length > 0.0) || !std::isfinite(half_length)) throw SpecError("half_length must be positive");
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(points);
  return s;
}

double GridSpec::wavenumber(int i) const {
  const int k = i < points / 2 ? i : i - points;
  return M_PI * k / half_length;
}

double GridSpec::max_wavenumber() const { return M_PI * (points / 2) / half_length; }

FieldState::FieldState(const GridSpec& g, int count, double time)
    : grid(g), t(time), components(count, Field(g.size(), cplx(0.0))) {}

bool FieldState::all_finite() const {
  for (const auto& c : components) {
    for (const auto& v : c) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  }
  return true;
}

void FieldState::check_shape() const {
  const std::size_t n = grid.size();
  for (const auto& c : components) {
    if (c.size() != n) throw SpecError("shape mismatch: component does not match the grid");
  }
}

std::array<double, 3> point_of(const GridSpec& grid, std::size_t idx) {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const std::size_t n = static_cast<std::size_t>(grid.points);
  for (int a = grid.dim - 1; a >= 0; --a) {
    x[a] = grid.coordinate(static_cast<int>(idx % n));
    idx /= n;
  }
  return x;
}

Field sample_field(const GridSpec& grid, const std::function<cplx(const std::array<double, 3>&)>& fn) {
  Field out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(point_of(grid, i));
  return out;
}

}  // namespace nlslab
