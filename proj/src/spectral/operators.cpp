#include <cmath>
#include <list>
#include <memory>

#include "nlslab/error.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

Spectral::Spectral(const GridSpec& grid) : grid_(grid), fft_(grid) {
  const std::size_t n = grid.size();
  const std::size_t N = static_cast<std::size_t>(grid.points);
  k2_.assign(n, 0.0);
  r2_.assign(n, 0.0);
  axis_index_.assign(grid.dim, std::vector<int>(n));
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rest = idx;
    for (int a = grid.dim - 1; a >= 0; --a) {
      const int i = static_cast<int>(rest % N);
      rest /= N;
      axis_index_[a][idx] = i;
      const double k = grid.wavenumber(i);
      const double x = grid.coordinate(i);
      k2_[idx] += k * k;
      r2_[idx] += x * x;
    }
  }
}

void Spectral::check(std::size_t n) const {
  if (n != grid_.size()) throw SpecError("shape mismatch: field does not match the grid");
}

Field Spectral::laplacian(std::span<const cplx> f) const {
  check(f.size());
  Field g(f.begin(), f.end());
  fft_.forward(g);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= -k2_[i];
  fft_.inverse(g);
  return g;
}

Field Spectral::derivative(std::span<const cplx> f, int axis) const {
  check(f.size());
  if (axis < 0 || axis >= grid_.dim) throw SpecError("derivative axis out of range");
  Field g(f.begin(), f.end());
  fft_.forward(g);
  const int nyquist = grid_.points / 2;
  const auto& ai = axis_index_[axis];
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int j = ai[i];
    g[i] *= j == nyquist ? cplx(0.0) : cplx(0.0, grid_.wavenumber(j));
  }
  fft_.inverse(g);
  return g;
}

double Spectral::gradient_norm_sq_hat(std::span<const cplx> fhat) const {
  check(fhat.size());
  double s = 0.0;
  for (std::size_t i = 0; i < fhat.size(); ++i) s += k2_[i] * std::norm(fhat[i]);
  return s * grid_.cell_volume() / static_cast<double>(fhat.size());
}

double Spectral::gradient_norm_sq(std::span<const cplx> f) const {
  check(f.size());
  Field g(f.begin(), f.end());
  fft_.forward(g);
  return gradient_norm_sq_hat(g);
}

double Spectral::integrate(std::span<const double> f) const {
  check(f.size());
  double s = 0.0;
  for (double v : f) s += v;
  return s * grid_.cell_volume();
}

double Spectral::l2_norm_sq(std::span<const cplx> f) const {
  check(f.size());
  double s = 0.0;
  for (const auto& v : f) s += std::norm(v);
  return s * grid_.cell_volume();
}

const Spectral& spectral_for(const GridSpec& grid) {
  // Small most-recently-used cache: plans are cheap but not free.
  thread_local std::list<std::unique_ptr<Spectral>> cache;
  for (auto it = cache.begin(); it != cache.end(); ++it) {
    if ((*it)->grid() == grid) {
      cache.splice(cache.begin(), cache, it);
      return *cache.front();
    }
  }
  cache.push_front(std::make_unique<Spectral>(grid));
  if (cache.size() > 16) cache.pop_back();
  return *cache.front();
}

Field laplacian(std::span<const cplx> f, const GridSpec& grid) { return spectral_for(grid).laplacian(f); }

double integrate(std::span<const double> f, const GridSpec& grid) {
  return spectral_for(grid).integrate(f);
}

double gradient_norm_sq(std::span<const cplx> f, const GridSpec& grid) {
  return spectral_for(grid).gradient_norm_sq(f);
}

Field resample(std::span<const cplx> f, const GridSpec& source, const GridSpec& target, double scale) {
  source.validate();
  target.validate();
  if (source.dim != target.dim) throw SpecError("resample: dimension mismatch");
  if (f.size() != source.size()) throw SpecError("shape mismatch in resample");
  if (!(scale > 0.0)) throw SpecError("resample: scale must be positive");

  const int Ns = source.points;
  const int Nt = target.points;
  const int dim = source.dim;
  const double L = source.half_length;

  // Row m of E evaluates the 1D trigonometric interpolant at y_m = x_m / scale.
  std::vector<cplx> E(static_cast<std::size_t>(Nt) * Ns, cplx(0.0));
  for (int m = 0; m < Nt; ++m) {
    const double y = target.coordinate(m) / scale;
    if (y < -L || y > L) continue;
    for (int k = 0; k < Ns; ++k) {
      const double xi = source.wavenumber(k);
      const double phase = xi * (y + L);
      cplx e = k == Ns / 2 ? cplx(std::cos(phase), 0.0) : std::polar(1.0, phase);
      E[static_cast<std::size_t>(m) * Ns + k] = e / static_cast<double>(Ns);
    }
  }

  // Transform one axis at a time. `shape` tracks the current extents.
  std::vector<int> shape(dim, Ns);
  Field cur(f.begin(), f.end());
  FourierTransform line_fft(GridSpec{1, Ns, 1.0});
  for (int axis = 0; axis < dim; ++axis) {
    std::size_t outer = 1;
    std::size_t inner = 1;
    for (int a = 0; a < axis; ++a) outer *= shape[a];
    for (int a = axis + 1; a < dim; ++a) inner *= shape[a];
    std::vector<int> next_shape = shape;
    next_shape[axis] = Nt;
    Field next(outer * Nt * inner);
    Field line(Ns);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        for (int k = 0; k < Ns; ++k) line[k] = cur[(o * Ns + k) * inner + in];
        line_fft.forward(line);
        for (int m = 0; m < Nt; ++m) {
          const cplx* row = &E[static_cast<std::size_t>(m) * Ns];
          cplx acc = 0.0;
          for (int k = 0; k < Ns; ++k) acc += row[k] * line[k];
          next[(o * Nt + m) * inner + in] = acc;
        }
      }
    }
    cur = std::move(next);
    shape = next_shape;
  }
  return cur;
}

}  // namespace nlslab
