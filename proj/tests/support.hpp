#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "nlslab/spectral.hpp"

namespace testing {

using nlslab::cplx;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(g);
}

inline cplx random_complex(std::mt19937_64& g, double scale = 1.0) {
  return {uniform(g, -scale, scale), uniform(g, -scale, scale)};
}

inline std::vector<cplx> random_point(std::mt19937_64& g, int l, double scale = 1.0) {
  std::vector<cplx> z(l);
  for (auto& v : z) v = random_complex(g, scale);
  return z;
}

// Sum of a few Gaussian bumps with random centres, widths and complex
// amplitudes, kept well inside the box so that the field is smooth and decays.
inline nlslab::Field random_bumps(std::mt19937_64& g, const nlslab::GridSpec& grid, int bumps = 3) {
  struct Bump {
    std::array<double, 3> c;
    double w;
    cplx a;
    std::array<double, 3> k;
  };
  std::vector<Bump> list;
  const double reach = 0.25 * grid.half_length;
  for (int b = 0; b < bumps; ++b) {
    Bump bump{};
    for (int d = 0; d < grid.dim; ++d) {
      bump.c[d] = uniform(g, -reach, reach);
      bump.k[d] = uniform(g, -1.0, 1.0);
    }
    bump.w = uniform(g, 0.7, 1.6);
    bump.a = random_complex(g, 1.0);
    list.push_back(bump);
  }
  return nlslab::sample_field(grid, [&](const std::array<double, 3>& x) {
    cplx v = 0.0;
    for (const auto& b : list) {
      double r2 = 0.0;
      double phase = 0.0;
      for (int d = 0; d < grid.dim; ++d) {
        r2 += (x[d] - b.c[d]) * (x[d] - b.c[d]);
        phase += b.k[d] * x[d];
      }
      v += b.a * std::exp(-r2 / (b.w * b.w)) * std::polar(1.0, phase);
    }
    return v;
  });
}

inline double sup_abs(const nlslab::Field& f) {
  double m = 0.0;
  for (const auto& v : f) m = std::max(m, std::abs(v));
  return m;
}

inline double sup_diff(const nlslab::Field& a, const nlslab::Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Composite Simpson rule on [a, b] with an even number of intervals; used as
// an oracle independent of the spectral quadrature.
template <class F>
double simpson(F&& f, double a, double b, int intervals = 200000) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace testing
