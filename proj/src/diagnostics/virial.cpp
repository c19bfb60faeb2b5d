#include <algorithm>
#include <array>
#include <cmath>

#include "nlslab/diagnostics.hpp"
#include "nlslab/error.hpp"

namespace nlslab {

namespace {

// Bridge polynomial on [1, 3] in powers of r.
constexpr std::array<double, 10> kBridge = {
    2597.0 / 256.0,  -31185.0 / 512.0, 10071.0 / 64.0, -28665.0 / 128.0, 25095.0 / 128.0,
    -27727.0 / 256.0, 2415.0 / 64.0,    -1029.0 / 128.0, 245.0 / 256.0,    -25.0 / 512.0};
constexpr double kPlateau = 3.5;

double bridge_derivative(double r, int k) {
  double sum = 0.0;
  for (int j = static_cast<int>(kBridge.size()) - 1; j >= k; --j) {
    double falling = 1.0;
    for (int m = 0; m < k; ++m) falling *= j - m;
    sum = sum * r + kBridge[j] * falling;
  }
  return sum;
}

double weight(const SystemSpec& spec, int k) { return spec.alpha[k] * spec.alpha[k] / spec.gamma[k]; }

}  // namespace

double RadialCutoff::value(double r) { return derivative(r, 0); }

double RadialCutoff::derivative(double r, int k) {
  if (k < 0 || k > 4) throw SpecError("cutoff derivative order must be in 0..4");
  r = std::abs(r);
  if (r <= 1.0) {
    switch (k) {
      case 0:
        return r * r;
      case 1:
        return 2.0 * r;
      case 2:
        return 2.0;
      default:
        return 0.0;
    }
  }
  if (r >= 3.0) return k == 0 ? kPlateau : 0.0;
  return bridge_derivative(r, k);
}

double RadialCutoff::scaled(double r, double R) { return R * R * value(r / R); }

double RadialCutoff::scaled_second(double r, double R) { return derivative(r / R, 2); }

double RadialCutoff::scaled_laplacian(double r, double R, int n) {
  const double rho = r / R;
  if (rho <= 1.0) return 2.0 * n;
  if (rho >= 3.0) return 0.0;
  const double g1 = R * derivative(rho, 1);
  const double g2 = derivative(rho, 2);
  return g2 + (n - 1) * g1 / r;
}

double RadialCutoff::scaled_bilaplacian(double r, double R, int n) {
  const double rho = r / R;
  if (rho <= 1.0 || rho >= 3.0) return 0.0;
  const double g1 = R * derivative(rho, 1);
  const double g2 = derivative(rho, 2);
  const double g3 = derivative(rho, 3) / R;
  const double g4 = derivative(rho, 4) / (R * R);
  const double m = n - 1;
  const double h1 = g3 + m * (g2 / r - g1 / (r * r));
  const double h2 = g4 + m * (g3 / r - 2.0 * g2 / (r * r) + 2.0 * g1 / (r * r * r));
  return h2 + m * h1 / r;
}

Variance variance(const FieldState& u, const SystemSpec& spec) {
  u.check_shape();
  if (u.count() != spec.components) throw SpecError("component count differs from the system");
  const Spectral& sp = spectral_for(u.grid);
  const std::size_t size = u.grid.size();
  const int n = u.grid.dim;
  Variance v;
  RealField moment(size);
  RealField flux(size);
  for (int k = 0; k < spec.components; ++k) {
    const Field& c = u.components[k];
    for (std::size_t i = 0; i < size; ++i) moment[i] = sp.radius_squared()[i] * std::norm(c[i]);
    v.V += weight(spec, k) * sp.integrate(moment);

    std::fill(flux.begin(), flux.end(), 0.0);
    for (int axis = 0; axis < n; ++axis) {
      const Field d = sp.derivative(c, axis);
      for (std::size_t i = 0; i < size; ++i) {
        const double x = point_of(u.grid, i)[axis];
        flux[i] += x * (d[i] * std::conj(c[i])).imag();
      }
    }
    v.Vdot += 4.0 * spec.alpha[k] * sp.integrate(flux);
  }
  return v;
}

double boundary_mass_fraction(const FieldState& u) {
  const double edge = 0.9 * u.grid.half_length;
  double total = 0.0;
  double outer = 0.0;
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    const auto x = point_of(u.grid, i);
    bool near = false;
    for (int a = 0; a < u.grid.dim; ++a) near = near || std::abs(x[a]) >= edge;
    for (const auto& c : u.components) {
      const double m = std::norm(c[i]);
      total += m;
      if (near) outer += m;
    }
  }
  return total > 0.0 ? outer / total : 0.0;
}

VirialValue virial_rhs(const FunctionalValues& fv, const SystemSpec& spec, bool mass_resonant) {
  const int n = spec.dim;
  const double p = spec.p;
  VirialValue out;
  out.value = 2.0 * n * (p - 1.0) * fv.E - 2.0 * n * (p - 1.0) * fv.L + 2.0 * (4.0 - n * p + n) * fv.K;
  out.applicable = mass_resonant;
  if (!mass_resonant) out.reason = "system is not mass-resonant; the identity has an extra correction term";
  return out;
}

VirialValue virial_rhs(const FieldState& u, const SystemSpec& spec, bool mass_resonant) {
  return virial_rhs(dynamic_functionals(u, spec), spec, mass_resonant);
}

double radial_symmetry_defect(const FieldState& u) {
  u.check_shape();
  const GridSpec& g = u.grid;
  const int N = g.points;
  const int n = g.dim;
  double sup = 0.0;
  for (const auto& c : u.components) {
    for (const auto& v : c) sup = std::max(sup, std::abs(v));
  }
  if (sup == 0.0) return 0.0;

  // Generators of the grid's symmetry group: reflection of axis 0 and, for
  // n > 1, cyclic and transposing permutations of the axes.
  std::vector<std::size_t> stride(n);
  std::size_t s = 1;
  for (int a = n - 1; a >= 0; --a) {
    stride[a] = s;
    s *= static_cast<std::size_t>(N);
  }
  auto decompose = [&](std::size_t idx, std::array<int, 3>& ix) {
    for (int a = 0; a < n; ++a) ix[a] = static_cast<int>((idx / stride[a]) % N);
  };
  auto compose = [&](const std::array<int, 3>& ix) {
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) idx += static_cast<std::size_t>(ix[a]) * stride[a];
    return idx;
  };

  double worst = 0.0;
  std::array<int, 3> ix{};
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    decompose(idx, ix);
    std::array<int, 3> reflected = ix;
    reflected[0] = (N - ix[0]) % N;
    std::vector<std::size_t> images{compose(reflected)};
    if (n > 1) {
      std::array<int, 3> swapped = ix;
      std::swap(swapped[0], swapped[1]);
      images.push_back(compose(swapped));
    }
    if (n > 2) {
      const std::array<int, 3> cycled{ix[1], ix[2], ix[0]};
      images.push_back(compose(cycled));
    }
    for (const auto& c : u.components) {
      for (std::size_t j : images) worst = std::max(worst, std::abs(c[idx] - c[j]));
    }
  }
  return worst / sup;
}

LocalizedVirial localized_virial(const FieldState& u, const SystemSpec& spec, double R, bool mass_resonant) {
  if (!(R > 0.0)) throw SpecError("cutoff radius must be positive");
  if (u.count() != spec.components) throw SpecError("component count differs from the system");
  LocalizedVirial out;
  out.symmetry_defect = radial_symmetry_defect(u);
  if (out.symmetry_defect > 1e-8) {
    throw SpecError("localized virial needs radially symmetric data (symmetry defect " +
                    std::to_string(out.symmetry_defect) + ")");
  }
  out.applicable = mass_resonant;
  if (!mass_resonant) out.reason = "system is not mass-resonant";

  const GridSpec& g = u.grid;
  const int n = g.dim;
  const Spectral& sp = spectral_for(g);
  const std::size_t size = g.size();
  RealField chi(size), chi2(size), lap(size), bilap(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double r = std::sqrt(sp.radius_squared()[i]);
    chi[i] = RadialCutoff::scaled(r, R);
    chi2[i] = RadialCutoff::scaled_second(r, R);
    lap[i] = RadialCutoff::scaled_laplacian(r, R, n);
    bilap[i] = RadialCutoff::scaled_bilaplacian(r, R, n);
  }

  RealField mass_term(size, 0.0), grad_term(size, 0.0), low_term(size, 0.0);
  for (int k = 0; k < spec.components; ++k) {
    const Field& c = u.components[k];
    for (std::size_t i = 0; i < size; ++i) {
      mass_term[i] += weight(spec, k) * std::norm(c[i]);
      low_term[i] += spec.gamma[k] * std::norm(c[i]);
    }
    for (int axis = 0; axis < n; ++axis) {
      const Field d = sp.derivative(c, axis);
      for (std::size_t i = 0; i < size; ++i) grad_term[i] += spec.gamma[k] * std::norm(d[i]);
    }
  }
  RealField re_F;
  potential_density(u, spec, re_F, nullptr);

  RealField integrand(size);
  for (std::size_t i = 0; i < size; ++i) integrand[i] = 0.5 * chi[i] * mass_term[i];
  out.V_R = sp.integrate(integrand);
  for (std::size_t i = 0; i < size; ++i) {
    integrand[i] = 2.0 * chi2[i] * grad_term[i] - 0.5 * bilap[i] * low_term[i] +
                   (1.0 - spec.p) * lap[i] * re_F[i];
  }
  out.Vddot_R = sp.integrate(integrand);
  return out;
}

DiagnosticsRecord make_record(const FieldState& u, const SystemSpec& spec, bool mass_resonant) {
  const FunctionalValues fv = dynamic_functionals(u, spec);
  const Variance var = variance(u, spec);
  DiagnosticsRecord rec;
  rec.t = u.t;
  rec.Q = fv.Q.value_or(0.0);
  rec.E = fv.E;
  rec.K = fv.K;
  rec.L = fv.L;
  rec.P = fv.P;
  rec.V = var.V;
  rec.Vdot = var.Vdot;
  rec.Vddot_formula = virial_rhs(fv, spec, mass_resonant).value;
  for (const auto& c : u.components) {
    for (const auto& v : c) rec.sup_norm = std::max(rec.sup_norm, std::abs(v));
  }
  rec.boundary_mass = boundary_mass_fraction(u);
  return rec;
}

void fill_second_derivative(std::vector<DiagnosticsRecord>& series) {
  for (auto& r : series) r.Vddot_fd.reset();
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    const double h1 = series[i].t - series[i - 1].t;
    const double h2 = series[i + 1].t - series[i].t;
    if (!(h1 > 0.0) || !(h2 > 0.0)) continue;
    const double right = (series[i + 1].V - series[i].V) / h2;
    const double left = (series[i].V - series[i - 1].V) / h1;
    series[i].Vddot_fd = 2.0 * (right - left) / (h1 + h2);
  }
}

}  // namespace nlslab
