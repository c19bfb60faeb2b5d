#include <cmath>

#include "nlslab/error.hpp"
#include "nlslab/groundstate.hpp"

#include "driver.hpp"

namespace nlslab {

double elliptic_residual(const FieldState& psi, const EllipticParams& params) {
  const auto& spec = params.spec;
  const Spectral& sp = spectral_for(psi.grid);
  const auto f = nonlinearity_fields(psi, spec);
  double worst = 0.0;
  for (int k = 0; k < spec.components; ++k) {
    const Field lap = sp.laplacian(psi.components[k]);
    for (std::size_t i = 0; i < lap.size(); ++i) {
      const cplx r = -spec.gamma[k] * lap[i] + params.b[k] * psi.components[k][i] - f[k][i];
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

GroundStateResult solve_ground_state(const EllipticParams& params, const GridSpec& grid,
                                     const std::optional<FieldState>& init, const SolverOptions& options) {
  grid.validate();
  const auto& spec = params.spec;
  if (grid.dim != spec.dim) throw SpecError("grid dimension differs from the system dimension");
  const int l = spec.components;
  const int p = spec.p;
  const Spectral& sp = spectral_for(grid);
  const std::size_t n = grid.size();

  FieldState psi(grid, l);
  if (init) {
    if (!(init->grid == grid) || init->count() != l) throw SpecError("initial guess does not match the grid");
    psi.components = init->components;
  } else {
    const Field g = sample_field(grid, [](const std::array<double, 3>& x) {
      return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])), 0.0);
    });
    for (auto& c : psi.components) c = g;
  }
  for (auto& c : psi.components) {
    for (auto& v : c) v = v.real();
  }

  {
    RealField re_F;
    potential_density(psi, spec, re_F, nullptr);
    if (!(sp.integrate(re_F) > 0.0)) {
      throw SpecError("initial guess has P <= 0; choose a positive initial profile");
    }
  }

  // Symbols of -gamma_k Lap + b_k.
  std::vector<RealField> symbol(l, RealField(n));
  for (int k = 0; k < l; ++k) {
    for (std::size_t i = 0; i < n; ++i) symbol[k][i] = spec.gamma[k] * sp.k_squared()[i] + params.b[k];
  }

  const FieldState initial = psi;
  GroundStateResult result;
  result.params = params;
  const double exponent = static_cast<double>(p) / (p - 1.0);
  std::vector<Field> psi_hat(l);
  std::vector<Field> f_hat(l);

  auto step = [&](double theta) {
    const auto f = nonlinearity_fields(psi, spec);
    double num = 0.0;
    double den = 0.0;
    for (int k = 0; k < l; ++k) {
      psi_hat[k] = psi.components[k];
      sp.fft().forward(psi_hat[k]);
      f_hat[k] = f[k];
      sp.fft().forward(f_hat[k]);
      for (std::size_t i = 0; i < n; ++i) {
        num += symbol[k][i] * std::norm(psi_hat[k][i]);
        den += (f_hat[k][i] * std::conj(psi_hat[k][i])).real();
      }
    }
    const double M = num / den;
    if (!std::isfinite(M) || M < 1e-8 || M > 1e8) return detail::IterationStep{M, 0.0};
    const double factor = std::pow(M, exponent);
    double change = 0.0;
    for (int k = 0; k < l; ++k) {
      for (std::size_t i = 0; i < n; ++i) f_hat[k][i] *= factor / symbol[k][i];
      sp.fft().inverse(f_hat[k]);
      for (std::size_t i = 0; i < n; ++i) {
        const double old = psi.components[k][i].real();
        const double v = (1.0 - theta) * old + theta * f_hat[k][i].real();
        change = std::max(change, std::abs(v - old));
        psi.components[k][i] = v;
      }
    }
    return detail::IterationStep{M, change};
  };
  auto reset = [&] { psi = initial; };
  auto accept = [&] { return elliptic_residual(psi, params) < 10.0 * options.tol; };

  const auto outcome = detail::run_stabilized_iteration(step, reset, accept, options);
  result.converged = outcome.converged;
  result.iterations = outcome.iterations;
  result.stabilizer = outcome.stabilizer;
  result.damping = outcome.damping;
  result.message = outcome.message;
  result.psi = psi;
  if (!psi.all_finite()) {
    result.converged = false;
    result.message = "diverged: non-finite iterate";
    return result;
  }
  result.residual = elliptic_residual(psi, params);
  result.functionals = functionals(psi, params);
  return result;
}

}  // namespace nlslab
