#include <cmath>

#include "nlslab/error.hpp"
#include "nlslab/evolution.hpp"

namespace nlslab {

namespace {

void require_l2_critical_resonant(const SystemSpec& spec) {
  if (spec.dim * (spec.p - 1) != 4) {
    throw SpecError("pseudo-conformal transform needs p = 1 + 4/n (L2-critical)");
  }
  if (!check_mass_resonance(spec)) throw SpecError("pseudo-conformal transform needs a mass-resonant system");
}

void require_matching_ground_state(const GroundStateResult& gs, const SystemSpec& spec) {
  require_l2_critical_resonant(spec);
  if (gs.psi.count() != spec.components || gs.psi.grid.dim != spec.dim) {
    throw SpecError("ground state does not match the system");
  }
  for (int k = 0; k < spec.components; ++k) {
    const double want = spec.alpha[k] * spec.alpha[k] / spec.gamma[k];
    if (static_cast<int>(gs.params.b.size()) != spec.components || std::abs(gs.params.b[k] - want) > 1e-10 * want) {
      throw SpecError("pseudo-conformal transform needs the ground state with b_k = alpha_k^2 / gamma_k");
    }
  }
}

}  // namespace

EllipticParams pseudo_conformal_params(const SystemSpec& spec) {
  require_l2_critical_resonant(spec);
  if (!spec.sigma) throw SpecError("system has no gauge weights sigma");
  const SystemSpec base = without_beta(spec);
  const double omega = 2.0 * spec.alpha[0] / ((*spec.sigma)[0] * spec.gamma[0]);
  EllipticParams params = make_elliptic_params(base, omega);
  for (int k = 0; k < spec.components; ++k) {
    const double want = spec.alpha[k] * spec.alpha[k] / spec.gamma[k];
    if (std::abs(params.b[k] - want) > 1e-12 * want) {
      throw SpecError("no common frequency gives b_k = alpha_k^2 / gamma_k for every component");
    }
  }
  return params;
}

FieldState exact_pseudo_conformal(const GroundStateResult& gs, double T, double t, const SystemSpec& spec) {
  require_matching_ground_state(gs, spec);
  if (!(T > 0.0)) throw SpecError("blow-up time T must be positive");
  if (!(t >= 0.0) || !(t < T)) throw SpecError("time must lie in [0, T)");
  const GridSpec& grid = gs.psi.grid;
  const double tau = T - t;
  const double amplitude = std::pow(tau, 2.0 / (1.0 - spec.p));
  const Spectral& sp = spectral_for(grid);
  FieldState v(grid, spec.components, t);
  for (int k = 0; k < spec.components; ++k) {
    const Field dilated = tau == 1.0 ? gs.psi.components[k] : resample(gs.psi.components[k], grid, grid, tau);
    const double ratio = spec.alpha[k] / spec.gamma[k];
    const double constant_phase = ratio * t / (T * tau);
    for (std::size_t i = 0; i < dilated.size(); ++i) {
      const double phase = -ratio * sp.radius_squared()[i] / (4.0 * tau) + constant_phase;
      v.components[k][i] = amplitude * std::polar(1.0, phase) * dilated[i];
    }
  }
  return v;
}

FieldState pseudo_conformal_data(const GroundStateResult& gs, double T, const SystemSpec& spec) {
  return exact_pseudo_conformal(gs, T, 0.0, spec);
}

double pseudo_conformal_phase_energy(const GroundStateResult& gs, const SystemSpec& spec) {
  require_matching_ground_state(gs, spec);
  const Spectral& sp = spectral_for(gs.psi.grid);
  RealField moment(gs.psi.grid.size());
  double total = 0.0;
  for (int k = 0; k < spec.components; ++k) {
    for (std::size_t i = 0; i < moment.size(); ++i) {
      moment[i] = sp.radius_squared()[i] * std::norm(gs.psi.components[k][i]);
    }
    total += spec.alpha[k] * spec.alpha[k] / (4.0 * spec.gamma[k]) * sp.integrate(moment);
  }
  return total;
}

}  // namespace nlslab
