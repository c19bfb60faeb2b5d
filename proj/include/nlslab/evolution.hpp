#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlslab/diagnostics.hpp"
#include "nlslab/groundstate.hpp"

namespace nlslab {

struct EvolveConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double dt_min = 1e-8;
  double blowup_factor = 1e6;
  int snapshot_stride = 10;
  bool adaptive = false;
  // Largest tolerated share of spectral energy in the outer third of the
  // modes along any axis. Exceeding it means the grid no longer resolves the
  // solution and is reported as blow-up. Zero disables the check.
  double resolution_tol = 1e-6;

  void validate() const;
};

enum class EvolveStatus { ReachedTEnd, BlowUpDetected, Invalid };

std::string to_string(EvolveStatus status);

struct EvolveOutcome {
  FieldState final;
  EvolveStatus status = EvolveStatus::ReachedTEnd;
  double event_time = 0.0;  // t_end, the detection time, or the last finite time
  std::string reason;
  std::vector<DiagnosticsRecord> series;
  std::vector<std::string> warnings;
  long steps = 0;
};

// Strang splitting: half a linear step exp(-i tau (gamma |xi|^2 + beta) / alpha)
// in Fourier space, a full RK4 step of i alpha u' = -f(u) at every grid point,
// and another half linear step.
class SplitStepIntegrator {
 public:
  SplitStepIntegrator(const SystemSpec& spec, const GridSpec& grid);

  // Per-step observation taken from the Fourier coefficients at the step end:
  // K and the spectral tail fraction. Returning false stops the run.
  struct Observation {
    double K = 0.0;
    double tail = 0.0;
    bool finite = true;
  };
  using Monitor = std::function<bool(double t, const Observation&)>;

  // Advances `steps` Strang steps of size dt, fusing adjacent half steps.
  // Returns the number of steps taken (fewer when the monitor stops early).
  long advance(FieldState& u, double dt, long steps, const Monitor& monitor = {}) const;
  void step(FieldState& u, double dt) const { advance(u, dt, 1); }

  // The same observation for a state in physical space.
  Observation measure(const FieldState& u) const;

  void linear(FieldState& u, double tau) const;
  void nonlinear(FieldState& u, double tau) const;

  const SystemSpec& spec() const { return spec_; }

 private:
  void apply_multiplier(std::vector<Field>& hat, double tau) const;
  Observation observe(const std::vector<Field>& hat) const;

  SystemSpec spec_;
  GridSpec grid_;
  CompiledPolynomials f_;
  std::vector<unsigned char> tail_mask_;
  // Multipliers for the most recent substep length; an integrator instance is
  // meant for one thread.
  mutable double cached_tau_ = 0.0;
  mutable std::vector<Field> multiplier_;
};

FieldState step(const FieldState& u, double dt, const SystemSpec& spec);

using SnapshotCallback = std::function<void(const FieldState&, const DiagnosticsRecord&)>;

EvolveOutcome evolve(const FieldState& u0, const SystemSpec& spec, const EvolveConfig& cfg,
                     const SnapshotCallback& on_snapshot = {});

// Ground-state problem whose solution feeds the pseudo-conformal transform:
// beta = 0 and b_k = alpha_k^2 / gamma_k. Throws unless p = 1 + 4/n and the
// system is mass-resonant.
EllipticParams pseudo_conformal_params(const SystemSpec& spec);

// T^(2/(1-p)) exp(-i (alpha_k/gamma_k) |x|^2 / (4T)) psi_k(x / T).
FieldState pseudo_conformal_data(const GroundStateResult& gs, double T, const SystemSpec& spec);
// The explicit blow-up solution at time t in [0, T), on the ground state's grid.
FieldState exact_pseudo_conformal(const GroundStateResult& gs, double T, double t, const SystemSpec& spec);
// sum (alpha_k^2 / (4 gamma_k)) integral |y|^2 psi_k^2: the chirp's share of
// K(v(t)), which equals K(psi) / (T - t)^2 plus this constant.
double pseudo_conformal_phase_energy(const GroundStateResult& gs, const SystemSpec& spec);

}  // namespace nlslab
