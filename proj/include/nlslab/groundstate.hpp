#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlslab/nonlinearity.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

// Coefficients of -gamma_k Laplacian psi_k + b_k psi_k = f_k(psi), with
// b_k = sigma_k alpha_k omega / 2 + beta_k.
struct EllipticParams {
  SystemSpec spec;
  double omega = 1.0;
  std::vector<double> b;
};

// Uses the spec's beta. Throws when sigma is absent or some b_k <= 0.
EllipticParams make_elliptic_params(const SystemSpec& spec, double omega);
// The beta = 0, omega = 1 problem whose ground states set the thresholds.
EllipticParams unit_elliptic_params(const SystemSpec& spec);
SystemSpec without_beta(SystemSpec spec);

struct FunctionalValues {
  double K = 0.0;         // sum gamma_k ||grad u_k||^2
  double L = 0.0;         // sum beta_k ||u_k||^2
  double Qcal = 0.0;      // sum b_k ||u_k||^2
  double P = 0.0;         // Re integral of F(u)
  double P_abs = 0.0;     // integral of sum |c| prod |u_j|^(a_j + b_j)
  double I = 0.0;         // (K + Qcal) / 2 - P
  std::optional<double> J;  // Weinstein functional, absent when P vanishes
  std::optional<double> Q;  // conserved mass sum sigma_k alpha_k / 2 ||u_k||^2
  double E = 0.0;         // K + L - 2P
};

FunctionalValues functionals(const FieldState& u, const EllipticParams& params);
// Everything except Qcal, I and J, which need elliptic parameters.
FunctionalValues dynamic_functionals(const FieldState& u, const SystemSpec& spec);

// Pointwise Re F(u(x)) and the matching absolute-value bound.
void potential_density(const FieldState& u, const SystemSpec& spec, RealField& re_F, RealField* abs_F);
// f(u) for all components at every grid point.
std::vector<Field> nonlinearity_fields(const FieldState& u, const SystemSpec& spec);

// Exponents of the Gagliardo-Nirenberg inequality P <= C Qcal^a K^b.
struct GnExponents {
  double a;
  double b;
};
double critical_index_value(int n, double p);
GnExponents gn_exponents(int n, int p);
double weinstein_value(double K, double Qcal, double P, int n, int p);
// Closed form of the optimal constant in terms of the ground state's Qcal.
double optimal_gn_constant(int n, int p, double Qcal_psi);

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 3000;
  // Under-relaxation of each update. Zero selects an automatic schedule that
  // starts undamped and restarts with damping 0.7 and 0.4 when stalled.
  double damping = 0.0;
};

struct GroundStateResult {
  FieldState psi;
  EllipticParams params;
  FunctionalValues functionals;
  double residual = 0.0;       // sup norm of the elliptic residual
  double stabilizer = 1.0;     // final Petviashvili factor M
  int iterations = 0;
  double damping = 1.0;
  bool converged = false;
  std::string message;
};

// Petviashvili iteration on the grid. The initial guess defaults to a
// Gaussian in every component; it is projected to real values.
GroundStateResult solve_ground_state(const EllipticParams& params, const GridSpec& grid,
                                     const std::optional<FieldState>& init = std::nullopt,
                                     const SolverOptions& options = {});

// sup_k sup_x |-gamma_k Lap psi_k + b_k psi_k - f_k(psi)|
double elliptic_residual(const FieldState& psi, const EllipticParams& params);

struct PohozaevErrors {
  bool applicable = false;  // requires s_c < 1 and a nonzero field
  double P_rel = 0.0;
  double K_rel = 0.0;
  double Q_rel = 0.0;
  double J_rel = 0.0;
  double max() const;
};

// Relative deviations from P = 2I/(p-1), K = nI, Qcal = 2(1 - s_c)I and the
// closed form of J in terms of I.
PohozaevErrors verify_pohozaev(const FunctionalValues& fv, int n, int p);
PohozaevErrors verify_pohozaev(const GroundStateResult& gs);
double optimal_gn_constant(const GroundStateResult& gs);

// Quantities of a converged ground state of the beta = 0, omega = 1 problem,
// independent of how it was computed.
struct GroundStateSummary {
  int n = 0;
  int p = 0;
  double Q = 0.0;       // mass, equal to Qcal here
  double K = 0.0;
  double P = 0.0;
  double energy = 0.0;  // K - 2P
  double residual = 0.0;
  bool converged = false;
};

GroundStateSummary summarize(const GroundStateResult& gs);

}  // namespace nlslab
