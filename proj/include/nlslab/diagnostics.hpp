#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nlslab/groundstate.hpp"
#include "nlslab/radial.hpp"

namespace nlslab {

enum class Regime { L2Subcritical, L2Critical, Intercritical, H1CriticalOrBeyond };

std::string to_string(Regime regime);

struct CriticalIndex {
  double s_c = 0.0;
  Regime regime = Regime::L2Subcritical;
};

CriticalIndex critical_index(int n, double p);

struct Variance {
  double V = 0.0;     // sum (alpha_k^2 / gamma_k) integral |x|^2 |u_k|^2
  double Vdot = 0.0;  // 4 sum alpha_k Im integral (x . grad u_k) conj(u_k)
};

Variance variance(const FieldState& u, const SystemSpec& spec);

// Fraction of the L2 mass located where some |x_i| >= 0.9 L.
double boundary_mass_fraction(const FieldState& u);

struct VirialValue {
  double value = 0.0;
  bool applicable = false;  // the identity requires mass resonance
  std::string reason;
};

// 2n(p-1)E - 2n(p-1)L + 2(4 - np + n)K, evaluated for any system and flagged
// as not applicable without mass resonance.
VirialValue virial_rhs(const FieldState& u, const SystemSpec& spec, bool mass_resonant);
VirialValue virial_rhs(const FunctionalValues& fv, const SystemSpec& spec, bool mass_resonant);

// Radial cutoff chi: r^2 on [0, 1], the constant 7/2 on [3, inf), joined by a
// degree-9 polynomial matching four derivatives at both ends so that
// Bilaplacian(chi) stays bounded. chi'' <= 2 everywhere.
struct RadialCutoff {
  static double value(double r);
  // k-th derivative, k = 0..4.
  static double derivative(double r, int k);
  // chi_R = R^2 chi(|x| / R) and its radial Laplacian and bilaplacian in R^n.
  static double scaled(double r, double R);
  static double scaled_second(double r, double R);
  static double scaled_laplacian(double r, double R, int n);
  static double scaled_bilaplacian(double r, double R, int n);
};

struct LocalizedVirial {
  double V_R = 0.0;      // 1/2 integral chi_R sum (alpha^2/gamma) |u|^2
  double Vddot_R = 0.0;  // second derivative from the localized identity
  double symmetry_defect = 0.0;
  bool applicable = false;
  std::string reason;
};

// Throws for data that is not radially symmetric.
LocalizedVirial localized_virial(const FieldState& u, const SystemSpec& spec, double R, bool mass_resonant);

// Largest deviation of u from a radial profile, relative to sup |u|.
double radial_symmetry_defect(const FieldState& u);

struct DiagnosticsRecord {
  double t = 0.0;
  double Q = 0.0;
  double E = 0.0;
  double K = 0.0;
  double L = 0.0;
  double P = 0.0;
  double V = 0.0;
  double Vdot = 0.0;
  double Vddot_formula = 0.0;
  std::optional<double> Vddot_fd;
  double sup_norm = 0.0;
  double boundary_mass = 0.0;
};

DiagnosticsRecord make_record(const FieldState& u, const SystemSpec& spec, bool mass_resonant);
// Central differences of V over (possibly non-uniform) record times, for the
// interior records.
void fill_second_derivative(std::vector<DiagnosticsRecord>& series);

// Quantities of the initial data that enter the threshold conditions.
struct InitialQuantities {
  double Q = 0.0;
  double E = 0.0;
  double K = 0.0;
};

InitialQuantities initial_quantities(const FieldState& u0, const SystemSpec& spec);
InitialQuantities initial_quantities(const RadialField& u0, const SystemSpec& spec);
// a * psi(x / lambda) from the ground-state functionals: Q ~ a^2 lambda^n,
// K ~ a^2 lambda^(n-2), P ~ a^(p+1) lambda^n. Valid when beta = 0.
InitialQuantities scaled_ground_state_quantities(const GroundStateSummary& gs, double amplitude, double lambda);

enum class Classification {
  GlobalByTheorem1i,
  GlobalByTheorem1ii,
  GlobalByTheorem2i,
  BlowUpCandidateByTheorem2ii,
  Indeterminate
};

std::string to_string(Classification c);

enum class VarianceAssumption { FiniteVariance, Radial };

struct Thresholds {
  double Q0 = 0.0;
  double Q_psi = 0.0;
  double E0 = 0.0;
  double K0 = 0.0;
  double energy_psi = 0.0;  // K(psi) - 2P(psi)
  double K_psi = 0.0;
  // Q0^(1-s) E0^s < Q_psi^(1-s) energy_psi^s; the left side is reported as a
  // signed power when E0 < 0.
  double sharp1_lhs = 0.0;
  double sharp1_rhs = 0.0;
  // Q0^(1-s) K0^s < Q_psi^(1-s) K_psi^s (global) or > (blow-up).
  double sharp2_lhs = 0.0;
  double sharp2_rhs = 0.0;
  bool sharp1 = false;
  bool sharp2 = false;
  bool gradient_blowup = false;
};

struct Verdict {
  Regime regime = Regime::L2Subcritical;
  double s_c = 0.0;
  Thresholds thresholds;
  std::optional<double> gamma_threshold;
  std::optional<double> gamma_threshold_closed_form;
  bool gamma_forms_agree = true;
  bool mass_resonant = false;
  VarianceAssumption assumption = VarianceAssumption::FiniteVariance;
  bool ground_state_ok = true;
  Classification classification = Classification::Indeterminate;
  std::string reason;
  std::vector<std::string> caveats;
};

Thresholds compute_thresholds(const InitialQuantities& u0, const GroundStateSummary& gs);

// Pure decision from the thresholds record and the flags.
Classification decide(Regime regime, const Thresholds& th, bool mass_resonant, VarianceAssumption assumption,
                      int n, int p, std::string* reason = nullptr);

Verdict classify(const InitialQuantities& u0, const SystemSpec& spec, const GroundStateSummary& gs,
                 bool mass_resonant, VarianceAssumption assumption = VarianceAssumption::FiniteVariance);
Verdict classify(const FieldState& u0, const SystemSpec& spec, const GroundStateResult& gs,
                 VarianceAssumption assumption = VarianceAssumption::FiniteVariance);

nlohmann::json to_json(const Verdict& v);

struct ThresholdRelations {
  double K_relation = 0.0;       // |K - n Q / (2(1-s))| / (n Q / (2(1-s)))
  double energy_relation = 0.0;  // |energy - s Q / (1-s)| / Q
  double max() const { return std::max(K_relation, energy_relation); }
};

ThresholdRelations threshold_relations(const GroundStateSummary& gs);

}  // namespace nlslab
