#include <cmath>

#include "nlslab/diagnostics.hpp"
#include "nlslab/error.hpp"

namespace nlslab {

namespace {

double signed_power(double x, double s) {
  if (s == 0.0) return 1.0;
  return std::copysign(std::pow(std::abs(x), s), x);
}

bool any_beta(const SystemSpec& spec) {
  for (double b : spec.beta) {
    if (b != 0.0) return true;
  }
  return false;
}

}  // namespace

std::string to_string(Classification c) {
  switch (c) {
    case Classification::GlobalByTheorem1i:
      return "GlobalByTheorem1i";
    case Classification::GlobalByTheorem1ii:
      return "GlobalByTheorem1ii";
    case Classification::GlobalByTheorem2i:
      return "GlobalByTheorem2i";
    case Classification::BlowUpCandidateByTheorem2ii:
      return "BlowUpCandidateByTheorem2ii";
    case Classification::Indeterminate:
      return "Indeterminate";
  }
  return "unknown";
}

InitialQuantities initial_quantities(const FieldState& u0, const SystemSpec& spec) {
  const FunctionalValues fv = dynamic_functionals(u0, spec);
  if (!fv.Q) throw SpecError("mass needs sigma; the system has none");
  return {*fv.Q, fv.E, fv.K};
}

InitialQuantities initial_quantities(const RadialField& u0, const SystemSpec& spec) {
  const FunctionalValues fv = radial_dynamic_functionals(u0, spec);
  if (!fv.Q) throw SpecError("mass needs sigma; the system has none");
  return {*fv.Q, fv.E, fv.K};
}

InitialQuantities scaled_ground_state_quantities(const GroundStateSummary& gs, double amplitude, double lambda) {
  const double a2 = amplitude * amplitude;
  InitialQuantities q;
  q.Q = a2 * std::pow(lambda, gs.n) * gs.Q;
  q.K = a2 * std::pow(lambda, gs.n - 2) * gs.K;
  const double P = std::pow(amplitude, gs.p + 1) * std::pow(lambda, gs.n) * gs.P;
  q.E = q.K - 2.0 * P;
  return q;
}

Thresholds compute_thresholds(const InitialQuantities& u0, const GroundStateSummary& gs) {
  const double s = critical_index_value(gs.n, gs.p);
  Thresholds th;
  th.Q0 = u0.Q;
  th.E0 = u0.E;
  th.K0 = u0.K;
  th.Q_psi = gs.Q;
  th.K_psi = gs.K;
  th.energy_psi = gs.energy;
  th.sharp1_lhs = std::pow(u0.Q, 1.0 - s) * signed_power(u0.E, s);
  th.sharp1_rhs = std::pow(gs.Q, 1.0 - s) * signed_power(gs.energy, s);
  th.sharp2_lhs = std::pow(u0.Q, 1.0 - s) * std::pow(u0.K, s);
  th.sharp2_rhs = std::pow(gs.Q, 1.0 - s) * std::pow(gs.K, s);
  th.sharp1 = th.sharp1_lhs < th.sharp1_rhs;
  th.sharp2 = th.sharp2_lhs < th.sharp2_rhs;
  th.gradient_blowup = th.sharp2_lhs > th.sharp2_rhs;
  return th;
}

Classification decide(Regime regime, const Thresholds& th, bool mass_resonant, VarianceAssumption assumption,
                      int n, int p, std::string* reason) {
  auto say = [&](const std::string& text) {
    if (reason) *reason = text;
  };
  switch (regime) {
    case Regime::L2Subcritical:
      say("p < 1 + 4/n: every H1 solution is global");
      return Classification::GlobalByTheorem1i;
    case Regime::L2Critical:
      if (th.Q0 < th.Q_psi) {
        say("p = 1 + 4/n and Q(u0) < Q(psi)");
        return Classification::GlobalByTheorem1ii;
      }
      say("p = 1 + 4/n and Q(u0) >= Q(psi): no global-existence statement applies");
      return Classification::Indeterminate;
    case Regime::H1CriticalOrBeyond:
      say("p >= (n+2)/(n-2): outside the energy-subcritical range");
      return Classification::Indeterminate;
    case Regime::Intercritical:
      break;
  }
  if (!th.sharp1) {
    say("mass-energy condition fails: Q(u0)^(1-s) E(u0)^s >= Q(psi)^(1-s) E(psi)^s");
    return Classification::Indeterminate;
  }
  if (th.sharp2) {
    say("mass-energy below threshold and mass-gradient below threshold");
    return Classification::GlobalByTheorem2i;
  }
  if (!th.gradient_blowup) {
    say("mass-gradient product equals the threshold exactly");
    return Classification::Indeterminate;
  }
  if (!mass_resonant) {
    say("mass-gradient above threshold but the system is not mass-resonant");
    return Classification::Indeterminate;
  }
  if (assumption == VarianceAssumption::Radial) {
    const double upper = n > 2 ? std::min((n + 2.0) / (n - 2.0), 5.0) : 5.0;
    if (n < 2 || !(p < upper)) {
      say("radial blow-up needs n >= 2 and p < min{(n+2)/(n-2), 5}");
      return Classification::Indeterminate;
    }
    say("mass-energy below and mass-gradient above threshold, mass-resonant, radial data");
  } else {
    say("mass-energy below and mass-gradient above threshold, mass-resonant, finite variance");
  }
  return Classification::BlowUpCandidateByTheorem2ii;
}

ThresholdRelations threshold_relations(const GroundStateSummary& gs) {
  const double s = critical_index_value(gs.n, gs.p);
  ThresholdRelations rel;
  const double K_expected = gs.n * gs.Q / (2.0 * (1.0 - s));
  rel.K_relation = std::abs(gs.K - K_expected) / K_expected;
  rel.energy_relation = std::abs(gs.energy - s * gs.Q / (1.0 - s)) / gs.Q;
  return rel;
}

Verdict classify(const InitialQuantities& u0, const SystemSpec& spec, const GroundStateSummary& gs,
                 bool mass_resonant, VarianceAssumption assumption) {
  if (gs.n != spec.dim) throw SpecError("ground state dimension differs from the system dimension");
  if (gs.p != spec.p) throw SpecError("ground state exponent differs from the system exponent");
  if (!gs.converged) throw NumericalError("ground state did not converge");

  const CriticalIndex ci = critical_index(spec.dim, spec.p);
  Verdict v;
  v.regime = ci.regime;
  v.s_c = ci.s_c;
  v.mass_resonant = mass_resonant;
  v.assumption = assumption;
  v.thresholds = compute_thresholds(u0, gs);
  v.caveats.push_back("numerical evidence, not proof");
  if (assumption == VarianceAssumption::FiniteVariance) {
    v.caveats.push_back("finite variance holds trivially on a truncated grid; decay at infinity is not verified");
  }
  if (any_beta(spec)) {
    v.caveats.push_back("E(u0) includes the beta term L(u0); psi solves the beta = 0 problem");
  }

  if (ci.regime == Regime::H1CriticalOrBeyond) {
    v.classification = Classification::Indeterminate;
    v.reason = "p >= (n+2)/(n-2): outside the energy-subcritical range";
    return v;
  }

  const double s = ci.s_c;
  if (ci.regime == Regime::Intercritical) {
    const int n = spec.dim;
    const int p = spec.p;
    const double C = optimal_gn_constant(n, p, gs.Q);
    const double b = 2.0 * C * std::pow(u0.Q, (p - 1.0) * (1.0 - s) / 2.0);
    const double q = (p - 1.0) * s / 2.0 + 1.0;
    v.gamma_threshold = std::pow(b * q, -1.0 / (q - 1.0));
    v.gamma_threshold_closed_form =
        n / (2.0 * (1.0 - s)) * std::pow(gs.Q, 1.0 / s) / std::pow(u0.Q, (1.0 - s) / s);
    v.gamma_forms_agree = std::abs(*v.gamma_threshold - *v.gamma_threshold_closed_form) <=
                          1e-8 * std::abs(*v.gamma_threshold_closed_form);
  }

  if (ci.regime != Regime::L2Subcritical) {
    const ThresholdRelations rel = threshold_relations(gs);
    if (!(rel.max() <= 1e-3)) {
      v.ground_state_ok = false;
      v.classification = Classification::Indeterminate;
      v.reason = "ground state fails the threshold relations (residual " + std::to_string(rel.max()) + ")";
      return v;
    }
  }

  v.classification = decide(ci.regime, v.thresholds, mass_resonant, assumption, spec.dim, spec.p, &v.reason);
  return v;
}

Verdict classify(const FieldState& u0, const SystemSpec& spec, const GroundStateResult& gs,
                 VarianceAssumption assumption) {
  if (!gs.converged) throw NumericalError("ground state did not converge: " + gs.message);
  return classify(initial_quantities(u0, spec), spec, summarize(gs), check_mass_resonance(spec), assumption);
}

nlohmann::json to_json(const Verdict& v) {
  const Thresholds& th = v.thresholds;
  nlohmann::json j;
  j["regime"] = to_string(v.regime);
  j["s_c"] = v.s_c;
  j["classification"] = to_string(v.classification);
  j["reason"] = v.reason;
  j["mass_resonant"] = v.mass_resonant;
  j["assumption"] = v.assumption == VarianceAssumption::Radial ? "radial" : "finite-variance";
  j["ground_state_ok"] = v.ground_state_ok;
  j["thresholds"] = {
      {"Q_u0", th.Q0},
      {"Q_psi", th.Q_psi},
      {"E_u0", th.E0},
      {"K_u0", th.K0},
      {"energy_psi", th.energy_psi},
      {"K_psi", th.K_psi},
      {"mass_energy", {{"lhs", th.sharp1_lhs}, {"rhs", th.sharp1_rhs}, {"holds", th.sharp1}}},
      {"mass_gradient_global", {{"lhs", th.sharp2_lhs}, {"rhs", th.sharp2_rhs}, {"holds", th.sharp2}}},
      {"mass_gradient_blowup", {{"lhs", th.sharp2_lhs}, {"rhs", th.sharp2_rhs}, {"holds", th.gradient_blowup}}},
      {"mass_energy_slack", th.sharp1_rhs - th.sharp1_lhs},
      {"mass_gradient_slack", th.sharp2_rhs - th.sharp2_lhs},
  };
  if (v.gamma_threshold) {
    j["gamma_threshold"] = *v.gamma_threshold;
    j["gamma_threshold_closed_form"] = *v.gamma_threshold_closed_form;
    j["gamma_forms_agree"] = v.gamma_forms_agree;
  } else {
    j["gamma_threshold"] = nullptr;
  }
  j["caveats"] = v.caveats;
  return j;
}

}  // namespace nlslab
