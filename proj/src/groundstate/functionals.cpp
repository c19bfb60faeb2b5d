#include <algorithm>
#include <cmath>

#include "nlslab/error.hpp"
#include "nlslab/groundstate.hpp"

namespace nlslab {

namespace {

Polynomial absolute_coefficients(const Polynomial& p) {
  std::vector<Monomial> terms = p.terms();
  for (auto& m : terms) m.coeff = std::abs(m.coeff);
  return Polynomial(p.variables(), std::move(terms));
}

void check_state(const FieldState& u, const SystemSpec& spec) {
  u.check_shape();
  if (u.count() != spec.components) throw SpecError("shape mismatch: component count differs from the system");
  if (u.grid.dim != spec.dim) throw SpecError("grid dimension differs from the system dimension");
}

}  // namespace

SystemSpec without_beta(SystemSpec spec) {
  std::fill(spec.beta.begin(), spec.beta.end(), 0.0);
  return spec;
}

EllipticParams make_elliptic_params(const SystemSpec& spec, double omega) {
  if (!spec.sigma) throw SpecError("elliptic problem needs the mass weights sigma");
  if (!(omega > 0.0)) throw SpecError("omega must be positive");
  EllipticParams params;
  params.spec = spec;
  params.omega = omega;
  for (int k = 0; k < spec.components; ++k) {
    const double b = (*spec.sigma)[k] * spec.alpha[k] * omega / 2.0 + spec.beta[k];
    if (!(b > 0.0)) throw SpecError("elliptic coefficient b_k must be positive");
    params.b.push_back(b);
  }
  return params;
}

EllipticParams unit_elliptic_params(const SystemSpec& spec) {
  return make_elliptic_params(without_beta(spec), 1.0);
}

void potential_density(const FieldState& u, const SystemSpec& spec, RealField& re_F, RealField* abs_F) {
  check_state(u, spec);
  const int l = spec.components;
  const std::size_t n = u.grid.size();
  CompiledPolynomials F({spec.potential.F});
  CompiledPolynomials Fabs({absolute_coefficients(spec.potential.F)});
  std::vector<cplx> scratch(std::max(F.scratch_size(), Fabs.scratch_size()));
  std::vector<cplx> z(l);
  std::vector<cplx> m(l);
  re_F.assign(n, 0.0);
  if (abs_F) abs_F->assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < l; ++k) z[k] = u.components[k][i];
    cplx v;
    F.evaluate(z.data(), &v, scratch.data());
    re_F[i] = v.real();
    if (abs_F) {
      for (int k = 0; k < l; ++k) m[k] = std::abs(z[k]);
      Fabs.evaluate(m.data(), &v, scratch.data());
      (*abs_F)[i] = v.real();
    }
  }
}

std::vector<Field> nonlinearity_fields(const FieldState& u, const SystemSpec& spec) {
  check_state(u, spec);
  const int l = spec.components;
  const std::size_t n = u.grid.size();
  CompiledPolynomials f(spec.f.f);
  std::vector<cplx> scratch(f.scratch_size());
  std::vector<cplx> z(l);
  std::vector<cplx> out(l);
  std::vector<Field> result(l, Field(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < l; ++k) z[k] = u.components[k][i];
    f.evaluate(z.data(), out.data(), scratch.data());
    for (int k = 0; k < l; ++k) result[k][i] = out[k];
  }
  return result;
}

FunctionalValues dynamic_functionals(const FieldState& u, const SystemSpec& spec) {
  check_state(u, spec);
  const Spectral& sp = spectral_for(u.grid);
  FunctionalValues fv;
  std::vector<double> mass(spec.components);
  for (int k = 0; k < spec.components; ++k) {
    fv.K += spec.gamma[k] * sp.gradient_norm_sq(u.components[k]);
    mass[k] = sp.l2_norm_sq(u.components[k]);
    fv.L += spec.beta[k] * mass[k];
  }
  RealField re_F;
  RealField abs_F;
  potential_density(u, spec, re_F, &abs_F);
  fv.P = sp.integrate(re_F);
  fv.P_abs = sp.integrate(abs_F);
  if (spec.sigma) {
    double Q = 0.0;
    for (int k = 0; k < spec.components; ++k) Q += (*spec.sigma)[k] * spec.alpha[k] / 2.0 * mass[k];
    fv.Q = Q;
  }
  fv.E = fv.K + fv.L - 2.0 * fv.P;
  return fv;
}

FunctionalValues functionals(const FieldState& u, const EllipticParams& params) {
  FunctionalValues fv = dynamic_functionals(u, params.spec);
  const Spectral& sp = spectral_for(u.grid);
  for (int k = 0; k < params.spec.components; ++k) fv.Qcal += params.b[k] * sp.l2_norm_sq(u.components[k]);
  fv.I = 0.5 * (fv.K + fv.Qcal) - fv.P;
  if (std::abs(fv.P) > 1e-14 * fv.P_abs) fv.J = weinstein_value(fv.K, fv.Qcal, fv.P, u.grid.dim, params.spec.p);
  return fv;
}

double critical_index_value(int n, double p) { return n / 2.0 - 2.0 / (p - 1.0); }

GnExponents gn_exponents(int n, int p) {
  const double s = critical_index_value(n, p);
  return {(p - 1.0) * (1.0 - s) / 2.0, (p - 1.0) * s / 2.0 + 1.0};
}

double weinstein_value(double K, double Qcal, double P, int n, int p) {
  const GnExponents e = gn_exponents(n, p);
  return std::pow(Qcal, e.a) * std::pow(K, e.b) / P;
}

double optimal_gn_constant(int n, int p, double Qcal_psi) {
  const double s = critical_index_value(n, p);
  const double q = (p - 1.0) * s / 2.0 + 1.0;
  const double xi = (p - 1.0) * std::pow(n, q) / 2.0 * std::pow(2.0 * (1.0 - s), -(p - 1.0) * s / 2.0) *
                    std::pow(Qcal_psi, (p - 1.0) / 2.0);
  return 1.0 / xi;
}

double optimal_gn_constant(const GroundStateResult& gs) {
  return optimal_gn_constant(gs.psi.grid.dim, gs.params.spec.p, gs.functionals.Qcal);
}

double PohozaevErrors::max() const { return std::max({P_rel, K_rel, Q_rel, J_rel}); }

PohozaevErrors verify_pohozaev(const FunctionalValues& fv, int n, int p) {
  PohozaevErrors e;
  const double s = critical_index_value(n, p);
  const double I = fv.I;
  e.applicable = s < 1.0 && I != 0.0 && fv.P != 0.0;
  if (!e.applicable) return e;
  auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
  e.P_rel = rel(fv.P, 2.0 * I / (p - 1.0));
  e.K_rel = rel(fv.K, n * I);
  e.Q_rel = rel(fv.Qcal, 2.0 * (1.0 - s) * I);
  const GnExponents g = gn_exponents(n, p);
  const double J_formula =
      (p - 1.0) * std::pow(n, g.b) / 2.0 * std::pow(2.0 * (1.0 - s), g.a) * std::pow(I, (p - 1.0) / 2.0);
  e.J_rel = fv.J ? rel(*fv.J, J_formula) : 1.0;
  return e;
}

PohozaevErrors verify_pohozaev(const GroundStateResult& gs) {
  return verify_pohozaev(gs.functionals, gs.psi.grid.dim, gs.params.spec.p);
}

GroundStateSummary summarize(const GroundStateResult& gs) {
  const auto& spec = gs.params.spec;
  if (!spec.sigma) throw SpecError("ground state summary needs sigma");
  for (int k = 0; k < spec.components; ++k) {
    const double unit_b = (*spec.sigma)[k] * spec.alpha[k] / 2.0;
    if (std::abs(gs.params.b[k] - unit_b) > 1e-12 * unit_b) {
      throw SpecError("threshold quantities need the ground state with beta = 0 and omega = 1");
    }
  }
  GroundStateSummary s;
  s.n = gs.psi.grid.dim;
  s.p = spec.p;
  s.Q = gs.functionals.Qcal;
  s.K = gs.functionals.K;
  s.P = gs.functionals.P;
  s.energy = gs.functionals.K - 2.0 * gs.functionals.P;
  s.residual = gs.residual;
  s.converged = gs.converged;
  return s;
}

}  // namespace nlslab
