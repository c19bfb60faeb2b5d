#include "nlslab/radial.hpp"

#include <algorithm>
#include <cmath>

#include "nlslab/error.hpp"
#include "driver.hpp"

namespace nlslab {

namespace {

void check_field(const RadialField& u, const SystemSpec& spec) {
  u.grid.validate();
  if (u.grid.dim != spec.dim) throw SpecError("radial grid dimension differs from the system dimension");
  if (static_cast<int>(u.components.size()) != spec.components) {
    throw SpecError("shape mismatch: component count differs from the system");
  }
  for (const auto& c : u.components) {
    if (static_cast<int>(c.size()) != u.grid.points) throw SpecError("shape mismatch: radial profile length");
  }
}

// Cell values of f(u) and Re F(u), |F|(|u|).
void evaluate_nonlinear(const RadialField& u, const SystemSpec& spec, std::vector<std::vector<double>>* f,
                        std::vector<double>* re_F, std::vector<double>* abs_F) {
  const int l = spec.components;
  const int M = u.grid.points;
  CompiledPolynomials fc(spec.f.f);
  CompiledPolynomials Fc({spec.potential.F});
  std::vector<Monomial> abs_terms = spec.potential.F.terms();
  for (auto& m : abs_terms) m.coeff = std::abs(m.coeff);
  CompiledPolynomials Fabs({Polynomial(l, abs_terms)});
  std::vector<cplx> scratch(std::max({fc.scratch_size(), Fc.scratch_size(), Fabs.scratch_size()}));
  std::vector<cplx> z(l);
  std::vector<cplx> out(l);
  if (f) f->assign(l, std::vector<double>(M));
  if (re_F) re_F->assign(M, 0.0);
  if (abs_F) abs_F->assign(M, 0.0);
  for (int i = 0; i < M; ++i) {
    for (int k = 0; k < l; ++k) z[k] = u.components[k][i];
    if (f) {
      fc.evaluate(z.data(), out.data(), scratch.data());
      for (int k = 0; k < l; ++k) (*f)[k][i] = out[k].real();
    }
    cplx v;
    if (re_F) {
      Fc.evaluate(z.data(), &v, scratch.data());
      (*re_F)[i] = v.real();
    }
    if (abs_F) {
      for (int k = 0; k < l; ++k) z[k] = std::abs(z[k]);
      Fabs.evaluate(z.data(), &v, scratch.data());
      (*abs_F)[i] = v.real();
    }
  }
}

double gradient_energy(const RadialGrid& g, const std::vector<double>& u) {
  const double h = g.spacing();
  double s = 0.0;
  for (int i = 0; i < g.points; ++i) {
    const double next = i + 1 < g.points ? u[i + 1] : 0.0;
    const double d = next - u[i];
    s += g.face_area(i) * d * d / h;
  }
  return s;
}

double weighted_mass(const RadialGrid& g, const std::vector<double>& u) {
  double s = 0.0;
  for (int i = 0; i < g.points; ++i) s += g.cell_measure(i) * u[i] * u[i];
  return s;
}

// Solves (-gamma Lap + b) x = rhs with the conservative radial stencil.
void solve_tridiagonal(const RadialGrid& g, double gamma, double b, const std::vector<double>& rhs,
                       std::vector<double>& x) {
  const int M = g.points;
  const double h = g.spacing();
  std::vector<double> lower(M, 0.0);
  std::vector<double> diag(M, 0.0);
  std::vector<double> upper(M, 0.0);
  std::vector<double> d(M);
  for (int i = 0; i < M; ++i) {
    const double right = gamma * g.face_area(i) / h;
    const double left = i > 0 ? gamma * g.face_area(i - 1) / h : 0.0;
    diag[i] = g.cell_measure(i) * b + right + left;
    if (i + 1 < M) upper[i] = -right;
    if (i > 0) lower[i] = -left;
    d[i] = g.cell_measure(i) * rhs[i];
  }
  for (int i = 1; i < M; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    d[i] -= w * d[i - 1];
  }
  x.assign(M, 0.0);
  x[M - 1] = d[M - 1] / diag[M - 1];
  for (int i = M - 2; i >= 0; --i) x[i] = (d[i] - upper[i] * x[i + 1]) / diag[i];
}

// (-gamma Lap + b) u at cell i.
double apply_operator(const RadialGrid& g, double gamma, double b, const std::vector<double>& u, int i) {
  const double h = g.spacing();
  const double next = i + 1 < g.points ? u[i + 1] : 0.0;
  double flux = g.face_area(i) * (u[i] - next) / h;
  if (i > 0) flux += g.face_area(i - 1) * (u[i] - u[i - 1]) / h;
  return b * u[i] + gamma * flux / g.cell_measure(i);
}

}  // namespace

void RadialGrid::validate() const {
  if (dim < 1) throw SpecError("radial grid dimension must be positive");
  if (points < 16) throw SpecError("radial grid needs at least 16 cells");
  if (!(radius > 0.0)) throw SpecError("radial grid radius must be positive");
}

double RadialGrid::cell_measure(int i) const {
  const double h = spacing();
  return (std::pow((i + 1) * h, dim) - std::pow(i * h, dim)) / dim;
}

double RadialGrid::face_area(int i) const { return std::pow((i + 1) * spacing(), dim - 1); }

double RadialGrid::sphere_area() const { return 2.0 * std::pow(M_PI, dim / 2.0) / std::tgamma(dim / 2.0); }

FunctionalValues radial_dynamic_functionals(const RadialField& u, const SystemSpec& spec) {
  check_field(u, spec);
  const auto& g = u.grid;
  const double S = g.sphere_area();
  FunctionalValues fv;
  std::vector<double> mass(spec.components);
  for (int k = 0; k < spec.components; ++k) {
    fv.K += spec.gamma[k] * S * gradient_energy(g, u.components[k]);
    mass[k] = S * weighted_mass(g, u.components[k]);
    fv.L += spec.beta[k] * mass[k];
  }
  std::vector<double> re_F;
  std::vector<double> abs_F;
  evaluate_nonlinear(u, spec, nullptr, &re_F, &abs_F);
  for (int i = 0; i < g.points; ++i) {
    fv.P += S * g.cell_measure(i) * re_F[i];
    fv.P_abs += S * g.cell_measure(i) * abs_F[i];
  }
  if (spec.sigma) {
    double Q = 0.0;
    for (int k = 0; k < spec.components; ++k) Q += (*spec.sigma)[k] * spec.alpha[k] / 2.0 * mass[k];
    fv.Q = Q;
  }
  fv.E = fv.K + fv.L - 2.0 * fv.P;
  return fv;
}

FunctionalValues radial_functionals(const RadialField& u, const EllipticParams& params) {
  FunctionalValues fv = radial_dynamic_functionals(u, params.spec);
  const double S = u.grid.sphere_area();
  for (int k = 0; k < params.spec.components; ++k) {
    fv.Qcal += params.b[k] * S * weighted_mass(u.grid, u.components[k]);
  }
  fv.I = 0.5 * (fv.K + fv.Qcal) - fv.P;
  if (std::abs(fv.P) > 1e-14 * fv.P_abs) fv.J = weinstein_value(fv.K, fv.Qcal, fv.P, u.grid.dim, params.spec.p);
  return fv;
}

RadialGroundState solve_radial_ground_state(const EllipticParams& params, const RadialGrid& grid,
                                            const SolverOptions& options) {
  grid.validate();
  const auto& spec = params.spec;
  if (grid.dim != spec.dim) throw SpecError("radial grid dimension differs from the system dimension");
  const int l = spec.components;
  const int M = grid.points;
  RadialGroundState result;
  result.params = params;
  RadialField psi{grid, std::vector<std::vector<double>>(l, std::vector<double>(M))};
  for (int i = 0; i < M; ++i) {
    const double r = grid.r(i);
    for (int k = 0; k < l; ++k) psi.components[k][i] = std::exp(-r * r);
  }
  {
    std::vector<double> re_F;
    evaluate_nonlinear(psi, spec, nullptr, &re_F, nullptr);
    double P = 0.0;
    for (int i = 0; i < M; ++i) P += grid.cell_measure(i) * re_F[i];
    if (!(P > 0.0)) throw SpecError("initial guess has P <= 0; choose a positive initial profile");
  }

  const RadialField initial = psi;
  const double exponent = static_cast<double>(spec.p) / (spec.p - 1.0);
  std::vector<std::vector<double>> f;
  std::vector<double> next;
  auto step = [&](double theta) {
    evaluate_nonlinear(psi, spec, &f, nullptr, nullptr);
    double num = 0.0;
    double den = 0.0;
    for (int k = 0; k < l; ++k) {
      num += spec.gamma[k] * gradient_energy(grid, psi.components[k]) +
             params.b[k] * weighted_mass(grid, psi.components[k]);
      for (int i = 0; i < M; ++i) den += grid.cell_measure(i) * f[k][i] * psi.components[k][i];
    }
    const double Mfac = num / den;
    if (!std::isfinite(Mfac) || Mfac < 1e-8 || Mfac > 1e8) return detail::IterationStep{Mfac, 0.0};
    const double factor = std::pow(Mfac, exponent);
    double change = 0.0;
    for (int k = 0; k < l; ++k) {
      solve_tridiagonal(grid, spec.gamma[k], params.b[k], f[k], next);
      for (int i = 0; i < M; ++i) {
        const double old = psi.components[k][i];
        const double v = (1.0 - theta) * old + theta * factor * next[i];
        change = std::max(change, std::abs(v - old));
        psi.components[k][i] = v;
      }
    }
    return detail::IterationStep{Mfac, change};
  };
  auto reset = [&] { psi = initial; };
  auto accept = [] { return true; };
  const auto outcome = detail::run_stabilized_iteration(step, reset, accept, options);
  result.converged = outcome.converged;
  result.iterations = outcome.iterations;
  result.stabilizer = outcome.stabilizer;
  result.damping = outcome.damping;
  result.message = outcome.message;
  result.psi = psi;
  evaluate_nonlinear(psi, spec, &f, nullptr, nullptr);
  double worst = 0.0;
  for (int k = 0; k < l; ++k) {
    for (int i = 0; i < M; ++i) {
      worst = std::max(worst, std::abs(apply_operator(grid, spec.gamma[k], params.b[k], psi.components[k], i) -
                                       f[k][i]));
    }
  }
  result.residual = worst;
  result.functionals = radial_functionals(psi, params);
  return result;
}

GroundStateSummary summarize(const RadialGroundState& gs) {
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

RadialField scaled_profile(const RadialField& psi, double amplitude, double dilation) {
  if (!(dilation > 0.0)) throw SpecError("dilation must be positive");
  RadialField out = psi;
  const auto& g = psi.grid;
  const double h = g.spacing();
  for (std::size_t k = 0; k < psi.components.size(); ++k) {
    for (int i = 0; i < g.points; ++i) {
      const double s = g.r(i) / dilation / h - 0.5;  // fractional cell index
      double v = 0.0;
      if (s <= 0.0) {
        v = psi.components[k][0];
      } else if (s < g.points - 1) {
        const int j = static_cast<int>(s);
        const double w = s - j;
        v = (1.0 - w) * psi.components[k][j] + w * psi.components[k][j + 1];
      }
      out.components[k][i] = amplitude * v;
    }
  }
  return out;
}

}  // namespace nlslab
