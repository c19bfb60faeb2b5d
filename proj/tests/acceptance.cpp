// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "support.hpp"

#include "nlslab/diagnostics.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/presets.hpp"
#include "nlslab/radial.hpp"

using namespace nlslab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double sech(double x) { return 1.0 / std::cosh(x); }

Monomial mono(double c, std::vector<ExponentPair> e) { return {cplx(c, 0.0), std::move(e)}; }

bool same_polynomial(const Polynomial& a, const Polynomial& b) {
  if (a.terms().size() != b.terms().size()) return false;
  for (std::size_t i = 0; i < a.terms().size(); ++i) {
    if (a.terms()[i].exps != b.terms()[i].exps) return false;
    if (std::abs(a.terms()[i].coeff - b.terms()[i].coeff) > 1e-15 * std::abs(b.terms()[i].coeff)) return false;
  }
  return true;
}

double max_rel(std::initializer_list<double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

FieldState scaled(FieldState u, double a) {
  for (auto& c : u.components) {
    for (auto& v : c) v *= a;
  }
  return u;
}

double state_sup_error(const FieldState& a, const FieldState& b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.components.size(); ++k) e = std::max(e, testing::sup_diff(a.components[k], b.components[k]));
  return e;
}

// Quadratic kappa = 1, beta = (1/2, 0): the b = (1, 1) ground state rotates as
// exp(i sigma_k t / 4).
SystemSpec quadratic_shifted() {
  SystemSpec s = quadratic_preset(1.0, 1);
  s.beta = {0.5, 0.0};
  return s;
}

FieldState quadratic_standing(const GridSpec& g, double t) {
  FieldState u(g, 2);
  const double a1 = 3.0 * std::sqrt(2.0) / 4.0, a2 = 0.75;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s2 = std::pow(sech(g.coordinate(static_cast<int>(i)) / 2), 2);
    u.components[0][i] = a1 * s2 * std::polar(1.0, 0.5 * t);
    u.components[1][i] = a2 * s2 * std::polar(1.0, t);
  }
  u.t = t;
  return u;
}

FieldState gaussian(const GridSpec& g, int components, double amplitude) {
  FieldState u(g, components);
  for (auto& c : u.components) {
    c = sample_field(g, [&](const std::array<double, 3>& x) {
      return cplx(amplitude * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])));
    });
  }
  return u;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

void nonlinearity_derivation(Outcome& o) {
  const SystemSpec q = quadratic_preset(0.5, 1);
  const Polynomial q1(2, {mono(2.0, {{0, 1}, {1, 0}})});
  const Polynomial q2(2, {mono(1.0, {{2, 0}, {0, 0}})});
  o.require(same_polynomial(q.f.f[0], q1) && same_polynomial(q.f.f[1], q2), "quadratic f");

  const SystemSpec c = cubic_preset(3.0, 1.0, 1);
  const Polynomial c1(2, {mono(1.0 / 9.0, {{2, 1}, {0, 0}}), mono(2.0, {{1, 0}, {1, 1}}),
                          mono(1.0 / 3.0, {{0, 2}, {1, 0}})});
  const Polynomial c2(2, {mono(9.0, {{0, 0}, {2, 1}}), mono(2.0, {{1, 1}, {1, 0}}), mono(1.0 / 9.0, {{3, 0}, {0, 0}})});
  o.require(same_polynomial(c.f.f[0], c1) && same_polynomial(c.f.f[1], c2), "cubic f");

  const auto sq = find_sigma(q.potential);
  const auto sc = find_sigma(c.potential);
  o.require(sq && std::abs((*sq)[0] - 2) < 1e-14 && std::abs((*sq)[1] - 4) < 1e-14, "sigma (2,4)");
  o.require(sc && std::abs((*sc)[0] - 2) < 1e-14 && std::abs((*sc)[1] - 6) < 1e-14, "sigma (2,6)");

  int flips = 0;
  for (double kappa : {0.3, 0.4, 0.5, 0.6, 0.7}) {
    const bool r = check_mass_resonance(quadratic_preset(kappa, 1));
    o.require(r == (kappa == 0.5), "kappa bracket");
    flips += r;
  }
  for (double sigma : {2.0, 2.5, 3.0, 3.5, 4.0}) {
    const bool r = check_mass_resonance(cubic_preset(sigma, 1.0, 1));
    o.require(r == (sigma == 3.0), "sigma bracket");
    flips += r;
  }
  o.detail << "f printed forms matched, sigma=(2,4),(2,6), resonant points=" << flips << "/10";
}

void ground_state_oracles(Outcome& o) {
  const GridSpec g{1, 1024, 20.0};
  // Direct substitution with analytic second derivatives at the grid nodes.
  double oracle = 0.0;
  const double a1 = 3.0 * std::sqrt(2.0) / 4.0, a2 = 0.75;
  FieldState soliton(g, 1);
  FieldState pair(g, 2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coordinate(static_cast<int>(i));
    const double s = sech(x);
    const double psi = std::sqrt(2.0) * s;
    oracle = std::max(oracle, std::abs(-std::sqrt(2.0) * (s - 2 * s * s * s) + psi - psi * psi * psi));
    const double h = sech(x / 2) * sech(x / 2);
    const double h2 = h - 1.5 * h * h;
    oracle = std::max(oracle, std::abs(-a1 * h2 + a1 * h - 2 * (a1 * h) * (a2 * h)));
    oracle = std::max(oracle, std::abs(-a2 * h2 + a2 * h - (a1 * h) * (a1 * h)));
    soliton.components[0][i] = psi;
    pair.components[0][i] = a1 * h;
    pair.components[1][i] = a2 * h;
  }
  o.require(oracle < 1e-10, "closed-form substitution residual");

  const GroundStateResult gs1 = solve_ground_state(unit_elliptic_params(single_cubic_preset(1)), g);
  const double e1 = testing::sup_diff(gs1.psi.components[0], soliton.components[0]);
  o.require(gs1.converged && e1 < 1e-6, "sech soliton");

  SystemSpec qs = quadratic_preset(1.0, 1);
  qs.beta = {0.5, 0.0};
  const GroundStateResult gs2 = solve_ground_state(make_elliptic_params(qs, 0.5), g);
  const double e2 = state_sup_error(gs2.psi, pair);
  o.require(gs2.converged && e2 < 1e-6, "sech^2 pair");
  o.detail << "substitution residual=" << oracle << " sup errors=" << e1 << ", " << e2;
}

void pohozaev_suite(Outcome& o) {
  const GridSpec g{1, 1024, 20.0};
  for (int which = 0; which < 2; ++which) {
    const SystemSpec spec = which == 0 ? quadratic_preset(0.5, 1) : cubic_preset(3.0, 1.0, 1);
    const GroundStateResult gs = solve_ground_state(unit_elliptic_params(spec), g);
    o.require(gs.converged, "converged");
    const PohozaevErrors e = verify_pohozaev(gs);
    const FunctionalValues& fv = gs.functionals;
    const int n = 1, p = spec.p;
    const double s = critical_index_value(n, p);
    const double q = (p - 1.0) * s / 2.0 + 1.0;
    const double J_closed = (p - 1.0) * std::pow(n, q) / 2.0 * std::pow(2.0 * (1.0 - s), (p - 1.0) * (1.0 - s) / 2.0) *
                            std::pow(fv.I, (p - 1.0) / 2.0);
    const double rP = std::abs(fv.P - 2.0 * fv.I / (p - 1.0)) / std::abs(2.0 * fv.I / (p - 1.0));
    const double rK = std::abs(fv.K - n * fv.I) / (n * fv.I);
    const double rQ = std::abs(fv.Qcal - 2.0 * (1.0 - s) * fv.I) / (2.0 * (1.0 - s) * fv.I);
    const double rJ = std::abs(*fv.J - J_closed) / J_closed;
    const double worst = max_rel({rP, rK, rQ, rJ, e.max()});
    o.require(e.applicable && worst < 1e-4, which == 0 ? "quadratic identities" : "cubic identities");
    if (which == 0) {
      o.require(std::abs(fv.Qcal / fv.I - (6 - n)) < 1e-4 * (6 - n), "Qcal/I = 6 - n");
      o.require(std::abs(fv.K / fv.I - n) < 1e-4 * n, "K/I = n");
    }
    o.detail << (which == 0 ? "quadratic" : "cubic") << " worst rel=" << worst << " ";
  }
}

void gagliardo_nirenberg(Outcome& o) {
  const GridSpec g{1, 1024, 20.0};
  auto gen = testing::rng(20240);
  int checked = 0;
  double worst_ratio = 0.0;
  for (int which = 0; which < 2; ++which) {
    const SystemSpec spec = which == 0 ? quadratic_preset(0.5, 1) : cubic_preset(3.0, 1.0, 1);
    const GroundStateResult gs = solve_ground_state(unit_elliptic_params(spec), g);
    o.require(gs.converged, "converged");
    const double C = optimal_gn_constant(gs);
    const GnExponents ex = gn_exponents(1, spec.p);
    const FunctionalValues& f0 = gs.functionals;
    const double eq = f0.P / (C * std::pow(f0.Qcal, ex.a) * std::pow(f0.K, ex.b));
    o.require(std::abs(eq - 1.0) < 1e-6, "equality at psi");
    for (int trial = 0; trial < 200; ++trial) {
      FieldState u(g, 2);
      if (trial % 2 == 0) {
        for (auto& c : u.components) c = testing::random_bumps(gen, g, 1 + trial % 4);
      } else {
        const double eps = testing::uniform(gen, 1e-3, 0.3);
        for (int k = 0; k < 2; ++k) {
          const Field bump = testing::random_bumps(gen, g, 1);
          for (std::size_t i = 0; i < g.size(); ++i) u.components[k][i] = gs.psi.components[k][i] + eps * bump[i];
        }
      }
      const FunctionalValues fv = functionals(u, gs.params);
      const double ratio = fv.P / (C * std::pow(fv.Qcal, ex.a) * std::pow(fv.K, ex.b));
      worst_ratio = std::max(worst_ratio, ratio);
      ++checked;
    }
    o.detail << (which == 0 ? "quadratic" : "cubic") << " equality=" << eq << " ";
  }
  o.require(worst_ratio <= 1.0 + 1e-8, "no violation");
  o.detail << "fields=" << checked << " (half perturbed ground states) max P/bound=" << worst_ratio;
}

void conservation(Outcome& o) {
  const SystemSpec spec = quadratic_preset(0.5, 1);
  const GridSpec g{1, 1024, 50.0};
  EvolveConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 5.0;
  cfg.snapshot_stride = 10;
  const EvolveOutcome out = evolve(gaussian(g, 2, 0.5), spec, cfg);
  o.require(out.status == EvolveStatus::ReachedTEnd, "reached t_end");
  double dQ = 0.0, dE = 0.0;
  const DiagnosticsRecord& first = out.series.front();
  for (const auto& r : out.series) {
    dQ = std::max(dQ, std::abs(r.Q / first.Q - 1.0));
    dE = std::max(dE, std::abs(r.E / first.E - 1.0));
  }
  o.require(dQ < 1e-8, "mass drift");
  o.require(dE < 1e-6, "energy drift");

  const GridSpec gw{1, 2048, 40.0};
  const FieldState u0 = quadratic_standing(gw, 0.0);
  FieldState u = u0;
  const SplitStepIntegrator integrator(quadratic_shifted(), gw);
  double modulus = 0.0;
  for (int chunk = 0; chunk < 100; ++chunk) {
    integrator.advance(u, 1e-3, 10);
    for (int k = 0; k < 2; ++k) {
      for (std::size_t i = 0; i < gw.size(); ++i) {
        modulus = std::max(modulus, std::abs(std::abs(u.components[k][i]) - std::abs(u0.components[k][i])));
      }
    }
  }
  o.require(modulus < 1e-6, "standing-wave modulus");
  o.detail << "max |dQ/Q|=" << dQ << " max |dE/E|=" << dE << " standing-wave modulus=" << modulus;
}

void virial_identity(Outcome& o) {
  const GridSpec g{2, 256, 12.0};
  EvolveConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  cfg.snapshot_stride = 10;
  double resonant_residual = 0.0, worst_fraction = 0.0;
  for (double sigma : {3.0, 4.0}) {
    const SystemSpec spec = cubic_preset(sigma, 1.0, 2);
    const FieldState u0 = gaussian(g, 2, 1.0);
    const EvolveOutcome out = evolve(u0, spec, cfg);
    o.require(out.status == EvolveStatus::ReachedTEnd, "reached t_end");
    const double K0 = out.series.front().K;
    double residual = 0.0;
    int interior = 0;
    for (const auto& r : out.series) {
      if (!r.Vddot_fd) continue;
      ++interior;
      const double res = std::abs(*r.Vddot_fd - r.Vddot_formula);
      residual = std::max(residual, res);
      if (sigma == 3.0) {
        const double tol = std::max(1e-3 * std::abs(r.Vddot_formula), 1e-6 * K0);
        worst_fraction = std::max(worst_fraction, res / tol);
      }
    }
    o.require(interior > 10, "interior snapshots");
    if (sigma == 3.0) {
      resonant_residual = residual;
      o.require(worst_fraction <= 1.0, "resonant residual within tolerance");
      o.detail << "sigma=3 max residual=" << residual << " (" << worst_fraction << " of tolerance) ";
    } else {
      o.require(residual >= 10.0 * resonant_residual, "non-resonant residual at least 10x");
      o.detail << "sigma=4 max residual=" << residual << " ratio=" << residual / resonant_residual;
    }
  }
}

void pseudo_conformal(Outcome& o) {
  const SystemSpec spec = without_beta(cubic_preset(3.0, 1.0, 2));
  const GridSpec g{2, 512, 12.0};
  const double T = 1.0;
  const GroundStateResult gs = solve_ground_state(pseudo_conformal_params(spec), g);
  o.require(gs.converged, "ground state");
  const FieldState v0 = pseudo_conformal_data(gs, T, spec);
  const double Q_psi = *dynamic_functionals(gs.psi, spec).Q;
  const double Q_v0 = *dynamic_functionals(v0, spec).Q;
  const double dQ = std::abs(Q_v0 - Q_psi) / Q_psi;
  o.require(dQ < 1e-10, "Q(v0) = Q(psi)");
  const double K_phase = pseudo_conformal_phase_energy(gs, spec);

  EvolveConfig cfg;
  cfg.dt = 2.5e-4;
  cfg.t_end = 0.7;
  cfg.snapshot_stride = 100;
  cfg.resolution_tol = 0.0;
  double max_err = 0.0;
  std::vector<double> log_tau, log_k;
  const EvolveOutcome out = evolve(v0, spec, cfg, [&](const FieldState& v, const DiagnosticsRecord& rec) {
    if (v.t <= 0.5 + 1e-9) {
      const FieldState exact = exact_pseudo_conformal(gs, T, v.t, spec);
      double diff = 0.0, norm = 0.0;
      for (int k = 0; k < v.count(); ++k) {
        for (std::size_t i = 0; i < v.components[k].size(); ++i) {
          diff += std::norm(v.components[k][i] - exact.components[k][i]);
          norm += std::norm(exact.components[k][i]);
        }
      }
      max_err = std::max(max_err, std::sqrt(diff / norm));
    }
    if (v.t >= 0.3 - 1e-9 && v.t <= 0.7 + 1e-9) {
      log_tau.push_back(std::log(T - v.t));
      log_k.push_back(std::log(rec.K - K_phase));
    }
  });
  o.require(out.status == EvolveStatus::ReachedTEnd, "reached t = 0.7");
  o.require(max_err < 1e-3, "relative L2 error up to t = 0.5");
  const double slope = log_tau.size() >= 2 ? fit_slope(log_tau, log_k) : 0.0;
  o.require(std::abs(slope + 2.0) <= 0.05, "log-log slope");
  o.detail << "max rel L2 error (t<=0.5)=" << max_err << " slope of K-K_phase over [0.3,0.7]=" << slope
           << " |Q(v0)/Q(psi)-1|=" << dQ << " K_phase=" << K_phase;
}

void dichotomy(Outcome& o) {
  const SystemSpec spec = cubic_preset(3.0, 1.0, 2);
  const GridSpec g{2, 256, 12.0};
  const GroundStateResult gs = solve_ground_state(unit_elliptic_params(spec), g);
  o.require(gs.converged, "ground state");
  EvolveConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 2.0;
  cfg.adaptive = true;
  cfg.snapshot_stride = 10;

  const EvolveOutcome below = evolve(scaled(gs.psi, 0.9), spec, cfg);
  double max_ratio = 0.0;
  for (const auto& r : below.series) max_ratio = std::max(max_ratio, r.K / below.series.front().K);
  o.require(below.status == EvolveStatus::ReachedTEnd, "c = 0.9 reaches t_end");
  o.require(max_ratio <= 2.0, "c = 0.9 K bounded by 2 K(0)");

  const EvolveOutcome above = evolve(scaled(gs.psi, 1.2), spec, cfg);
  o.require(above.status == EvolveStatus::BlowUpDetected && above.event_time < cfg.t_end, "c = 1.2 blow-up detected");
  const std::size_t m = above.series.size();
  bool monotone = m >= 3;
  for (std::size_t i = m >= 3 ? m - 3 : 0; i + 1 < m; ++i) monotone = monotone && above.series[i + 1].K > above.series[i].K;
  o.require(monotone, "monotone terminal K");
  o.detail << "c=0.9: " << to_string(below.status) << " max K/K0=" << max_ratio << "; c=1.2: " << to_string(above.status)
           << " at t=" << above.event_time << " (" << above.reason
           << ", K " << above.series.front().K << " -> " << above.series.back().K
           << "); numerical evidence, not proof";
}

void classifier_algebra(Outcome& o) {
  const SystemSpec q5 = quadratic_preset(0.5, 5);
  const RadialGroundState rg = solve_radial_ground_state(unit_elliptic_params(q5), RadialGrid{5, 8000, 30.0});
  o.require(rg.converged, "radial n = 5");
  const GroundStateSummary s5 = summarize(rg);
  double gamma_worst = 0.0;
  for (double a : {0.8, 1.0, 1.1, 1.3}) {
    const Verdict v = classify(initial_quantities(scaled_profile(rg.psi, a, 1.0), q5), q5, s5, true,
                               VarianceAssumption::Radial);
    o.require(v.gamma_threshold.has_value(), "gamma present");
    if (v.gamma_threshold) gamma_worst = std::max(gamma_worst, testing::rel(*v.gamma_threshold, *v.gamma_threshold_closed_form));
  }
  o.require(gamma_worst < 1e-8, "gamma forms agree");

  double relation_worst = 0.0;
  int solved = 0;
  auto gate = [&](const GroundStateSummary& s) {
    o.require(s.converged, "preset ground state converged");
    relation_worst = std::max(relation_worst, threshold_relations(s).max());
    ++solved;
  };
  for (int n = 1; n <= 2; ++n) {
    const GridSpec g{n, n == 1 ? 1024 : 256, n == 1 ? 20.0 : 12.0};
    gate(summarize(solve_ground_state(unit_elliptic_params(quadratic_preset(0.5, n)), g)));
    gate(summarize(solve_ground_state(unit_elliptic_params(cubic_preset(3.0, 1.0, n)), g)));
  }
  for (int n = 3; n <= 5; ++n) {
    gate(summarize(solve_radial_ground_state(unit_elliptic_params(quadratic_preset(0.5, n)), RadialGrid{n, 8000, 30.0})));
  }
  gate(summarize(solve_radial_ground_state(unit_elliptic_params(cubic_preset(3.0, 1.0, 3)), RadialGrid{3, 8000, 30.0})));
  o.require(relation_worst < 1e-3, "threshold relations");

  const SystemSpec c2 = cubic_preset(3.0, 1.0, 2);
  const GroundStateResult gs = solve_ground_state(unit_elliptic_params(c2), GridSpec{2, 256, 12.0});
  const InitialQuantities base = initial_quantities(gs.psi, c2);
  double scaling_worst = 0.0;
  bool consistent = true;
  for (double a : {0.5, 0.9, 1.2, 2.0}) {
    const FieldState u = scaled(gs.psi, a);
    const InitialQuantities q = initial_quantities(u, c2);
    scaling_worst = std::max({scaling_worst, testing::rel(q.Q, a * a * base.Q), testing::rel(q.K, a * a * base.K)});
    const Verdict v = classify(u, c2, gs);
    const Classification expected = a < 1.0 ? Classification::GlobalByTheorem1ii : Classification::Indeterminate;
    consistent = consistent && v.classification == expected &&
                 v.classification == decide(v.regime, v.thresholds, v.mass_resonant, v.assumption, 2, 3);
  }
  o.require(scaling_worst < 1e-10, "rescaling laws");
  o.require(consistent, "classification consistent under rescaling");
  o.detail << "gamma rel diff=" << gamma_worst << " threshold relations max=" << relation_worst << " over " << solved
           << " ground states, rescaling rel err=" << scaling_worst;
}

void convergence_order(Outcome& o) {
  const GridSpec g{1, 1024, 40.0};
  const SystemSpec spec = quadratic_shifted();
  const FieldState u0 = quadratic_standing(g, 0.0);
  const SplitStepIntegrator integrator(spec, g);
  auto run = [&](double dt) {
    FieldState u = u0;
    integrator.advance(u, dt, std::lround(1.0 / dt));
    return u;
  };
  const FieldState ref = run(1e-3 / 16);
  std::vector<double> log_dt, log_err;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const double err = state_sup_error(run(dt), ref);
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(err));
    o.detail << "dt=" << dt << " err=" << err << " ";
  }
  const double slope = fit_slope(log_dt, log_err);
  o.require(std::abs(slope - 2.0) <= 0.2, "slope 2 +- 0.2");
  o.detail << "slope=" << slope;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"nonlinearity derivation", nonlinearity_derivation},
      {"ground-state oracles", ground_state_oracles},
      {"Pohozaev suite", pohozaev_suite},
      {"sharp Gagliardo-Nirenberg constant", gagliardo_nirenberg},
      {"conservation", conservation},
      {"virial identity", virial_identity},
      {"pseudo-conformal blow-up", pseudo_conformal},
      {"L2-critical dichotomy", dichotomy},
      {"classifier algebra", classifier_algebra},
      {"convergence order", convergence_order},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("criterion %zu %s: %s (%.1f s) %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                seconds, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
