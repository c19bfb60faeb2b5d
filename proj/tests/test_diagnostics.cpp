#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

#include "nlslab/diagnostics.hpp"
#include "nlslab/error.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/presets.hpp"
#include "nlslab/radial.hpp"

using namespace nlslab;
using std::numbers::pi;

namespace {

FieldState gaussian(const GridSpec& g, int components, double amplitude = 1.0) {
  FieldState u(g, components);
  for (auto& c : u.components) {
    c = sample_field(g, [&](const std::array<double, 3>& x) {
      return cplx(amplitude * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])));
    });
  }
  return u;
}

FieldState scaled(FieldState u, double a) {
  for (auto& c : u.components) {
    for (auto& v : c) v *= a;
  }
  return u;
}

const GroundStateResult& cubic2d_gs() {
  static const GroundStateResult gs =
      solve_ground_state(unit_elliptic_params(cubic_preset(3.0, 0.0, 2)), GridSpec{2, 256, 12.0});
  return gs;
}

const RadialGroundState& quadratic5_gs() {
  static const RadialGroundState gs =
      solve_radial_ground_state(unit_elliptic_params(quadratic_preset(0.5, 5)), RadialGrid{5, 8000, 30.0});
  return gs;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("critical index and regimes") {
    CHECK(critical_index(4, 2).s_c == 0.0);
    CHECK(critical_index(4, 2).regime == Regime::L2Critical);
    CHECK(critical_index(2, 3).s_c == 0.0);
    CHECK(critical_index(2, 3).regime == Regime::L2Critical);
    CHECK(critical_index(5, 2).s_c == doctest::Approx(0.5));
    CHECK(critical_index(5, 2).regime == Regime::Intercritical);
    CHECK(critical_index(1, 2).regime == Regime::L2Subcritical);
    CHECK(critical_index(6, 2).regime == Regime::H1CriticalOrBeyond);
    CHECK(critical_index(3, 5).regime == Regime::H1CriticalOrBeyond);
    CHECK(critical_index(1, 7).regime == Regime::Intercritical);
  }

  TEST_CASE("variance of a Gaussian and of the zero field") {
    const SystemSpec spec = single_cubic_preset(1);
    const GridSpec g{1, 512, 12.0};
    const Variance v = variance(gaussian(g, 1), spec);
    CHECK(v.V == doctest::Approx(0.25 * std::sqrt(pi / 2.0)).epsilon(1e-12));
    CHECK(std::abs(v.Vdot) < 1e-14);
    const Variance zero = variance(FieldState(g, 1), spec);
    CHECK(zero.V == 0.0);
    CHECK(zero.Vdot == 0.0);
  }

  TEST_CASE("variance rate of the pseudo-conformal data") {
    const SystemSpec spec = cubic_preset(3.0, 0.0, 2);
    const GroundStateResult& gs = cubic2d_gs();
    REQUIRE(gs.converged);
    for (double T : {1.0, 2.0}) {
      const FieldState v0 = pseudo_conformal_data(gs, T, spec);
      const Variance var = variance(v0, spec);
      // -(2/T) sum (alpha^2/gamma) integral |x|^2 psi^2 evaluated on psi(x/T) T^-1.
      double expected = 0.0;
      const Spectral& sp = spectral_for(v0.grid);
      for (int k = 0; k < 2; ++k) {
        RealField m(v0.grid.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = sp.radius_squared()[i] * std::norm(v0.components[k][i]);
        expected += spec.alpha[k] * spec.alpha[k] / spec.gamma[k] * sp.integrate(m);
      }
      expected *= -2.0 / T;
      CAPTURE(T);
      CHECK(var.Vdot < 0.0);
      CHECK(var.Vdot == doctest::Approx(expected).epsilon(1e-8));
    }
  }

  TEST_CASE("virial right-hand side coefficients") {
    SUBCASE("single cubic in one dimension") {
      const SystemSpec spec = single_cubic_preset(1);
      auto gen = testing::rng(3);
      const GridSpec g{1, 256, 10.0};
      FieldState u(g, 1);
      u.components[0] = testing::random_bumps(gen, g);
      const FunctionalValues fv = dynamic_functionals(u, spec);
      const VirialValue r = virial_rhs(u, spec, true);
      CHECK(r.applicable);
      CHECK(r.value == doctest::Approx(4 * fv.E + 4 * fv.K - 4 * fv.L).epsilon(1e-12));
      CHECK(r.value == doctest::Approx(8 * fv.K - 8 * fv.P).epsilon(1e-12));
    }
    SUBCASE("L2-critical cubic in two dimensions") {
      const SystemSpec spec = cubic_preset(3.0, 1.0, 2);
      auto gen = testing::rng(4);
      const GridSpec g{2, 64, 8.0};
      FieldState u(g, 2);
      for (auto& c : u.components) c = testing::random_bumps(gen, g);
      const FunctionalValues fv = dynamic_functionals(u, spec);
      CHECK(virial_rhs(fv, spec, true).value == doctest::Approx(8.0 * (fv.E - fv.L)).epsilon(1e-12));
      FunctionalValues more = fv;
      more.K += 10.0;
      more.E += 10.0;
      CHECK(virial_rhs(more, spec, true).value == doctest::Approx(virial_rhs(fv, spec, true).value + 80.0));
      const VirialValue off = virial_rhs(fv, cubic_preset(4.0, 1.0, 2), false);
      CHECK_FALSE(off.applicable);
      CHECK_FALSE(off.reason.empty());
    }
  }

  TEST_CASE("cutoff function shape") {
    for (double r = 0.0; r <= 4.0; r += 1e-3) {
      CHECK(RadialCutoff::derivative(r, 2) <= 2.0 + 1e-12);
      CHECK(RadialCutoff::derivative(r, 1) >= -1e-12);
    }
    for (int k = 0; k <= 4; ++k) {
      const double inner = k == 0 ? 1.0 : k == 1 ? 2.0 : k == 2 ? 2.0 : 0.0;
      CAPTURE(k);
      CHECK(RadialCutoff::derivative(1.0 + 1e-12, k) == doctest::Approx(inner).epsilon(1e-8).scale(1.0));
      const double outer = k == 0 ? 3.5 : 0.0;
      CHECK(RadialCutoff::derivative(3.0 - 1e-12, k) == doctest::Approx(outer).epsilon(1e-8).scale(1.0));
    }
    CHECK_THROWS_AS(RadialCutoff::derivative(1.0, 5), SpecError);
  }

  TEST_CASE("scaled cutoff: Laplacian inside R and bilaplacian bound") {
    for (int n = 1; n <= 5; ++n) {
      double bound = 0.0;
      for (double R : {1.0, 2.0, 4.0, 8.0}) {
        for (double r = 0.0; r <= R; r += R / 200) CHECK(RadialCutoff::scaled_laplacian(r, R, n) == 2.0 * n);
        double worst = 0.0;
        for (double r = R; r <= 4 * R; r += R / 2000) {
          worst = std::max(worst, RadialCutoff::scaled_bilaplacian(r, R, n));
        }
        if (R == 1.0) bound = worst;
        CAPTURE(n);
        CAPTURE(R);
        CHECK(worst * R * R <= bound * (1.0 + 1e-9) + 1e-12);
      }
    }
  }

  TEST_CASE("localized virial reduces to the global identity for large R") {
    for (int n = 1; n <= 2; ++n) {
      const SystemSpec spec = n == 1 ? single_cubic_preset(1) : cubic_preset(3.0, 1.0, 2);
      const GridSpec g{n, n == 1 ? 512 : 128, 8.0};
      const FieldState u = gaussian(g, spec.components, 1.3);
      const LocalizedVirial lv = localized_virial(u, spec, 8.0, true);
      CHECK(lv.applicable);
      CHECK(lv.V_R == doctest::Approx(0.5 * variance(u, spec).V).epsilon(1e-10));
      const double rhs = virial_rhs(u, spec, true).value;
      CAPTURE(n);
      CHECK(std::abs(lv.Vddot_R - 0.5 * rhs) <= 1e-6 * std::abs(rhs));
    }
  }

  TEST_CASE("localized virial rejects non-radial data") {
    const SystemSpec spec = cubic_preset(3.0, 1.0, 2);
    const GridSpec g{2, 64, 8.0};
    FieldState u = gaussian(g, 2);
    u.components[0] = sample_field(g, [](const auto& x) { return cplx(std::exp(-(x[0] - 0.5) * (x[0] - 0.5) - x[1] * x[1])); });
    CHECK_THROWS_AS(localized_virial(u, spec, 4.0, true), SpecError);
    CHECK_THROWS_AS(localized_virial(gaussian(g, 2), spec, 0.0, true), SpecError);
  }

  TEST_CASE("second derivative by finite differences") {
    std::vector<DiagnosticsRecord> series;
    for (double t : {0.0, 0.1, 0.3, 0.4, 0.7}) {
      DiagnosticsRecord r;
      r.t = t;
      r.V = 3.0 * t * t - t + 2.0;
      series.push_back(r);
    }
    fill_second_derivative(series);
    CHECK_FALSE(series.front().Vddot_fd);
    CHECK_FALSE(series.back().Vddot_fd);
    for (std::size_t i = 1; i + 1 < series.size(); ++i) CHECK(*series[i].Vddot_fd == doctest::Approx(6.0));
  }

  TEST_CASE("classification examples") {
    SUBCASE("quadratic in one dimension is globally well posed") {
      const SystemSpec spec = quadratic_preset(0.5, 1);
      const GroundStateResult gs = solve_ground_state(unit_elliptic_params(spec), GridSpec{1, 1024, 20.0});
      const Verdict v = classify(gaussian(gs.psi.grid, 2, 7.0), spec, gs);
      CHECK(v.classification == Classification::GlobalByTheorem1i);
      CHECK(v.regime == Regime::L2Subcritical);
    }
    SUBCASE("cubic n = 2 below the ground-state mass") {
      const SystemSpec spec = cubic_preset(3.0, 1.0, 2);
      const GroundStateResult& gs = cubic2d_gs();
      const Verdict v = classify(scaled(gs.psi, 0.9), spec, gs);
      CHECK(v.classification == Classification::GlobalByTheorem1ii);
      CHECK(v.thresholds.Q0 == doctest::Approx(0.81 * v.thresholds.Q_psi).epsilon(1e-12));
      const Verdict above = classify(scaled(gs.psi, 1.2), spec, gs);
      CHECK(above.classification == Classification::Indeterminate);
    }
    SUBCASE("quadratic n = 5 above the gradient threshold") {
      const SystemSpec spec = quadratic_preset(0.5, 5);
      const RadialGroundState& gs = quadratic5_gs();
      REQUIRE(gs.converged);
      const GroundStateSummary sum = summarize(gs);
      CHECK(threshold_relations(sum).max() < 1e-3);
      CHECK(sum.K / sum.Q == doctest::Approx(5.0).epsilon(1e-3));
      const InitialQuantities q = initial_quantities(scaled_profile(gs.psi, 1.1, 1.0), spec);
      const Verdict v = classify(q, spec, sum, true, VarianceAssumption::Radial);
      CHECK(v.classification == Classification::BlowUpCandidateByTheorem2ii);
      CHECK(v.thresholds.sharp1);
      CHECK(v.thresholds.gradient_blowup);
      REQUIRE(v.gamma_threshold);
      CHECK(v.gamma_forms_agree);
      CHECK(testing::rel(*v.gamma_threshold, *v.gamma_threshold_closed_form) < 1e-8);
      const Verdict below = classify(initial_quantities(scaled_profile(gs.psi, 0.9, 1.0), spec), spec, sum, true,
                                     VarianceAssumption::Radial);
      CHECK(below.classification == Classification::GlobalByTheorem2i);
      const Verdict off = classify(q, quadratic_preset(0.6, 5), sum, false, VarianceAssumption::Radial);
      CHECK(off.classification == Classification::Indeterminate);
    }
  }

  TEST_CASE("classifier errors and the energy-critical regime") {
    const GroundStateResult& gs = cubic2d_gs();
    GroundStateResult broken = gs;
    broken.converged = false;
    CHECK_THROWS_AS(classify(gs.psi, cubic_preset(3.0, 1.0, 2), broken), NumericalError);
    GroundStateSummary sum = summarize(quadratic5_gs());
    sum.n = 6;
    const Verdict v = classify(InitialQuantities{1.0, 1.0, 1.0}, quadratic_preset(0.5, 6), sum, true);
    CHECK(v.regime == Regime::H1CriticalOrBeyond);
    CHECK(v.classification == Classification::Indeterminate);
    CHECK_THROWS_AS(classify(InitialQuantities{1.0, 1.0, 1.0}, quadratic_preset(0.5, 4), sum, true), SpecError);
  }

  TEST_CASE("property: verdicts are re-derivable from their threshold records") {
    const RadialGroundState& gs = quadratic5_gs();
    const GroundStateSummary sum = summarize(gs);
    auto gen = testing::rng(77);
    int seen_candidate = 0, seen_global = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const double a = testing::uniform(gen, 0.5, 1.6);
      const double lambda = testing::uniform(gen, 0.5, 2.0);
      const bool resonant = trial % 3 != 0;
      const auto assumption = trial % 2 ? VarianceAssumption::Radial : VarianceAssumption::FiniteVariance;
      const InitialQuantities q = scaled_ground_state_quantities(sum, a, lambda);
      const Verdict v = classify(q, quadratic_preset(resonant ? 0.5 : 0.7, 5), sum, resonant, assumption);
      const Verdict again = classify(q, quadratic_preset(resonant ? 0.5 : 0.7, 5), sum, resonant, assumption);
      CHECK(to_json(v) == to_json(again));
      CHECK(decide(v.regime, v.thresholds, resonant, assumption, 5, 2) == v.classification);
      const Thresholds th = v.thresholds;
      CHECK(th.sharp1 == (th.sharp1_lhs < th.sharp1_rhs));
      CHECK(th.sharp2 == (th.sharp2_lhs < th.sharp2_rhs));
      CHECK(v.gamma_forms_agree);
      seen_candidate += v.classification == Classification::BlowUpCandidateByTheorem2ii;
      seen_global += v.classification == Classification::GlobalByTheorem2i;
    }
    CHECK(seen_candidate > 0);
    CHECK(seen_global > 0);
  }

  TEST_CASE("property: amplitude rescaling laws on re-evaluated fields") {
    const SystemSpec spec = cubic_preset(3.0, 1.0, 2);
    const GridSpec g{2, 64, 8.0};
    auto gen = testing::rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      FieldState u(g, 2);
      for (auto& c : u.components) c = testing::random_bumps(gen, g);
      const InitialQuantities base = initial_quantities(u, spec);
      const double a = testing::uniform(gen, 0.2, 3.0);
      const InitialQuantities q = initial_quantities(scaled(u, a), spec);
      CHECK(testing::rel(q.Q, a * a * base.Q) < 1e-10);
      CHECK(testing::rel(q.K, a * a * base.K) < 1e-10);
    }
  }

  TEST_CASE("property: diagnostics records are nonnegative where required") {
    const SystemSpec spec = cubic_preset(3.0, 1.0, 2);
    const GridSpec g{2, 64, 8.0};
    auto gen = testing::rng(6);
    for (int trial = 0; trial < 10; ++trial) {
      FieldState u(g, 2);
      for (auto& c : u.components) c = testing::random_bumps(gen, g);
      const DiagnosticsRecord r = make_record(u, spec, true);
      CHECK(r.Q >= 0.0);
      CHECK(r.K >= 0.0);
      CHECK(r.L >= 0.0);
      CHECK(r.V >= 0.0);
      CHECK(r.boundary_mass >= 0.0);
      CHECK(r.boundary_mass <= 1.0);
      CHECK(r.E == doctest::Approx(r.K + r.L - 2 * r.P));
    }
  }
}
