#include "nlslab/hypotheses.hpp"

#include <cmath>
#include <random>

#include "nlslab/error.hpp"

namespace nlslab {

namespace {

constexpr int kSamples = 256;

bool all_coefficients_nonnegative_real(const Polynomial& p) {
  for (const auto& m : p.terms()) {
    if (m.coeff.imag() != 0.0 || m.coeff.real() < 0.0) return false;
  }
  return true;
}

std::vector<cplx> random_point(std::mt19937_64& rng, int l) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> z(l);
  for (auto& zj : z) zj = cplx(u(rng), u(rng));
  return z;
}

std::vector<long double> random_cone_point(std::mt19937_64& rng, int l) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<long double> x(l);
  for (auto& xj : x) xj = u(rng);
  return x;
}

HypothesisEntry entry(std::string id, HypothesisStatus status, std::string method,
                      std::string detail) {
  HypothesisEntry e;
  e.id = std::move(id);
  e.status = status;
  e.method = std::move(method);
  e.detail = std::move(detail);
  return e;
}

nlohmann::json point_json(std::span<const cplx> z) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& zj : z) arr.push_back({zj.real(), zj.imag()});
  return arr;
}

}  // namespace

std::string to_string(HypothesisStatus status) {
  switch (status) {
    case HypothesisStatus::Pass:
      return "pass";
    case HypothesisStatus::Fail:
      return "fail";
    case HypothesisStatus::HeuristicPass:
      return "heuristic-pass";
  }
  return "fail";
}

const HypothesisEntry& HypothesisReport::at(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return e;
  }
  throw SpecError("no hypothesis entry named " + id);
}

bool HypothesisReport::passed() const {
  for (const auto& e : entries) {
    if (e.status == HypothesisStatus::Fail) return false;
  }
  return true;
}

HypothesisReport validate_hypotheses(const SystemSpec& spec, std::uint64_t seed) {
  HypothesisReport report;
  const int l = spec.components;
  const int p = spec.p;
  std::mt19937_64 rng(seed);

  {
    const std::vector<cplx> zero(l, cplx(0.0));
    const auto f0 = eval_f(spec.f, zero);
    bool ok = true;
    for (const auto& v : f0) ok = ok && v == cplx(0.0);
    for (const auto& fk : spec.f.f) {
      for (const auto& m : fk.terms()) ok = ok && m.degree() >= 1;
    }
    report.entries.push_back(entry("H1", ok ? HypothesisStatus::Pass : HypothesisStatus::Fail, "exact",
                                   "every monomial of f has positive degree, so f(0) = 0"));
  }

  report.entries.push_back(entry(
      "H2*", p >= 2 ? HypothesisStatus::Pass : HypothesisStatus::Fail, "structural",
      "polynomial nonlinearity of degree p = " + std::to_string(p) + " satisfies the growth bounds"));

  report.entries.push_back(entry("H3", HypothesisStatus::Pass, "structural",
                                 "f is derived from the potential by Wirtinger differentiation"));

  {
    HypothesisEntry e;
    e.id = "H4*";
    e.method = "exact";
    if (!spec.sigma) {
      e.status = HypothesisStatus::Fail;
      e.detail = "no strictly positive sigma makes every monomial phase invariant";
    } else {
      const auto& sigma = *spec.sigma;
      report.sigma = sigma;
      const bool symbolic = weighted_phase_identity(spec.f, sigma);
      // Sampled confirmation against (sum |z_j|)^{p+1}.
      double worst = 0.0;
      for (int s = 0; s < kSamples; ++s) {
        const auto z = random_point(rng, l);
        const auto fz = eval_f(spec.f, z);
        cplx g = 0.0;
        double norm1 = 0.0;
        for (int k = 0; k < l; ++k) {
          g += sigma[k] * fz[k] * std::conj(z[k]);
          norm1 += std::abs(z[k]);
        }
        worst = std::max(worst, std::abs(g.imag()) / std::pow(norm1, p + 1));
      }
      e.status = symbolic && worst < 1e-12 ? HypothesisStatus::Pass : HypothesisStatus::Fail;
      e.detail = "phase identity with the returned sigma";
      e.witnesses["sigma"] = sigma;
      e.witnesses["max_sampled_residual"] = worst;
    }
    report.entries.push_back(std::move(e));
  }

  {
    const auto deg = spec.potential.F.homogeneous_degree();
    const bool ok = deg && *deg == p + 1;
    HypothesisEntry e = entry("H5*", ok ? HypothesisStatus::Pass : HypothesisStatus::Fail, "exact",
                              "F homogeneous of degree p+1 = " + std::to_string(p + 1));
    report.entries.push_back(std::move(e));
  }

  {
    // |Re F(z)| <= F(|z_1|, ..., |z_l|), pointwise, which implies the integral form.
    HypothesisEntry e;
    e.id = "H6";
    if (all_coefficients_nonnegative_real(spec.potential.F)) {
      e.status = HypothesisStatus::Pass;
      e.method = "exact";
      e.detail = "all coefficients are nonnegative reals";
    } else {
      e.method = "sampled";
      e.status = HypothesisStatus::HeuristicPass;
      e.detail = "pointwise bound sampled at 256 points";
      for (int s = 0; s < kSamples; ++s) {
        const auto z = random_point(rng, l);
        std::vector<cplx> mod(l);
        for (int k = 0; k < l; ++k) mod[k] = std::abs(z[k]);
        const double lhs = std::abs(spec.potential.F.evaluate(z).real());
        const double rhs = spec.potential.F.evaluate(mod).real();
        if (lhs > rhs + 1e-12 * spec.potential.F.abs_evaluate(z)) {
          e.status = HypothesisStatus::Fail;
          e.detail = "pointwise bound violated";
          e.witnesses["point"] = point_json(z);
          e.witnesses["lhs"] = lhs;
          e.witnesses["rhs"] = rhs;
          break;
        }
      }
    }
    report.entries.push_back(std::move(e));
  }

  {
    HypothesisEntry e;
    e.id = "H7";
    const Polynomial real_F = spec.potential.F.real_restriction();
    bool real_on_reals = true;
    for (const auto& m : real_F.terms()) real_on_reals = real_on_reals && m.coeff.imag() == 0.0;
    bool f_exact = true;
    for (const auto& fk : spec.f.f) f_exact = f_exact && all_coefficients_nonnegative_real(fk.real_restriction());
    if (!real_on_reals) {
      e.status = HypothesisStatus::Fail;
      e.method = "exact";
      e.detail = "F takes non-real values on real arguments";
      for (const auto& m : real_F.terms()) {
        if (m.coeff.imag() != 0.0) {
          e.witnesses["imaginary_coefficient"] = {m.coeff.real(), m.coeff.imag()};
          break;
        }
      }
    } else {
      // Sampled confirmation: F real and f_k >= 0 on the positive cone.
      double worst_imag = 0.0;
      double min_f = 0.0;
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int s = 0; s < kSamples; ++s) {
        std::vector<cplx> x(l);
        for (auto& xj : x) xj = u(rng);
        worst_imag = std::max(worst_imag, std::abs(spec.potential.F.evaluate(x).imag()));
        for (const auto& v : eval_f(spec.f, x)) min_f = std::min(min_f, v.real());
      }
      const bool sampled_ok = worst_imag <= 1e-14 && min_f >= -1e-14;
      e.method = f_exact ? "exact" : "sampled";
      e.status = !sampled_ok ? HypothesisStatus::Fail
                 : f_exact   ? HypothesisStatus::Pass
                             : HypothesisStatus::HeuristicPass;
      e.detail = f_exact ? "F real on real arguments and f has nonnegative real coefficients there"
                         : "F real on real arguments; f >= 0 on the positive cone by sampling";
      e.witnesses["max_imag_on_reals"] = worst_imag;
      e.witnesses["min_f_on_cone"] = min_f;
    }
    report.entries.push_back(std::move(e));
  }

  {
    // Mixed second partials of F on the positive cone by central differences
    // in extended precision.
    HypothesisEntry e;
    e.id = "H8";
    e.method = "sampled";
    long double min_mixed = 0.0L;
    bool have = false;
    const long double h = 1e-3L;
    std::vector<long double> witness;
    for (int s = 0; s < kSamples && l > 1; ++s) {
      auto x = random_cone_point(rng, l);
      for (int i = 0; i < l; ++i) {
        for (int j = i + 1; j < l; ++j) {
          auto eval = [&](long double di, long double dj) {
            auto y = x;
            y[i] += di;
            y[j] += dj;
            return spec.potential.F.evaluate_real<long double>(y).real();
          };
          const long double d =
              (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0L * h * h);
          if (!have || d < min_mixed) {
            min_mixed = d;
            witness = x;
            have = true;
          }
        }
      }
    }
    const bool ok = !have || min_mixed >= -1e-10L;
    e.status = ok ? HypothesisStatus::HeuristicPass : HypothesisStatus::Fail;
    e.detail = l > 1 ? "mixed second partials sampled at 256 points of the positive cone"
                     : "single component: no mixed partials";
    e.witnesses["min_mixed_partial"] = static_cast<double>(min_mixed);
    if (!ok) {
      std::vector<double> w(witness.begin(), witness.end());
      e.witnesses["point"] = w;
    }
    report.entries.push_back(std::move(e));
  }

  report.mass_resonant = check_mass_resonance(spec, seed);
  return report;
}

nlohmann::json to_json(const HypothesisReport& report) {
  nlohmann::json j;
  j["mass_resonant"] = report.mass_resonant;
  j["sigma"] = report.sigma;
  j["all_pass"] = report.passed();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : report.entries) {
    arr.push_back({{"id", e.id},
                   {"status", to_string(e.status)},
                   {"method", e.method},
                   {"detail", e.detail},
                   {"witnesses", e.witnesses}});
  }
  j["hypotheses"] = arr;
  return j;
}

}  // namespace nlslab
