#include <cmath>
#include <random>

#include "nlslab/error.hpp"
#include "nlslab/nonlinearity.hpp"

namespace nlslab {

namespace {

Polynomial weighted_gauge_polynomial(const Nonlinearity& nl, std::span<const double> weights) {
  if (weights.size() != nl.f.size()) throw SpecError("weight count does not match component count");
  Polynomial g(nl.f.empty() ? 0 : nl.f.front().variables());
  for (std::size_t k = 0; k < nl.f.size(); ++k) {
    g = g + nl.f[k].times_zbar(static_cast<int>(k)).scaled(weights[k]);
  }
  return g;
}

void check_coefficients(const std::vector<double>& v, const char* what, int l, bool positive) {
  if (static_cast<int>(v.size()) != l) {
    throw SpecError(std::string(what) + " has " + std::to_string(v.size()) +
                    " entries, expected " + std::to_string(l));
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw SpecError(std::string(what) + " must be finite");
    if (positive && !(x > 0.0)) throw SpecError(std::string(what) + " must be strictly positive");
    if (!positive && x < 0.0) throw SpecError(std::string(what) + " must be nonnegative");
  }
}

}  // namespace

bool weighted_phase_identity(const Nonlinearity& nl, std::span<const double> weights, double tol) {
  // Im G vanishes identically iff the coefficient of z^a zbar^b is the
  // conjugate of the coefficient of z^b zbar^a for every exponent pair.
  const Polynomial g = weighted_gauge_polynomial(nl, weights);
  const Polynomial gc = g.conjugate();
  double scale = 0.0;
  for (const auto& m : g.terms()) scale = std::max(scale, std::abs(m.coeff));
  return g.approx_equal(gc, tol * std::max(scale, 1.0));
}

double sampled_phase_residual(const Nonlinearity& nl, std::span<const double> weights, int samples,
                              std::uint64_t seed) {
  const Polynomial g = weighted_gauge_polynomial(nl, weights);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  std::vector<cplx> z(g.variables());
  for (int s = 0; s < samples; ++s) {
    for (auto& zj : z) zj = cplx(u(rng), u(rng));
    const double scale = g.abs_evaluate(z);
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(g.evaluate(z).imag()) / scale);
  }
  return worst;
}

SystemSpec make_system(std::string name, int dim, std::vector<double> alpha,
                       std::vector<double> gamma, std::vector<double> beta,
                       const Potential& potential) {
  if (dim < 1) throw SpecError("dimension must be a positive integer");
  const int l = potential.components;
  if (l < 1) throw SpecError("at least one component required");
  if (potential.F.variables() != l) throw SpecError("potential variable count mismatch");
  check_coefficients(alpha, "alpha", l, true);
  check_coefficients(gamma, "gamma", l, true);
  check_coefficients(beta, "beta", l, false);
  if (potential.F.empty()) throw SpecError("nontrivial potential required");
  const auto deg = potential.F.homogeneous_degree();
  if (!deg) throw SpecError("non-homogeneous term (degree != p+1)");
  if (*deg != potential.p + 1) {
    throw SpecError("potential degree " + std::to_string(*deg) + " does not match p+1 = " +
                    std::to_string(potential.p + 1));
  }
  if (potential.p < 2) throw SpecError("p must be an integer >= 2");

  SystemSpec spec;
  spec.name = std::move(name);
  spec.dim = dim;
  spec.components = l;
  spec.p = potential.p;
  spec.alpha = std::move(alpha);
  spec.gamma = std::move(gamma);
  spec.beta = std::move(beta);
  spec.potential = potential;
  spec.f = derive_f(potential);
  spec.sigma = find_sigma(potential);
  return spec;
}

bool check_mass_resonance(const SystemSpec& spec, std::uint64_t seed) {
  std::vector<double> w(spec.components);
  for (int k = 0; k < spec.components; ++k) w[k] = spec.alpha[k] / spec.gamma[k];
  const bool symbolic = weighted_phase_identity(spec.f, w);
  const bool sampled = sampled_phase_residual(spec.f, w, 64, seed) < 1e-12;
  return symbolic && sampled;
}

}  // namespace nlslab
