#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nlslab {

using cplx = std::complex<double>;

// Powers of z_j and conj(z_j) carried by one variable of a monomial.
struct ExponentPair {
  int z = 0;
  int zbar = 0;

  friend bool operator==(const ExponentPair&, const ExponentPair&) = default;
  friend auto operator<=>(const ExponentPair&, const ExponentPair&) = default;
};

// c * prod_j z_j^{a_j} conj(z_j)^{b_j}
struct Monomial {
  cplx coeff;
  std::vector<ExponentPair> exps;

  int degree() const;
  cplx evaluate(std::span<const cplx> z) const;
  // |c| * prod_j |z_j|^{a_j + b_j}
  double abs_evaluate(std::span<const cplx> z) const;
};

// Finite sum of monomials in l complex variables, kept in collected form:
// exponent vectors are unique, sorted, and carry nonzero coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int variables);
  Polynomial(int variables, std::vector<Monomial> terms);

  int variables() const { return variables_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  cplx evaluate(std::span<const cplx> z) const;
  double abs_evaluate(std::span<const cplx> z) const;
  // Value for real arguments, where conj(x) = x.
  template <class Real>
  std::complex<Real> evaluate_real(std::span<const Real> x) const;

  std::optional<int> homogeneous_degree() const;
  int max_degree() const;

  Polynomial d_dz(int k) const;
  Polynomial d_dzbar(int k) const;
  // Coefficient-wise conjugate with z and conj(z) exchanged, so that
  // conj(P(z)) = conjugate(P)(z).
  Polynomial conjugate() const;
  Polynomial times_zbar(int k) const;
  Polynomial scaled(cplx factor) const;
  Polynomial operator+(const Polynomial& other) const;

  // Restriction to real arguments: monomials grouped by a_j + b_j.
  Polynomial real_restriction() const;

  bool approx_equal(const Polynomial& other, double tol) const;
  std::string to_string() const;

 private:
  void collect();

  int variables_ = 0;
  std::vector<Monomial> terms_;
};

// Potential F: homogeneous of degree p + 1 in (z, conj z).
struct Potential {
  int components = 0;
  int p = 0;
  Polynomial F;
};

// f_k = dF/d(conj z_k) + conj(dF/dz_k), each homogeneous of degree p.
struct Nonlinearity {
  int p = 0;
  std::vector<Polynomial> f;
};

Nonlinearity derive_f(const Potential& potential);
std::vector<cplx> eval_f(const Nonlinearity& nl, std::span<const cplx> z);

// Positive weights making every monomial of F phase invariant, normalized so
// that sigma_1 = 2. Empty when no strictly positive solution exists.
std::optional<std::vector<double>> find_sigma(const Potential& potential);

// Whether Im sum_k w_k f_k(z) conj(z_k) vanishes identically, decided on the
// collected coefficients.
bool weighted_phase_identity(const Nonlinearity& nl, std::span<const double> weights,
                             double tol = 1e-12);
// Largest sampled |Im sum_k w_k f_k conj(z_k)| relative to the sum of moduli.
double sampled_phase_residual(const Nonlinearity& nl, std::span<const double> weights,
                              int samples, std::uint64_t seed);

struct SystemSpec {
  std::string name;
  int dim = 1;
  int components = 0;
  int p = 0;
  std::vector<double> alpha;
  std::vector<double> gamma;
  std::vector<double> beta;
  Potential potential;
  Nonlinearity f;
  std::optional<std::vector<double>> sigma;
};

// Validates coefficients and the potential, derives f and sigma.
SystemSpec make_system(std::string name, int dim, std::vector<double> alpha,
                       std::vector<double> gamma, std::vector<double> beta,
                       const Potential& potential);

bool check_mass_resonance(const SystemSpec& spec, std::uint64_t seed = 42);

SystemSpec parse_spec(std::string_view text, std::string name = "file");
std::string serialize_spec(const SystemSpec& spec);

// Evaluates every component of a nonlinearity (or a single polynomial) at many
// points with a cached power table.
class CompiledPolynomials {
 public:
  CompiledPolynomials() = default;
  explicit CompiledPolynomials(const std::vector<Polynomial>& polys);

  int variables() const { return variables_; }
  int outputs() const { return static_cast<int>(offsets_.size()) - 1; }

  // z has `variables()` entries, out has `outputs()` entries. `scratch` must
  // hold at least scratch_size() values.
  void evaluate(const cplx* z, cplx* out, cplx* scratch) const;
  std::size_t scratch_size() const;

  // Batched form over `count` points with split real and imaginary arrays:
  // in_re[j][i] + i in_im[j][i] is variable j at point i. Faster than calling
  // evaluate() per point.
  void evaluate_batch(const double* const* in_re, const double* const* in_im, double* const* out_re,
                      double* const* out_im, std::size_t count) const;

 private:
  int variables_ = 0;
  int max_power_ = 0;
  std::vector<cplx> coeffs_;
  std::vector<std::uint16_t> factors_;        // indices into the power table
  std::vector<std::size_t> factor_offsets_;   // per term, into factors_
  std::vector<std::size_t> offsets_;
};

}  // namespace nlslab
