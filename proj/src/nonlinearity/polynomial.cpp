#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlslab/error.hpp"
#include "nlslab/nonlinearity.hpp"

namespace nlslab {

namespace {

template <class T>
std::complex<T> ipow(std::complex<T> z, int e) {
  std::complex<T> r(1);
  for (int i = 0; i < e; ++i) r *= z;
  return r;
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

int Monomial::degree() const {
  int d = 0;
  for (const auto& e : exps) d += e.z + e.zbar;
  return d;
}

cplx Monomial::evaluate(std::span<const cplx> z) const {
  cplx v = coeff;
  for (std::size_t j = 0; j < exps.size(); ++j) {
    v *= ipow(z[j], exps[j].z) * ipow(std::conj(z[j]), exps[j].zbar);
  }
  return v;
}

double Monomial::abs_evaluate(std::span<const cplx> z) const {
  double v = std::abs(coeff);
  for (std::size_t j = 0; j < exps.size(); ++j) v *= ipow(std::abs(z[j]), exps[j].z + exps[j].zbar);
  return v;
}

Polynomial::Polynomial(int variables) : variables_(variables) {}

Polynomial::Polynomial(int variables, std::vector<Monomial> terms)
    : variables_(variables), terms_(std::move(terms)) {
  for (const auto& m : terms_) {
    if (static_cast<int>(m.exps.size()) != variables_) {
      throw SpecError("monomial has " + std::to_string(m.exps.size()) + " exponent pairs, expected " +
                      std::to_string(variables_));
    }
    for (const auto& e : m.exps) {
      if (e.z < 0 || e.zbar < 0) throw SpecError("negative exponent in monomial");
    }
  }
  collect();
}

void Polynomial::collect() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Monomial& a, const Monomial& b) { return a.exps < b.exps; });
  std::vector<Monomial> merged;
  for (auto& m : terms_) {
    if (!merged.empty() && merged.back().exps == m.exps) {
      merged.back().coeff += m.coeff;
    } else {
      merged.push_back(std::move(m));
    }
  }
  double scale = 0.0;
  for (const auto& m : merged) scale = std::max(scale, std::abs(m.coeff));
  std::erase_if(merged, [scale](const Monomial& m) {
    return m.coeff == cplx(0.0) || std::abs(m.coeff) <= 1e-15 * scale;
  });
  terms_ = std::move(merged);
}

cplx Polynomial::evaluate(std::span<const cplx> z) const {
  cplx v = 0.0;
  for (const auto& m : terms_) v += m.evaluate(z);
  return v;
}

double Polynomial::abs_evaluate(std::span<const cplx> z) const {
  double v = 0.0;
  for (const auto& m : terms_) v += m.abs_evaluate(z);
  return v;
}

template <class Real>
std::complex<Real> Polynomial::evaluate_real(std::span<const Real> x) const {
  std::complex<Real> v(0);
  for (const auto& m : terms_) {
    Real prod(1);
    for (std::size_t j = 0; j < m.exps.size(); ++j) {
      for (int e = 0; e < m.exps[j].z + m.exps[j].zbar; ++e) prod *= x[j];
    }
    v += std::complex<Real>(static_cast<Real>(m.coeff.real()), static_cast<Real>(m.coeff.imag())) *
         prod;
  }
  return v;
}

template std::complex<double> Polynomial::evaluate_real<double>(std::span<const double>) const;
template std::complex<long double> Polynomial::evaluate_real<long double>(
    std::span<const long double>) const;

std::optional<int> Polynomial::homogeneous_degree() const {
  if (terms_.empty()) return std::nullopt;
  const int d = terms_.front().degree();
  for (const auto& m : terms_) {
    if (m.degree() != d) return std::nullopt;
  }
  return d;
}

int Polynomial::max_degree() const {
  int d = 0;
  for (const auto& m : terms_) d = std::max(d, m.degree());
  return d;
}

Polynomial Polynomial::d_dz(int k) const {
  std::vector<Monomial> out;
  for (const auto& m : terms_) {
    if (m.exps[k].z == 0) continue;
    Monomial d = m;
    d.coeff *= static_cast<double>(m.exps[k].z);
    d.exps[k].z -= 1;
    out.push_back(std::move(d));
  }
  return Polynomial(variables_, std::move(out));
}

Polynomial Polynomial::d_dzbar(int k) const {
  std::vector<Monomial> out;
  for (const auto& m : terms_) {
    if (m.exps[k].zbar == 0) continue;
    Monomial d = m;
    d.coeff *= static_cast<double>(m.exps[k].zbar);
    d.exps[k].zbar -= 1;
    out.push_back(std::move(d));
  }
  return Polynomial(variables_, std::move(out));
}

Polynomial Polynomial::conjugate() const {
  std::vector<Monomial> out;
  out.reserve(terms_.size());
  for (const auto& m : terms_) {
    Monomial c;
    c.coeff = std::conj(m.coeff);
    for (const auto& e : m.exps) c.exps.push_back({e.zbar, e.z});
    out.push_back(std::move(c));
  }
  return Polynomial(variables_, std::move(out));
}

Polynomial Polynomial::times_zbar(int k) const {
  std::vector<Monomial> out = terms_;
  for (auto& m : out) m.exps[k].zbar += 1;
  return Polynomial(variables_, std::move(out));
}

Polynomial Polynomial::scaled(cplx factor) const {
  std::vector<Monomial> out = terms_;
  for (auto& m : out) m.coeff *= factor;
  return Polynomial(variables_, std::move(out));
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  if (variables_ != other.variables_) throw SpecError("polynomial variable count mismatch");
  std::vector<Monomial> out = terms_;
  out.insert(out.end(), other.terms_.begin(), other.terms_.end());
  return Polynomial(variables_, std::move(out));
}

Polynomial Polynomial::real_restriction() const {
  std::vector<Monomial> out = terms_;
  for (auto& m : out) {
    for (auto& e : m.exps) e = {e.z + e.zbar, 0};
  }
  return Polynomial(variables_, std::move(out));
}

bool Polynomial::approx_equal(const Polynomial& other, double tol) const {
  if (variables_ != other.variables_) return false;
  // Walk both sorted term lists; a term missing on one side counts as zero.
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < terms_.size() || j < other.terms_.size()) {
    if (j == other.terms_.size() ||
        (i < terms_.size() && terms_[i].exps < other.terms_[j].exps)) {
      if (std::abs(terms_[i].coeff) > tol) return false;
      ++i;
    } else if (i == terms_.size() || other.terms_[j].exps < terms_[i].exps) {
      if (std::abs(other.terms_[j].coeff) > tol) return false;
      ++j;
    } else {
      if (std::abs(terms_[i].coeff - other.terms_[j].coeff) > tol) return false;
      ++i;
      ++j;
    }
  }
  return true;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& m : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << m.coeff.real() << (m.coeff.imag() < 0 ? "-" : "+") << std::abs(m.coeff.imag())
       << "i)";
    for (std::size_t j = 0; j < m.exps.size(); ++j) {
      if (m.exps[j].z > 0) os << " z" << j + 1 << "^" << m.exps[j].z;
      if (m.exps[j].zbar > 0) os << " zb" << j + 1 << "^" << m.exps[j].zbar;
    }
  }
  return os.str();
}

Nonlinearity derive_f(const Potential& potential) {
  Nonlinearity nl;
  nl.p = potential.p;
  for (int k = 0; k < potential.components; ++k) {
    nl.f.push_back(potential.F.d_dzbar(k) + potential.F.d_dz(k).conjugate());
  }
  return nl;
}

std::vector<cplx> eval_f(const Nonlinearity& nl, std::span<const cplx> z) {
  if (!nl.f.empty() && z.size() != static_cast<std::size_t>(nl.f.front().variables())) {
    throw SpecError("eval_f: expected " + std::to_string(nl.f.front().variables()) +
                    " components, got " + std::to_string(z.size()));
  }
  std::vector<cplx> out;
  out.reserve(nl.f.size());
  for (const auto& fk : nl.f) out.push_back(fk.evaluate(z));
  return out;
}

namespace {

// Complex product without the NaN recovery of operator*.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

CompiledPolynomials::CompiledPolynomials(const std::vector<Polynomial>& polys) {
  offsets_.push_back(0);
  factor_offsets_.push_back(0);
  for (const auto& poly : polys) {
    variables_ = std::max(variables_, poly.variables());
    for (const auto& m : poly.terms()) {
      for (const auto& e : m.exps) max_power_ = std::max({max_power_, e.z, e.zbar});
    }
  }
  const int stride = 2 * (max_power_ + 1);
  for (const auto& poly : polys) {
    for (const auto& m : poly.terms()) {
      coeffs_.push_back(m.coeff);
      for (std::size_t j = 0; j < m.exps.size(); ++j) {
        const int base = static_cast<int>(j) * stride;
        if (m.exps[j].z > 0) factors_.push_back(static_cast<std::uint16_t>(base + m.exps[j].z));
        if (m.exps[j].zbar > 0) {
          factors_.push_back(static_cast<std::uint16_t>(base + max_power_ + 1 + m.exps[j].zbar));
        }
      }
      factor_offsets_.push_back(factors_.size());
    }
    offsets_.push_back(coeffs_.size());
  }
}

std::size_t CompiledPolynomials::scratch_size() const {
  return static_cast<std::size_t>(variables_) * 2 * (max_power_ + 1);
}

void CompiledPolynomials::evaluate(const cplx* z, cplx* out, cplx* table) const {
  const int stride = 2 * (max_power_ + 1);
  for (int j = 0; j < variables_; ++j) {
    cplx* zp = table + j * stride;
    cplx* zb = zp + max_power_ + 1;
    zp[0] = 1.0;
    zb[0] = 1.0;
    const cplx zj = z[j];
    const cplx zjb = std::conj(zj);
    for (int e = 1; e <= max_power_; ++e) {
      zp[e] = mul(zp[e - 1], zj);
      zb[e] = mul(zb[e - 1], zjb);
    }
  }
  const int n_out = outputs();
  for (int k = 0; k < n_out; ++k) {
    cplx acc = 0.0;
    for (std::size_t t = offsets_[k]; t < offsets_[k + 1]; ++t) {
      cplx v = coeffs_[t];
      for (std::size_t f = factor_offsets_[t]; f < factor_offsets_[t + 1]; ++f) v = mul(v, table[factors_[f]]);
      acc += v;
    }
    out[k] = acc;
  }
}

void CompiledPolynomials::evaluate_batch(const double* const* in_re, const double* const* in_im,
                                         double* const* out_re, double* const* out_im, std::size_t count) const {
  constexpr std::size_t kBlock = 64;
  const int stride = 2 * (max_power_ + 1);
  const int half = max_power_ + 1;
  thread_local std::vector<double> table_re;
  thread_local std::vector<double> table_im;
  table_re.resize(static_cast<std::size_t>(variables_) * stride * kBlock);
  table_im.resize(table_re.size());
  double v_re[kBlock];
  double v_im[kBlock];

  for (std::size_t start = 0; start < count; start += kBlock) {
    const std::size_t m = std::min(kBlock, count - start);
    for (int j = 0; j < variables_; ++j) {
      const double* zr = in_re[j] + start;
      const double* zi = in_im[j] + start;
      double* pr = table_re.data() + static_cast<std::size_t>(j) * stride * kBlock;
      double* pi = table_im.data() + static_cast<std::size_t>(j) * stride * kBlock;
      for (std::size_t b = 0; b < m; ++b) {
        pr[b] = 1.0;
        pi[b] = 0.0;
      }
      for (int e = 1; e <= max_power_; ++e) {
        double* cr = pr + e * kBlock;
        double* ci = pi + e * kBlock;
        const double* qr = pr + (e - 1) * kBlock;
        const double* qi = pi + (e - 1) * kBlock;
        for (std::size_t b = 0; b < m; ++b) {
          cr[b] = qr[b] * zr[b] - qi[b] * zi[b];
          ci[b] = qr[b] * zi[b] + qi[b] * zr[b];
        }
      }
      // Conjugate powers occupy the second half of the variable's slot.
      for (int e = 0; e <= max_power_; ++e) {
        const double* sr = pr + e * kBlock;
        const double* si = pi + e * kBlock;
        double* cr = pr + (half + e) * kBlock;
        double* ci = pi + (half + e) * kBlock;
        for (std::size_t b = 0; b < m; ++b) {
          cr[b] = sr[b];
          ci[b] = -si[b];
        }
      }
    }
    const int n_out = outputs();
    for (int k = 0; k < n_out; ++k) {
      double* orr = out_re[k] + start;
      double* oi = out_im[k] + start;
      for (std::size_t b = 0; b < m; ++b) {
        orr[b] = 0.0;
        oi[b] = 0.0;
      }
      for (std::size_t t = offsets_[k]; t < offsets_[k + 1]; ++t) {
        const double c_re = coeffs_[t].real();
        const double c_im = coeffs_[t].imag();
        for (std::size_t b = 0; b < m; ++b) {
          v_re[b] = c_re;
          v_im[b] = c_im;
        }
        for (std::size_t f = factor_offsets_[t]; f < factor_offsets_[t + 1]; ++f) {
          const std::size_t idx = factors_[f];
          const std::size_t var = idx / stride;
          const std::size_t slot = idx % stride;
          const double* __restrict fr = table_re.data() + (var * stride + slot) * kBlock;
          const double* __restrict fi = table_im.data() + (var * stride + slot) * kBlock;
          double* __restrict vr = v_re;
          double* __restrict vi = v_im;
          for (std::size_t b = 0; b < m; ++b) {
            const double r = vr[b] * fr[b] - vi[b] * fi[b];
            vi[b] = vr[b] * fi[b] + vi[b] * fr[b];
            vr[b] = r;
          }
        }
        for (std::size_t b = 0; b < m; ++b) {
          orr[b] += v_re[b];
          oi[b] += v_im[b];
        }
      }
    }
  }
}

}  // namespace nlslab
