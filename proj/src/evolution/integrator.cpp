#include <cmath>

#include "nlslab/error.hpp"
#include "nlslab/evolution.hpp"

namespace nlslab {

namespace {

inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

SplitStepIntegrator::SplitStepIntegrator(const SystemSpec& spec, const GridSpec& grid)
    : spec_(spec), grid_(grid), f_(spec.f.f) {
  grid.validate();
  if (grid.dim != spec.dim) throw SpecError("grid dimension differs from the system dimension");
  const std::size_t size = grid.size();
  const int N = grid.points;
  tail_mask_.assign(size, 0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t rest = idx;
    bool outer = false;
    for (int a = 0; a < grid.dim; ++a) {
      const int j = static_cast<int>(rest % N);
      rest /= N;
      const int m = j < N / 2 ? j : j - N;
      outer = outer || 3 * std::abs(m) > N;
    }
    tail_mask_[idx] = outer ? 1 : 0;
  }
}

void SplitStepIntegrator::apply_multiplier(std::vector<Field>& hat, double tau) const {
  if (multiplier_.empty() || tau != cached_tau_) {
    const RealField& k2 = spectral_for(grid_).k_squared();
    multiplier_.assign(spec_.components, Field(k2.size()));
    for (int k = 0; k < spec_.components; ++k) {
      const double g = spec_.gamma[k] / spec_.alpha[k];
      const double b = spec_.beta[k] / spec_.alpha[k];
      for (std::size_t i = 0; i < k2.size(); ++i) multiplier_[k][i] = std::polar(1.0, -tau * (g * k2[i] + b));
    }
    cached_tau_ = tau;
  }
  for (int k = 0; k < spec_.components; ++k) {
    Field& h = hat[k];
    const Field& m = multiplier_[k];
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = mul(h[i], m[i]);
  }
}

SplitStepIntegrator::Observation SplitStepIntegrator::observe(const std::vector<Field>& hat) const {
  const Spectral& sp = spectral_for(grid_);
  const RealField& k2 = sp.k_squared();
  Observation obs;
  double total = 0.0;
  double tail = 0.0;
  double K = 0.0;
  for (int k = 0; k < spec_.components; ++k) {
    double grad = 0.0;
    const Field& h = hat[k];
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double m = std::norm(h[i]);
      total += m;
      grad += k2[i] * m;
      if (tail_mask_[i]) tail += m;
    }
    K += spec_.gamma[k] * grad;
  }
  obs.K = K * grid_.cell_volume() / static_cast<double>(grid_.size());
  obs.tail = total > 0.0 ? tail / total : 0.0;
  obs.finite = std::isfinite(obs.K) && std::isfinite(total);
  return obs;
}

SplitStepIntegrator::Observation SplitStepIntegrator::measure(const FieldState& u) const {
  const Spectral& sp = spectral_for(grid_);
  std::vector<Field> hat = u.components;
  for (auto& c : hat) sp.fft().forward(c);
  return observe(hat);
}

void SplitStepIntegrator::linear(FieldState& u, double tau) const {
  const Spectral& sp = spectral_for(grid_);
  for (auto& c : u.components) sp.fft().forward(c);
  apply_multiplier(u.components, tau);
  for (auto& c : u.components) sp.fft().inverse(c);
}

void SplitStepIntegrator::nonlinear(FieldState& u, double tau) const {
  // Classical RK4 for z' = i f(z) / alpha, on blocks of points in split
  // real/imaginary layout.
  constexpr std::size_t kBlock = 64;
  const int l = spec_.components;
  const std::size_t size = grid_.size();
  std::vector<double> buf(static_cast<std::size_t>(l) * kBlock * 8);
  auto slot = [&](int which, int k) { return buf.data() + (static_cast<std::size_t>(which) * l + k) * kBlock; };
  // Slots: 0/1 z0, 2/3 stage argument, 4/5 stage slope, 6/7 accumulated slope.
  std::vector<const double*> in_re(l), in_im(l);
  std::vector<double*> out_re(l), out_im(l);
  for (int k = 0; k < l; ++k) {
    in_re[k] = slot(2, k);
    in_im[k] = slot(3, k);
    out_re[k] = slot(4, k);
    out_im[k] = slot(5, k);
  }
  const double weights[4] = {1.0, 2.0, 2.0, 1.0};
  const double shifts[3] = {0.5 * tau, 0.5 * tau, tau};

  for (std::size_t start = 0; start < size; start += kBlock) {
    const std::size_t m = std::min(kBlock, size - start);
    for (int k = 0; k < l; ++k) {
      const cplx* src = u.components[k].data() + start;
      double* zr = slot(0, k);
      double* zi = slot(1, k);
      double* ar = slot(2, k);
      double* ai = slot(3, k);
      double* sr = slot(6, k);
      double* si = slot(7, k);
      for (std::size_t b = 0; b < m; ++b) {
        zr[b] = ar[b] = src[b].real();
        zi[b] = ai[b] = src[b].imag();
        sr[b] = si[b] = 0.0;
      }
    }
    for (int stage = 0; stage < 4; ++stage) {
      f_.evaluate_batch(in_re.data(), in_im.data(), out_re.data(), out_im.data(), m);
      for (int k = 0; k < l; ++k) {
        const double inv_alpha = 1.0 / spec_.alpha[k];
        double* fr = slot(4, k);
        double* fi = slot(5, k);
        double* sr = slot(6, k);
        double* si = slot(7, k);
        const double w = weights[stage];
        for (std::size_t b = 0; b < m; ++b) {
          const double kr = -fi[b] * inv_alpha;
          const double ki = fr[b] * inv_alpha;
          fr[b] = kr;
          fi[b] = ki;
          sr[b] += w * kr;
          si[b] += w * ki;
        }
        if (stage < 3) {
          const double h = shifts[stage];
          const double* zr = slot(0, k);
          const double* zi = slot(1, k);
          double* ar = slot(2, k);
          double* ai = slot(3, k);
          for (std::size_t b = 0; b < m; ++b) {
            ar[b] = zr[b] + h * fr[b];
            ai[b] = zi[b] + h * fi[b];
          }
        }
      }
    }
    for (int k = 0; k < l; ++k) {
      cplx* dst = u.components[k].data() + start;
      const double* zr = slot(0, k);
      const double* zi = slot(1, k);
      const double* sr = slot(6, k);
      const double* si = slot(7, k);
      for (std::size_t b = 0; b < m; ++b) dst[b] = cplx(zr[b] + tau / 6.0 * sr[b], zi[b] + tau / 6.0 * si[b]);
    }
  }
}

long SplitStepIntegrator::advance(FieldState& u, double dt, long steps, const Monitor& monitor) const {
  if (steps <= 0) return 0;
  if (!(u.grid == grid_) || u.count() != spec_.components) throw SpecError("state does not match the integrator");
  const Spectral& sp = spectral_for(grid_);
  const double half = 0.5 * dt;
  const double t0 = u.t;
  for (auto& c : u.components) sp.fft().forward(c);
  apply_multiplier(u.components, half);
  long taken = 0;
  for (long s = 0; s < steps; ++s) {
    for (auto& c : u.components) sp.fft().inverse(c);
    nonlinear(u, dt);
    for (auto& c : u.components) sp.fft().forward(c);
    apply_multiplier(u.components, half);
    ++taken;
    u.t = t0 + static_cast<double>(taken) * dt;
    const Observation obs = observe(u.components);
    if (!obs.finite) break;
    if (monitor && !monitor(u.t, obs)) break;
    if (s + 1 < steps) apply_multiplier(u.components, half);
  }
  for (auto& c : u.components) sp.fft().inverse(c);
  return taken;
}

FieldState step(const FieldState& u, double dt, const SystemSpec& spec) {
  FieldState out = u;
  SplitStepIntegrator(spec, u.grid).step(out, dt);
  return out;
}

}  // namespace nlslab
