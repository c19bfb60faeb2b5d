#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

#include "nlslab/error.hpp"
#include "nlslab/spectral.hpp"

using namespace nlslab;
using std::numbers::pi;

namespace {

Field real_field(const GridSpec& g, double (*fn)(double)) {
  return sample_field(g, [&](const std::array<double, 3>& x) { return cplx(fn(x[0]), 0.0); });
}

double inner_re(const Field& a, const Field& b, const GridSpec& g) {
  RealField d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = (a[i] * std::conj(b[i])).real();
  return integrate(d, g);
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("grid validation") {
    CHECK_NOTHROW(GridSpec{1, 16, 1.0}.validate());
    CHECK_THROWS_AS((GridSpec{1, 8, 1.0}.validate()), SpecError);
    CHECK_THROWS_AS((GridSpec{1, 48, 1.0}.validate()), SpecError);
    CHECK_THROWS_AS((GridSpec{1, 64, 0.0}.validate()), SpecError);
    CHECK_THROWS_AS((GridSpec{4, 64, 1.0}.validate()), SpecError);
    const GridSpec g{1, 16, 2.0};
    CHECK(g.wavenumber(0) == 0.0);
    CHECK(g.wavenumber(8) == doctest::Approx(-8.0 * pi / 2.0));
    CHECK(g.wavenumber(7) == doctest::Approx(7.0 * pi / 2.0));
    CHECK(g.wavenumber(15) == doctest::Approx(-1.0 * pi / 2.0));
    CHECK(g.coordinate(0) == -2.0);
  }

  TEST_CASE("laplacian of a constant vanishes") {
    for (int n = 1; n <= 3; ++n) {
      const GridSpec g{n, 16, 3.0};
      const Field one(g.size(), cplx(1.0));
      CHECK(testing::sup_abs(laplacian(one, g)) < 1e-13);
    }
  }

  TEST_CASE("laplacian of the lowest sine mode") {
    const double L = 7.0;
    const GridSpec g{1, 64, L};
    const Field f = sample_field(g, [&](const auto& x) { return cplx(std::sin(pi * x[0] / L)); });
    const Field lap = laplacian(f, g);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      err = std::max(err, std::abs(lap[i] + (pi / L) * (pi / L) * f[i]));
    }
    CHECK(err < 1e-12);
  }

  TEST_CASE("laplacian of a Gaussian") {
    const GridSpec g{1, 512, 20.0};
    const Field f = real_field(g, [](double x) { return std::exp(-x * x); });
    const Field lap = laplacian(f, g);
    const Field exact = real_field(g, [](double x) { return (4 * x * x - 2) * std::exp(-x * x); });
    CHECK(testing::sup_diff(lap, exact) < 1e-10);
  }

  TEST_CASE("quadrature") {
    for (int n = 1; n <= 3; ++n) {
      const GridSpec g{n, 16, 1.5};
      const RealField one(g.size(), 1.0);
      CHECK(integrate(one, g) == doctest::Approx(std::pow(3.0, n)).epsilon(1e-14));
    }
    const GridSpec g{1, 512, 20.0};
    RealField sech2(g.size()), gauss(g.size());
    for (int i = 0; i < 512; ++i) {
      const double x = g.coordinate(i);
      sech2[i] = 1.0 / (std::cosh(x) * std::cosh(x));
      gauss[i] = std::exp(-x * x);
    }
    CHECK(std::abs(integrate(sech2, g) - 2.0) < 1e-12);
    CHECK(std::abs(integrate(gauss, g) - std::sqrt(pi)) < 1e-12);
  }

  TEST_CASE("gradient energy") {
    const double L = 5.0;
    const GridSpec g{1, 64, L};
    const Field one(g.size(), cplx(1.0));
    CHECK(gradient_norm_sq(one, g) < 1e-24);
    const Field s = sample_field(g, [&](const auto& x) { return cplx(std::sin(pi * x[0] / L)); });
    CHECK(gradient_norm_sq(s, g) == doctest::Approx((pi / L) * (pi / L) * L).epsilon(1e-13));
    const GridSpec g2{1, 1024, 20.0};
    const Field sech = real_field(g2, [](double x) { return std::sqrt(2.0) / std::cosh(x); });
    CHECK(std::abs(gradient_norm_sq(sech, g2) - 4.0 / 3.0) < 1e-10);
  }

  TEST_CASE("derivative along each axis") {
    const GridSpec g{3, 64, 8.0};
    const Field f = sample_field(g, [](const auto& x) { return cplx(std::exp(-x[0] * x[0] - 1.5 * x[1] * x[1] - 0.75 * x[2] * x[2])); });
    const Spectral& sp = spectral_for(g);
    const double rates[3] = {1.0, 1.5, 0.75};
    for (int axis = 0; axis < 3; ++axis) {
      const Field d = sp.derivative(f, axis);
      double err = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = point_of(g, i);
        err = std::max(err, std::abs(d[i] + 2.0 * rates[axis] * x[axis] * f[i]));
      }
      CHECK(err < 1e-10);
    }
  }

  TEST_CASE("shape mismatches are rejected") {
    const GridSpec g{1, 32, 4.0};
    const Field wrong(16);
    CHECK_THROWS_AS(laplacian(wrong, g), SpecError);
    CHECK_THROWS_AS(integrate(RealField(31), g), SpecError);
    FieldState s(g, 2);
    s.components[1].resize(8);
    CHECK_THROWS_AS(s.check_shape(), SpecError);
  }

  TEST_CASE("field files round trip bit for bit") {
    auto gen = testing::rng(7);
    const GridSpec g{2, 16, 3.5};
    FieldState s(g, 2, 0.625);
    for (auto& c : s.components) c = testing::random_bumps(gen, g);
    const auto path = std::filesystem::temp_directory_path() / "nlslab_roundtrip.nlsfld";
    write_field(path.string(), s);
    CHECK(std::filesystem::file_size(path) == 40 + 2 * 256 * 16);
    const FieldState back = read_field(path.string());
    CHECK(back.grid == g);
    CHECK(back.t == 0.625);
    CHECK(back.components == s.components);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_field(path.string()), SpecError);
  }

  TEST_CASE("resampling") {
    const GridSpec g{1, 256, 16.0};
    const Field f = real_field(g, [](double x) { return std::exp(-x * x); });
    CHECK(testing::sup_diff(resample(f, g, g, 1.0), f) < 1e-13);
    for (double scale : {0.5, 2.0}) {
      const Field r = resample(f, g, g, scale);
      const Field exact = sample_field(g, [&](const auto& x) { return cplx(std::exp(-(x[0] / scale) * (x[0] / scale))); });
      CAPTURE(scale);
      CHECK(testing::sup_diff(r, exact) < 1e-10);
    }
  }

  TEST_CASE("property: Parseval on random smooth fields") {
    auto gen = testing::rng(11);
    for (int n = 1; n <= 3; ++n) {
      const GridSpec g{n, n == 3 ? 32 : 64, 8.0};
      const Spectral& sp = spectral_for(g);
      for (int trial = 0; trial < 10; ++trial) {
        Field f = testing::random_bumps(gen, g);
        const double direct = sp.l2_norm_sq(f);
        Field hat = f;
        sp.fft().forward(hat);
        double sum = 0.0;
        for (const auto& v : hat) sum += std::norm(v);
        const double spectral = sum * g.cell_volume() / static_cast<double>(g.size());
        CHECK(testing::rel(spectral, direct) < 1e-12);
        CHECK(testing::rel(sp.gradient_norm_sq_hat(hat), sp.gradient_norm_sq(f)) < 1e-12);
        Field back = hat;
        sp.fft().inverse(back);
        CHECK(testing::sup_diff(back, f) < 1e-13 * (1.0 + testing::sup_abs(f)));
      }
    }
  }

  TEST_CASE("property: laplacian is symmetric and nonpositive") {
    auto gen = testing::rng(12);
    for (int n = 1; n <= 3; ++n) {
      const GridSpec g{n, n == 3 ? 32 : 64, 8.0};
      for (int trial = 0; trial < 10; ++trial) {
        const Field f = testing::random_bumps(gen, g);
        const Field h = testing::random_bumps(gen, g);
        const double a = inner_re(laplacian(f, g), h, g);
        const double b = inner_re(f, laplacian(h, g), g);
        CHECK(std::abs(a - b) < 1e-11 * (1.0 + std::abs(a)));
        CHECK(inner_re(laplacian(f, g), f, g) <= 1e-12);
        CHECK(inner_re(laplacian(f, g), f, g) == doctest::Approx(-gradient_norm_sq(f, g)).epsilon(1e-11));
      }
    }
  }
}
