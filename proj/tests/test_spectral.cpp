#include <doctest.h>

#include <cmath>
#include <random>

#include "dimred/errors.hpp"
#include "dimred/quadrature.hpp"
#include "dimred/spectral.hpp"

using namespace dimred;

namespace {

std::vector<cd> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cd> v(n);
  for (cd& x : v) x = {g(rng), g(rng)};
  return v;
}

}  // namespace

TEST_CASE("torus grid nodes and wavenumbers") {
  const TorusGrid t(8, 6);
  CHECK(t.x1(0) == doctest::Approx(-kPi));
  CHECK(t.x2(3) == doctest::Approx(-kPi + kPi));
  CHECK(t.k1(0) == 0);
  CHECK(t.k1(3) == 3);
  CHECK(t.k1(4) == -4);
  CHECK(t.k1(7) == -1);
  CHECK(t.index1(-1) == 7);
  CHECK_THROWS_AS(TorusGrid(7, 8), ValidationError);
}

TEST_CASE("plane wave has a single unit coefficient") {
  const TorusGrid t(16, 16);
  const auto f = ComplexField2D::from_function(
      t, [](double x1, double x2) { return std::polar(1.0 / (2 * kPi), 3 * x1 - 2 * x2); });
  const auto s = to_spectral(f);
  for (int i1 = 0; i1 < 16; ++i1) {
    for (int i2 = 0; i2 < 16; ++i2) {
      const double expect = t.k1(i1) == 3 && t.k2(i2) == -2 ? 1.0 : 0.0;
      CHECK(std::abs(s.coefficients()[i1 * 16 + i2] - expect) < 1e-13);
    }
  }
  CHECK(lp_norm(f, NormKind::L2) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(quadratic_form(FourierMultiplier::bessel_x(1.0), f) ==
        doctest::Approx(1.0 + 9 + 4).epsilon(1e-12));
}

TEST_CASE("Dirichlet basis functions are orthonormal modes of the slab") {
  const SlabGrid g(TorusGrid(4, 4), 7);
  const auto f = ComplexField3D::from_function(g, [&](double, double, double z) {
    return cd(SlabGrid::basis(3, z) / (2 * kPi));
  });
  const auto s = to_spectral(f);
  for (int m = 1; m <= 7; ++m) {
    CHECK(std::abs(s.coefficient(0, 0, m) - (m == 3 ? 1.0 : 0.0)) < 1e-13);
  }
  CHECK(lp_norm(f, NormKind::L2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transforms round trip and satisfy Parseval") {
  const TorusGrid t(12, 8);
  const auto f = ComplexField2D::from_values(t, random_values(t.size(), 1));
  const auto back = to_physical(ComplexField2D::from_coefficients(t, to_spectral(f).coefficients()));
  double err = 0, c2 = 0, v2 = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    err = std::max(err, std::abs(back.values()[i] - f.values()[i]));
    v2 += std::norm(f.values()[i]) * t.cell_area();
    c2 += std::norm(to_spectral(f).coefficients()[i]);
  }
  CHECK(err < 1e-13);
  CHECK(c2 == doctest::Approx(v2).epsilon(1e-12));

  const SlabGrid g(TorusGrid(8, 8), 5);
  const auto h = ComplexField3D::from_values(g, random_values(g.size(), 2));
  const auto hb = to_physical(ComplexField3D::from_coefficients(g, to_spectral(h).coefficients()));
  double err3 = 0;
  for (std::size_t i = 0; i < g.size(); ++i) err3 = std::max(err3, std::abs(hb.values()[i] - h.values()[i]));
  CHECK(err3 < 1e-13);
}

TEST_CASE("inner product is conjugate-linear in the first slot") {
  const TorusGrid t(8, 8);
  const auto f = ComplexField2D::from_values(t, random_values(t.size(), 3));
  const auto g = ComplexField2D::from_values(t, random_values(t.size(), 4));
  std::vector<cd> fi = f.values();
  for (cd& x : fi) x *= cd(0, 2);
  const cd a = inner_product(ComplexField2D::from_values(t, fi), g);
  const cd b = inner_product(f, g);
  CHECK(std::abs(a - cd(0, -2) * b) < 1e-12 * std::abs(b));
  CHECK(std::abs(inner_product(f, f).imag()) < 1e-12);
}

TEST_CASE("renormalized kinetic symbol vanishes on the transverse ground mode") {
  const double L = 0.25;
  const auto S = FourierMultiplier::renormalized_kinetic(L);
  CHECK(S(0, 0, 1) == doctest::Approx(1.0));
  CHECK(S(1, -2, 1) == doctest::Approx(6.0));
  CHECK(S(1, 0, 2) == doctest::Approx(2.0 + 3.0 / (L * L)));
}

TEST_CASE("Gauss-Legendre rules integrate polynomials of degree 2n-1 exactly") {
  for (int n : {2, 5, 12}) {
    const QuadratureRule& r = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  const QuadratureRule c = composite_rule({-1.0, 0.5, 2.0}, 3, 8);
  CHECK(integrate([](double x) { return std::exp(x); }, c) ==
        doctest::Approx(std::exp(2.0) - std::exp(-1.0)).epsilon(1e-12));
}
