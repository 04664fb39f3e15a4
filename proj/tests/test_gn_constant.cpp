#include <doctest.h>

#include <cmath>

#include "dimred/gn_constant.hpp"

using namespace dimred;

namespace {

ComplexField2D transform(const ComplexField2D& f, int shift1, int shift2, cd phase, bool conjugate) {
  const TorusGrid& t = f.grid();
  std::vector<cd> v(t.size());
  for (int i1 = 0; i1 < t.n1(); ++i1) {
    for (int i2 = 0; i2 < t.n2(); ++i2) {
      cd x = f.values()[((i1 + shift1) % t.n1()) * t.n2() + (i2 + shift2) % t.n2()];
      v[i1 * t.n2() + i2] = phase * (conjugate ? std::conj(x) : x);
    }
  }
  return ComplexField2D::from_values(t, v);
}

}  // namespace

TEST_CASE("constant field attains (2 pi)^(-1/2)") {
  const TorusGrid t(16, 16);
  const auto f = ComplexField2D::from_function(t, [](double, double) { return cd(0.3, -0.1); });
  CHECK(gn_ratio(f) == doctest::Approx(1.0 / std::sqrt(2 * kPi)).epsilon(1e-13));
}

TEST_CASE("ratio is invariant under translation, phase, conjugation and scaling") {
  const TorusGrid t(16, 16);
  // Drop the Nyquist modes, which conjugation does not map onto the grid.
  std::vector<cd> c = to_spectral(random_band_limited_field(t, 5, 2.0)).coefficients();
  for (int i = 0; i < 16; ++i) c[8 * 16 + i] = c[i * 16 + 8] = 0.0;
  const auto f = to_physical(ComplexField2D::from_coefficients(t, c));
  const double r = gn_ratio(f);
  CHECK(gn_ratio(transform(f, 3, 7, 1.0, false)) == doctest::Approx(r).epsilon(1e-12));
  CHECK(gn_ratio(transform(f, 0, 0, std::polar(1.0, 0.7), false)) == doctest::Approx(r).epsilon(1e-12));
  CHECK(gn_ratio(transform(f, 0, 0, 1.0, true)) == doctest::Approx(r).epsilon(1e-12));
  CHECK(gn_ratio(transform(f, 0, 0, 4.0, false)) == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("estimate dominates the constant field and random samples") {
  GnOptions o;
  o.seed = 3;
  const GnEstimate e = estimate_cgn(o);
  CHECK(e.converged);
  CHECK(e.cgn >= 1.0 / std::sqrt(2 * kPi) - 1e-9);
  CHECK(e.residual <= o.tol);
  CHECK(e.running_max >= e.cgn - 1e-12);
  CHECK(gn_ratio(e.maximizer) == doctest::Approx(e.cgn).epsilon(1e-10));
  for (std::uint64_t s = 0; s < 50; ++s) {
    CHECK(gn_ratio(random_band_limited_field(TorusGrid(16, 16), 100 + s, 1.0 + s % 3)) <= e.cgn);
  }
}

TEST_CASE("estimate is deterministic for a fixed seed") {
  GnOptions o;
  o.seed = 9;
  o.restarts = 3;
  const GnEstimate a = estimate_cgn(o);
  const GnEstimate b = estimate_cgn(o);
  CHECK(to_json(a, o).dump() == to_json(b, o).dump());
  CHECK(to_json(a, o).contains("cgn"));
  CHECK(to_json(a, o).contains("residual"));
}
