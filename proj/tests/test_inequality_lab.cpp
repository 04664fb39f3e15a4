#include <doctest.h>

#include <cmath>

#include "dimred/errors.hpp"
#include "dimred/inequality_lab.hpp"
#include "dimred/reduction.hpp"

using namespace dimred;

namespace {

const PotentialSpec kRef = PotentialSpec::separable(-1.0, kPi / 2, kPi / 4);

ScaledPotentialParams regime(double c, double L) { return scaling_ladder(0.25, c, {L})[0].params(); }

ComplexField3D scaled_field(const ComplexField3D& f, double a) {
  std::vector<cd> c = to_spectral(f).coefficients();
  for (cd& x : c) x *= a;
  return ComplexField3D::from_coefficients(f.grid(), c);
}

}  // namespace

TEST_CASE("kinetic energy of the root density: product states with real profile are sharp") {
  // u = 1 + 0.3 cos x (unnormalized coefficients at k = -2..2).
  const std::vector<cd> u = {0.0, 0.15, 1.0, 0.15, 0.0};
  double n = 0;
  for (cd x : u) n += std::norm(x);
  std::vector<cd> unit = u;
  for (cd& x : unit) x /= std::sqrt(n);
  for (int particles : {2, 3}) {
    const InequalitySides s = hoffman_ostenhof_sides(product_state(unit, particles, 1, 2));
    CHECK(s.lhs == doctest::Approx(s.rhs).epsilon(1e-12));
    CHECK(s.rhs > 0);
  }
}

TEST_CASE("kinetic energy of the root density: a pure phase has a flat density") {
  const std::vector<cd> wave = {0.0, 0.0, 0.0, 1.0, 0.0};
  const InequalitySides s = hoffman_ostenhof_sides(product_state(wave, 2, 1, 2));
  CHECK(s.lhs == doctest::Approx(0.0));
  CHECK(s.rhs == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("kinetic energy of the root density: random states") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const CheckInstance c = hoffman_ostenhof_check(2 + seed % 2, 1 + seed / 4, seed);
    CHECK(c.passed);
    CHECK(c.margin >= 0);
  }
  // Refining the trapezoid grid does not change the exact polynomial integrand.
  const ManyBodyState psi = random_many_body_state(2, 2, 4);
  CHECK(hoffman_ostenhof_sides(psi, 64).lhs ==
        doctest::Approx(hoffman_ostenhof_sides(psi, 128).lhs).epsilon(1e-6));
}

TEST_CASE("pair interaction") {
  const SlabGrid g(TorusGrid(16, 16), 6);
  const auto p = regime(0.9, 0.5);
  const ComplexField3D phi = random_slab_field(g, 2);
  const double e = pair_interaction(phi, kRef, p);
  CHECK(e < 0);
  SUBCASE("panel count does not matter") {
    CHECK(pair_interaction(phi, kRef, p, 32) == doctest::Approx(e).epsilon(1e-10));
  }
  SUBCASE("cached operator agrees") {
    const PairInteraction op(g, kRef, p);
    CHECK(op(phi) == doctest::Approx(e).epsilon(1e-14));
  }
  SUBCASE("linear in the potential, quartic in the field") {
    CHECK(pair_interaction(phi, kRef.scaled(3.0), p) == doctest::Approx(3 * e).epsilon(1e-12));
    CHECK(pair_interaction(scaled_field(phi, 2.0), kRef, p) == doctest::Approx(16 * e).epsilon(1e-12));
  }
  CHECK(pair_interaction(phi, PotentialSpec::zero(), p) == 0.0);
}

TEST_CASE("interaction against kinetic energy") {
  const double cgn = 0.6182621952369058;
  const auto p = regime(0.9, 0.25);
  const CheckInstance prod = interaction_estimate_check(kRef, p, TrialState::Product, 0, cgn);
  CHECK(prod.passed);
  const CheckInstance rnd = interaction_estimate_check(kRef, p, TrialState::Random, 5, cgn);
  CHECK(rnd.passed);
  CHECK(rnd.margin > 0);
}

TEST_CASE("pair sums of a potential with nonnegative Fourier data") {
  const PositiveSymbolPotential V = random_positive_symbol_potential(3);
  CHECK(V.symbol_nonnegative());
  CHECK(V.value(0.4, -0.2, 0.1) == doctest::Approx(V.value(-0.4, 0.2, -0.1)).epsilon(1e-13));
  const std::vector<Point3> one = {{0.3, -1.0, 0.2}};
  SUBCASE("a single particle") {
    const FourierBoundTerms t = fourier_bound_terms(one, V, EtaSpec{});
    CHECK(t.pair_sum == 0.0);
    CHECK(fourier_lower_bound_check(one, V, EtaSpec{}).passed);
  }
  SUBCASE("no smearing leaves the diagonal term") {
    const std::vector<Point3> pts = {{0.3, -1.0, 0.2}, {-2.0, 0.5, -0.4}, {1.0, 1.0, 0.0}};
    EtaSpec eta;
    eta.scale = 0.0;
    const FourierBoundTerms t = fourier_bound_terms(pts, V, eta);
    CHECK(t.one_body == 0.0);
    CHECK(t.self_energy == 0.0);
    CHECK(t.diagonal == doctest::Approx(1.5 * V.value(0, 0, 0)).epsilon(1e-13));
    CHECK(t.pair_sum >= t.rhs());
  }
  SUBCASE("sign-changing data is rejected") {
    PositiveSymbolPotential W = V;
    W.weights[0] = -1.0;
    const CheckInstance c = fourier_lower_bound_check(one, W, EtaSpec{});
    CHECK(c.rejected);
    CHECK_FALSE(c.passed);
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(fourier_lower_bound_check(5, EtaSpec{}, seed).passed);
  }
}

TEST_CASE("operator ratios") {
  const SlabGrid g(TorusGrid(16, 16), 6);
  const ComplexField3D phi = random_slab_field(g, 1);
  const auto p = regime(0.9, 0.5);
  for (OperatorBound which : {OperatorBound::Bilinear, OperatorBound::OneBody}) {
    const double r = operator_ratio(which, phi, kRef, p);
    CHECK(r > 0);
    CHECK(operator_ratio(which, scaled_field(phi, 3.0), kRef, p) == doctest::Approx(r).epsilon(1e-12));
  }
  CHECK(operator_bound_ratio(OperatorBound::Bilinear, kRef, 0.25, 0.9, {0.5, 0.25, 0.125}, 0).passed);
}

TEST_CASE("scalar interpolation") {
  for (double alpha : {0.1, 0.5, 0.9}) {
    for (double eta : {0.1, 0.5, 0.9}) {
      CHECK(scalar_interpolation_check(alpha, eta).passed);
      // Equality at the tangency point lambda = eta^{1 / (1 - alpha)}.
      const double lambda = std::pow(eta, 1 / (1 - alpha));
      CHECK(std::abs(scalar_interpolation_margin(alpha, eta, lambda)) < 1e-12 * (1 + lambda));
    }
  }
  double worst = 0;
  for (double alpha : {0.2, 0.8}) {
    for (double eta : {0.5, 2.0}) {
      for (double l = 1e-3; l < 1e3; l *= 1.5) worst = std::min(worst, swapped_interpolation_margin(alpha, eta, l));
    }
  }
  CHECK(worst < 0);
  CHECK(scalar_interpolation_sample(17).passed);
}

TEST_CASE("approximation of the identity") {
  const auto rho = PotentialSpec::radial(1.0, kPi / 2, kPi / 4);
  const TorusGrid t(16, 16);
  const auto j = ComplexField2D::from_function(t, [](double x1, double x2) { return cd(std::cos(x1) + 0.5 * std::sin(x2)); });
  SUBCASE("x-constant profiles see no discrepancy") {
    const auto f = ComplexField2D::from_function(t, [](double, double) { return cd(1 / (2 * kPi)); });
    CHECK(std::abs(approx_identity_term(rho, f, j, 0.25, 1.0)) < 1e-14);
    CHECK(approx_identity_rate(rho, f, j, {0.25, 0.125}, {0.5, 0.9}, 0.5).passed);
  }
  SUBCASE("the modulus shrinks as lambda approaches one") {
    CHECK(rho_l1_modulus(rho, 1.0) == doctest::Approx(0.0));
    CHECK(rho_l1_modulus(rho, 0.99) < rho_l1_modulus(rho, 0.9));
  }
  const auto checks = run_suite("approx-identity", SuiteOptions{});
  REQUIRE(checks.size() == 1);
  CHECK(checks[0].passed);
}

TEST_CASE("scaling identity") {
  const auto p = regime(0.9, 0.5);
  const ScalingIdentity id = scaling_identity(kRef, p, BumpProfiles{});
  CHECK(id.interaction_scaled == doctest::Approx(id.interaction_unscaled).epsilon(1e-8));
  CHECK(id.kinetic_terms == doctest::Approx(id.kinetic_closed).epsilon(1e-8));
  CHECK(id.interaction_scaled < 0);
  const ScalingIdentity finer = scaling_identity(kRef, p, BumpProfiles{}, 16);
  CHECK(finer.interaction_scaled == doctest::Approx(finer.interaction_unscaled).epsilon(1e-8));
  CHECK(finer.interaction_scaled == doctest::Approx(id.interaction_scaled).epsilon(1e-3));
  const ScaledPotentialParams wide{0.5 * std::pow(0.5 / 0.5, 4.0) * 1.0, 0.5, 0.25};
  CHECK_THROWS_AS(scaling_identity(kRef, wide, BumpProfiles{1.0, 1.0}), ValidationError);
}

TEST_CASE("suites") {
  CHECK_THROWS_AS(run_suite("no-such-suite", SuiteOptions{}), ValidationError);
  SuiteOptions o;
  o.samples = 20;
  o.seed = 42;
  const auto a = run_suite("hoffman-ostenhof", o);
  const auto b = run_suite("hoffman-ostenhof", o);
  CHECK(a.size() == 20);
  CHECK(to_json(a).dump() == to_json(b).dump());
  const SuiteSummary s = summarize(a);
  CHECK(s.total == 20);
  CHECK(s.all_passed());
  CHECK(suite_table(a).find("hoffman-ostenhof") != std::string::npos);
  const auto sc = run_suite("scalar-interpolation", o);
  CHECK(summarize(sc).passed == 20);
}
