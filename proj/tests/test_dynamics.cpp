#include <doctest.h>

#include <cmath>

#include "dimred/dynamics.hpp"
#include "dimred/errors.hpp"
#include "dimred/reduction.hpp"

using namespace dimred;

namespace {

const PotentialSpec kRef = PotentialSpec::separable(-1.0, kPi / 2, kPi / 4);

double max_abs_diff(const std::vector<cd>& a, const std::vector<cd>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Evolution3DConfig slab_config(const PotentialSpec& spec, double L) {
  Evolution3DConfig c;
  c.params = scaling_ladder(0.25, 0.9, {L})[0].params();
  c.spec = spec;
  c.grid = SlabGrid(TorusGrid(16, 16), 8);
  c.dt = 1e-3;
  c.t_final = 0.1;
  c.record_every = 10;
  return c;
}

}  // namespace

TEST_CASE("2D plane wave picks up the exact phase") {
  const TorusGrid t(16, 16);
  const double g0 = 1.7, amp = 0.4;
  Evolution2DConfig c;
  c.grid = t;
  c.g0 = g0;
  c.dt = 1e-2;
  c.t_final = 0.5;
  c.record_every = 50;
  auto wave = [&](double time) {
    const double omega = 2.0 + g0 * amp * amp;
    return ComplexField2D::from_function(
        t, [&](double x1, double x2) { return std::polar(amp, x1 - x2 - omega * time); });
  };
  const Trajectory2D r = evolve_2d(wave(0), c);
  CHECK(r.steps == 50);
  CHECK(max_abs_diff(to_physical(r.snapshots.back()).values(), wave(0.5).values()) < 1e-12);
}

TEST_CASE("2D steps are time reversible and unitary") {
  const TorusGrid t(32, 32);
  Evolution2DConfig c;
  c.grid = t;
  c.g0 = -2.9;
  const auto phi = default_initial_profile(t);
  Integrator2D integ(c);
  const auto there = integ.step(phi, 1e-2);
  const auto back = integ.step(there, -1e-2);
  CHECK(max_abs_diff(to_physical(back).values(), phi.values()) < 1e-12);
  CHECK(integ.conserved(there).mass == doctest::Approx(integ.conserved(phi).mass).epsilon(1e-13));
}

TEST_CASE("2D energy error is second order") {
  const TorusGrid t(32, 32);
  Evolution2DConfig c;
  c.grid = t;
  c.g0 = -2.9;
  c.t_final = 0.5;
  c.record_every = 1 << 20;
  auto drift = [&](double dt) {
    c.dt = dt;
    const Trajectory2D r = evolve_2d(default_initial_profile(t), c);
    return std::abs(r.quantities.back().energy - r.quantities.front().energy);
  };
  const double ratio = drift(4e-3) / drift(2e-3);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("free 3D flow factorizes") {
  Evolution3DConfig c = slab_config(PotentialSpec::zero(), 0.5);
  const TorusGrid& t = c.grid.torus();
  const auto u = default_initial_profile(t);
  const Trajectory3D r = evolve_3d(ComplexField3D::transverse_ground(c.grid, u), c);
  Evolution2DConfig c2;
  c2.grid = t;
  c2.dt = c.dt;
  c2.t_final = c.t_final;
  const auto u_t = evolve_2d(u, c2).snapshots.back();
  CHECK(trace_distance(reduced_density_x(r.snapshots.back()), projector(u_t)) < 1e-12);
}

TEST_CASE("3D interacting flow conserves mass and energy") {
  Evolution3DConfig c = slab_config(kRef.scaled(2.0), 0.25);
  const auto phi0 = ComplexField3D::transverse_ground(c.grid, default_initial_profile(c.grid.torus()));
  const Trajectory3D r = evolve_3d(phi0, c);
  CHECK_FALSE(r.blown_up);
  for (const auto& q : r.quantities) {
    CHECK(q.mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.energy == doctest::Approx(r.quantities[0].energy).epsilon(1e-4));
  }
}

TEST_CASE("gauges differ by a global phase only") {
  Evolution3DConfig c = slab_config(kRef, 0.5);
  const auto phi0 = ComplexField3D::transverse_ground(c.grid, default_initial_profile(c.grid.torus()));
  const auto a = evolve_3d(phi0, c).snapshots.back();
  c.gauge = Gauge::Lab;
  const auto b = evolve_3d(phi0, c).snapshots.back();
  CHECK(trace_distance(reduced_density_x(a), reduced_density_x(b)) < 1e-12);
  const cd overlap = inner_product(a, b);
  CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("blow-up sentinel stops the run") {
  const TorusGrid t(16, 16);
  Evolution2DConfig c;
  c.grid = t;
  c.g0 = -40.0;
  c.t_final = 0.5;
  c.blowup_factor = 1.01;
  const Trajectory2D r = evolve_2d(default_initial_profile(t), c);
  CHECK(r.blown_up);
  CHECK(r.blowup_time > 0);
  CHECK(r.times.back() == doctest::Approx(r.blowup_time));
}

TEST_CASE("configuration validation") {
  Evolution2DConfig c;
  c.dt = 0.5;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.dt = 1e-3;
  c.t_final = -1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  Evolution3DConfig d;
  d.params = {1.0, 1.5, 0.25};
  CHECK_THROWS_AS(d.validate(), ValidationError);
  CHECK(to_json(Evolution3DConfig{}).contains("gauge"));
}

TEST_CASE("ground-state energy") {
  // Without interaction the x-constant transverse ground state has energy 1.
  Evolution3DConfig c = slab_config(PotentialSpec::zero(), 0.5);
  const MinimizeResult free = minimize_energy(c, 50);
  CHECK(free.e_min == doctest::Approx(1.0).epsilon(1e-12));
  const double cgn = 0.6182621952369058;
  c.spec = kRef;
  const MinimizeResult m = minimize_energy(c, 300, cgn);
  REQUIRE(m.upper_bound);
  CHECK(*m.upper_bound == doctest::Approx(1.0 + std::pow(cgn, 4) * mixed_norm_inf1(kRef).value / 2));
  CHECK(m.e_min <= 1.0);
  CHECK(m.e_min >= -1e-6);
}
