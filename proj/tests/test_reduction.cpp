#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dimred/errors.hpp"
#include "dimred/reduction.hpp"

using namespace dimred;

TEST_CASE("scaling ladder") {
  const auto ladder = scaling_ladder(0.25, 0.9, {0.5, 0.25, 0.125});
  REQUIRE(ladder.size() == 3);
  for (const auto& r : ladder) {
    CHECK(r.params().c() == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(r.N == doctest::Approx(r.L * std::pow(0.9 / r.L, 4.0)));
  }
  CHECK(ladder[2].N > ladder[1].N);
  CHECK_THROWS_AS(scaling_ladder(0.25, 0.9, {0.25, 0.5}), ValidationError);
  CHECK_THROWS_AS(scaling_ladder(0.5, 0.9, {0.5}), ValidationError);
  CHECK_THROWS_AS(scaling_ladder(0.25, 1.2, {0.5}), ValidationError);
}

TEST_CASE("reduced density of a factorized state is the projector") {
  const TorusGrid t(16, 16);
  const auto u = default_initial_profile(t);
  const auto phi = ComplexField3D::transverse_ground(SlabGrid(t, 6), u);
  const ReducedDensity g = reduced_density_x(phi, 8, 8);
  const ReducedDensity p = projector(u, 8, 8);
  CHECK(trace_distance(g, p) < 1e-13);
  CHECK(trace_distance(p, p) == 0.0);
  CHECK(p.trace() <= 1.0 + 1e-12);
  CHECK(projector(u, 16, 16).trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("orthogonal projectors are at trace distance 2") {
  const TorusGrid t(8, 8);
  auto mode = [&](int k) {
    return ComplexField2D::from_function(t, [&](double x1, double) { return std::polar(1 / (2 * kPi), k * x1); });
  };
  CHECK(trace_distance(projector(mode(1), 8, 8), projector(mode(2), 8, 8)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(projector(mode(1), 8, 8).mode(0)[0] == -4);
}

TEST_CASE("short convergence study") {
  StudyConfig s;
  s.spec = PotentialSpec::separable(-1.0, kPi / 2, kPi / 4);
  s.cgn = 0.6182621952369058;
  s.L_values = {0.5, 0.25};
  s.t_final = 0.1;
  s.dt = 5e-3;
  s.n = 16;
  s.retained = 8;
  s.checkpoints = 2;
  s.comparison_factor = 2.0;
  const StudyReport r = run_convergence_study(s, default_initial_profile(TorusGrid(16, 16)));
  CHECK(r.valid);
  REQUIRE(r.rungs.size() == 2);
  CHECK(r.rungs[0].times.size() == 3);
  CHECK(r.rungs[0].distance.front() < 1e-12);
  CHECK(r.g0 == doctest::Approx(-1.329776479990563).epsilon(1e-10));
  const auto j = to_json(r);
  CHECK(j.at("rungs").size() == 2);
  CHECK(j.at("rungs")[0].contains("comparison_max_distance"));
  std::istringstream csv(study_csv(r));
  int lines = 0;
  for (std::string line; std::getline(csv, line);) ++lines;
  CHECK(lines == 1 + 2 * 3);

  StudyConfig bad = s;
  bad.spec = s.spec.scaled(20.0);
  CHECK_THROWS_AS(run_convergence_study(bad, default_initial_profile(TorusGrid(16, 16))),
                  ValidationError);
}
