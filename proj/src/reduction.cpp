#include "dimred/reduction.hpp"

#include <cmath>
#include <sstream>

#include "dimred/errors.hpp"
#include "dimred/io.hpp"
#include "dimred/parallel.hpp"

namespace dimred {

std::vector<ScalingRegime> scaling_ladder(double beta, double c,
                                          const std::vector<double>& L_values) {
  require(beta > 0 && beta < 3.0 / 7.0, "scaling_ladder: beta must lie in (0, 3/7)");
  require(c > 0 && c <= 1.0, "scaling_ladder: c must lie in (0, 1]");
  require(!L_values.empty(), "scaling_ladder: empty L list");
  std::vector<ScalingRegime> out;
  for (std::size_t i = 0; i < L_values.size(); ++i) {
    const double L = L_values[i];
    require(L > 0 && L <= 1, "scaling_ladder: L must lie in (0, 1]");
    require(i == 0 || L < L_values[i - 1], "scaling_ladder: L values must decrease");
    ScalingRegime r{beta, c, L, L * std::pow(c / L, 1.0 / beta)};
    const double back = r.params().c();
    if (std::abs(back - c) > 1e-12 * c) {
      throw NumericalError("scaling_ladder: c not recovered to 1e-12");
    }
    out.push_back(r);
  }
  return out;
}

std::array<int, 2> ReducedDensity::mode(int index) const {
  return {index / retained2 - retained1 / 2, index % retained2 - retained2 / 2};
}

namespace {

void check_window(const TorusGrid& t, int r1, int r2) {
  require(r1 >= 2 && r2 >= 2 && r1 % 2 == 0 && r2 % 2 == 0,
          "reduced density: retained mode counts must be even and positive");
  require(r1 <= t.n1() && r2 <= t.n2(), "reduced density: retained modes exceed the grid");
}

}  // namespace

ReducedDensity reduced_density_x(const ComplexField3D& phi, int retained1, int retained2) {
  const TorusGrid& t = phi.grid().torus();
  check_window(t, retained1, retained2);
  const ComplexField3D s = to_spectral(phi);
  const int nb = retained1 * retained2;
  const int nz = phi.grid().nz();
  ReducedDensity rd{retained1, retained2, {}};
  Eigen::MatrixXcd B(nb, nz);
  for (int b = 0; b < nb; ++b) {
    const auto k = rd.mode(b);
    for (int m = 1; m <= nz; ++m) B(b, m - 1) = s.coefficient(k[0], k[1], m);
  }
  rd.matrix = B * B.adjoint();
  return rd;
}

ReducedDensity projector(const ComplexField2D& u, int retained1, int retained2) {
  check_window(u.grid(), retained1, retained2);
  const ComplexField2D s = to_spectral(u);
  ReducedDensity rd{retained1, retained2, {}};
  const int nb = retained1 * retained2;
  Eigen::VectorXcd v(nb);
  for (int b = 0; b < nb; ++b) {
    const auto k = rd.mode(b);
    v(b) = s.coefficient(k[0], k[1]);
  }
  rd.matrix = v * v.adjoint();
  return rd;
}

double trace_distance(const ReducedDensity& a, const ReducedDensity& b) {
  require(a.retained1 == b.retained1 && a.retained2 == b.retained2 &&
              a.matrix.rows() == b.matrix.rows(),
          "trace_distance: basis mismatch");
  const Eigen::MatrixXcd d = a.matrix - b.matrix;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

void StudyConfig::validate() const {
  require(beta > 0 && beta < 3.0 / 7.0, "study: beta must lie in (0, 3/7)");
  require(c > 0 && c <= 1, "study: c must lie in (0, 1]");
  require(t_final > 0 && dt > 0 && dt <= 0.1 && dt <= t_final, "study: bad time step");
  require(n >= 4 && n % 2 == 0 && nz >= 1, "study: bad grid");
  require(retained >= 2 && retained <= n && retained % 2 == 0, "study: bad retained window");
  require(checkpoints >= 1, "study: checkpoints must be positive");
  require(cgn > 0, "study: a positive GN constant is required for the smallness check");
  require(alpha > 0 && alpha < 1, "study: alpha must lie in (0, 1)");
  require(!comparison_factor || std::isfinite(*comparison_factor), "study: bad comparison factor");
}

ComplexField2D default_initial_profile(const TorusGrid& grid) {
  auto f = ComplexField2D::from_function(grid, [](double x1, double x2) {
    return std::exp(2.0 * (std::cos(x1) + std::cos(x2) - 2.0)) * std::polar(1.0, std::sin(x1));
  });
  const double norm = lp_norm(f, NormKind::L2);
  std::vector<cd> v = f.values();
  for (cd& x : v) x /= norm;
  return ComplexField2D::from_values(grid, std::move(v));
}

namespace {

int checkpoint_steps(double t_final, double dt, int checkpoints) {
  return checkpoints * static_cast<int>(std::ceil(t_final / (checkpoints * dt) * (1.0 - 1e-12)));
}

Trajectory2D run_2d(const ComplexField2D& phi0, double g, const StudyConfig& cfg) {
  Evolution2DConfig c2;
  c2.grid = phi0.grid();
  c2.g0 = g;
  const int steps = checkpoint_steps(cfg.t_final, cfg.dt, cfg.checkpoints);
  c2.dt = cfg.t_final / steps;
  c2.t_final = cfg.t_final;
  c2.record_every = steps / cfg.checkpoints;
  return evolve_2d(phi0, c2);
}

double max_deviation(const std::vector<ConservedQuantities>& q) {
  double d = 0.0;
  for (const auto& x : q) d = std::max(d, std::abs(x.mass - q.front().mass));
  return d;
}

}  // namespace

StudyReport run_convergence_study(const StudyConfig& cfg, const ComplexField2D& phi0) {
  cfg.validate();
  const TorusGrid grid(cfg.n, cfg.n);
  require(phi0.grid() == grid, "study: initial profile grid mismatch");
  StudyReport report;
  report.preamble =
      "One-body Hartree proxy: the ladder tests the confinement limit L -> 0 and the coupling "
      "constant g0. The many-body mean-field step N -> infinity is not simulated.";
  report.admissibility = admissibility_check(cfg.spec, cfg.cgn, cfg.alpha);
  if (!report.admissibility.admissible()) {
    throw ValidationError("study: potential is not admissible: " +
                          to_json(report.admissibility).dump());
  }
  const CouplingEstimate g0 = coupling_constant_g0(cfg.spec, cfg.quad_level);
  report.g0 = g0.value;
  report.g0_error = g0.error;
  const auto ladder = scaling_ladder(cfg.beta, cfg.c, cfg.L_values);

  const Trajectory2D traj2 = run_2d(phi0, g0.value, cfg);
  std::optional<Trajectory2D> comp2;
  if (cfg.comparison_factor) comp2 = run_2d(phi0, *cfg.comparison_factor * g0.value, cfg);
  const double defect2 = max_deviation(traj2.quantities);

  report.rungs.resize(ladder.size());
  parallel_for(ladder.size(), [&](std::size_t r) {
    RungResult& out = report.rungs[r];
    out.regime = ladder[r];
    Evolution3DConfig c3;
    c3.params = ladder[r].params();
    c3.spec = cfg.spec;
    c3.grid = SlabGrid(grid, cfg.nz);
    // Keep the largest transverse phase per step below one radian.
    const double omega = (double(cfg.nz) * cfg.nz - 1.0) / (c3.params.L * c3.params.L);
    const double dt = omega > 0 ? std::min(cfg.dt, 1.0 / omega) : cfg.dt;
    out.steps = checkpoint_steps(cfg.t_final, dt, cfg.checkpoints);
    out.dt = cfg.t_final / out.steps;
    c3.dt = out.dt;
    c3.t_final = cfg.t_final;
    c3.record_every = out.steps / cfg.checkpoints;
    const Trajectory3D traj3 =
        evolve_3d(ComplexField3D::transverse_ground(c3.grid, phi0), c3);
    require(traj3.snapshots.size() == traj2.snapshots.size(), "study: checkpoint mismatch");
    for (std::size_t i = 0; i < traj3.snapshots.size(); ++i) {
      const ReducedDensity g3 = reduced_density_x(traj3.snapshots[i], cfg.retained, cfg.retained);
      out.times.push_back(traj3.times[i]);
      out.distance.push_back(trace_distance(g3, projector(traj2.snapshots[i], cfg.retained,
                                                          cfg.retained)));
      if (comp2) {
        out.comparison_distance.push_back(
            trace_distance(g3, projector(comp2->snapshots[i], cfg.retained, cfg.retained)));
      }
      out.mass3d.push_back(traj3.quantities[i].mass);
      out.energy3d.push_back(traj3.quantities[i].energy);
      out.mass2d.push_back(traj2.quantities[i].mass);
      out.energy2d.push_back(traj2.quantities[i].energy);
    }
    for (double d : out.distance) out.max_distance = std::max(out.max_distance, d);
    for (double d : out.comparison_distance) {
      out.comparison_max_distance = std::max(out.comparison_max_distance, d);
    }
    out.mass_defect = std::max(max_deviation(traj3.quantities), defect2);
    out.mass_ok = out.mass_defect <= cfg.mass_tolerance && !traj3.blown_up;
  });

  report.valid = !traj2.blown_up;
  if (traj2.blown_up) report.invalid_cause = "2D run tripped the blow-up sentinel";
  for (std::size_t r = 0; r < report.rungs.size() && report.valid; ++r) {
    if (!report.rungs[r].mass_ok) {
      report.valid = false;
      std::ostringstream msg;
      msg << "rung " << r << " failed mass conservation (defect "
          << format_double(report.rungs[r].mass_defect) << ")";
      report.invalid_cause = msg.str();
    }
  }
  report.strictly_decreasing = true;
  for (std::size_t r = 1; r < report.rungs.size(); ++r) {
    if (!(report.rungs[r].max_distance < report.rungs[r - 1].max_distance)) {
      report.strictly_decreasing = false;
    }
  }
  const double first = report.rungs.front().max_distance;
  report.final_over_first = first > 0 ? report.rungs.back().max_distance / first : 0.0;
  return report;
}

nlohmann::json to_json(const StudyReport& r) {
  nlohmann::json rungs = nlohmann::json::array();
  for (std::size_t i = 0; i < r.rungs.size(); ++i) {
    const RungResult& x = r.rungs[i];
    nlohmann::json j = {{"rung", i},
                        {"beta", x.regime.beta},
                        {"c", x.regime.c},
                        {"L", x.regime.L},
                        {"N", x.regime.N},
                        {"dt", x.dt},
                        {"steps", x.steps},
                        {"max_distance", x.max_distance},
                        {"mass_defect", x.mass_defect},
                        {"mass_ok", x.mass_ok}};
    if (!x.comparison_distance.empty()) j["comparison_max_distance"] = x.comparison_max_distance;
    rungs.push_back(j);
  }
  return {{"preamble", r.preamble},
          {"g0", r.g0},
          {"g0_error", r.g0_error},
          {"admissibility", to_json(r.admissibility)},
          {"valid", r.valid},
          {"invalid_cause", r.invalid_cause},
          {"strictly_decreasing", r.strictly_decreasing},
          {"final_over_first", r.final_over_first},
          {"rungs", rungs}};
}

std::string study_csv(const StudyReport& r) {
  CsvWriter csv({"rung", "t", "distance", "mass3d", "energy3d", "mass2d", "energy2d"});
  for (std::size_t i = 0; i < r.rungs.size(); ++i) {
    const RungResult& x = r.rungs[i];
    for (std::size_t k = 0; k < x.times.size(); ++k) {
      csv.row({double(i), x.times[k], x.distance[k], x.mass3d[k], x.energy3d[k], x.mass2d[k],
               x.energy2d[k]});
    }
  }
  return csv.str();
}

}  // namespace dimred
