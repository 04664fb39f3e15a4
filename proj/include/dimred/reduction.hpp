// Scaling ladder and the 3D -> 2D convergence study: the z-traced one-body
// density of the confined Hartree proxy is compared in trace norm with the
// projector onto the 2D cubic NLS solution with coupling g0.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dimred/dynamics.hpp"
#include "dimred/potentials.hpp"
#include "dimred/spectral.hpp"

namespace dimred {

struct ScalingRegime {
  double beta = 0.25;
  double c = 1.0;
  double L = 1.0;
  double N = 1.0;

  ScaledPotentialParams params() const { return {N, L, beta}; }
};

/// N = L (c / L)^{1 / beta} for each L; L values must be in (0, 1] and decreasing.
std::vector<ScalingRegime> scaling_ladder(double beta, double c, const std::vector<double>& L_values);

/// Hermitian PSD matrix over a centred window of x-modes,
/// k_i in [-r_i / 2, r_i / 2 - 1], ordered row-major as (k1, k2).
struct ReducedDensity {
  int retained1 = 0;
  int retained2 = 0;
  Eigen::MatrixXcd matrix;

  std::array<int, 2> mode(int index) const;
  double trace() const { return matrix.trace().real(); }
};

/// gamma_x[k][k'] = sum_m phi(k, m) conj(phi(k', m)).
ReducedDensity reduced_density_x(const ComplexField3D& phi, int retained1 = 16, int retained2 = 16);
/// |u><u| restricted to the same window.
ReducedDensity projector(const ComplexField2D& u, int retained1 = 16, int retained2 = 16);

/// Sum of |eigenvalues| of a - b.
double trace_distance(const ReducedDensity& a, const ReducedDensity& b);

struct StudyConfig {
  double beta = 0.25;
  double c = 0.9;
  std::vector<double> L_values{0.5, 0.25, 0.125, 0.0625};
  PotentialSpec spec;
  double t_final = 1.0;
  double dt = 1e-3;
  int n = 32;
  int nz = 8;
  int retained = 16;
  int checkpoints = 20;
  int quad_level = 6;
  /// GN constant used for the smallness check.
  double cgn = 0.0;
  double alpha = 0.9;
  /// If set, the 2D side is also run with this multiple of g0.
  std::optional<double> comparison_factor;
  double mass_tolerance = 1e-10;

  void validate() const;
};

struct RungResult {
  ScalingRegime regime;
  double dt = 0.0;
  int steps = 0;
  std::vector<double> times;
  std::vector<double> distance;
  std::vector<double> mass3d, energy3d, mass2d, energy2d;
  double max_distance = 0.0;
  double mass_defect = 0.0;
  bool mass_ok = false;
  std::vector<double> comparison_distance;
  double comparison_max_distance = 0.0;
};

struct StudyReport {
  std::vector<RungResult> rungs;
  double g0 = 0.0;
  double g0_error = 0.0;
  AdmissibilityReport admissibility;
  bool valid = false;
  std::string invalid_cause;
  bool strictly_decreasing = false;
  double final_over_first = 0.0;
  std::string preamble;
};

/// exp(2 (cos x1 + cos x2 - 2)) exp(i sin x1), normalized.
ComplexField2D default_initial_profile(const TorusGrid& grid);

StudyReport run_convergence_study(const StudyConfig& cfg, const ComplexField2D& phi0);

nlohmann::json to_json(const StudyReport& r);
/// Columns: rung, t, distance, mass3d, energy3d, mass2d, energy2d.
std::string study_csv(const StudyReport& r);

}  // namespace dimred
