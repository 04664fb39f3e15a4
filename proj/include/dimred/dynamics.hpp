// Split-step integrators for the 2D periodic cubic NLS
//   i d_t phi = -Delta phi + g0 |phi|^2 phi
// and for the confined Hartree proxy on the slab (rescaled frame)
//   i d_t phi = (-Delta_x - d_z^2 / L^2 - 1 / L^2) phi + (V~ * |phi|^2) phi.
// Both use Strang splitting with exact kinetic phases and an exact pointwise
// nonlinear phase; every substep is unitary.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "dimred/hartree.hpp"
#include "dimred/potentials.hpp"
#include "dimred/spectral.hpp"

namespace dimred {

struct ConservedQuantities {
  double mass = 0.0;
  double energy = 0.0;
};

struct Evolution2DConfig {
  double g0 = 0.0;
  double dt = 1e-3;
  double t_final = 1.0;
  TorusGrid grid{32, 32};
  int record_every = 1;
  bool dealias = true;
  /// Stop when ||grad phi|| exceeds this multiple of its reference scale.
  double blowup_factor = 1e6;

  void validate() const;
};

enum class Gauge { Renormalized, Lab };

struct Evolution3DConfig {
  ScaledPotentialParams params;
  PotentialSpec spec;
  double dt = 1e-3;
  double t_final = 1.0;
  SlabGrid grid{TorusGrid{32, 32}, 8};
  Gauge gauge = Gauge::Renormalized;
  int record_every = 1;
  bool dealias = true;
  double blowup_factor = 1e6;

  void validate() const;
};

template <class Field>
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<ConservedQuantities> quantities;
  std::vector<Field> snapshots;
  int steps = 0;
  /// t_final / steps; the step actually used.
  double dt_effective = 0.0;
  bool blown_up = false;
  double blowup_time = 0.0;
};

using Trajectory2D = TrajectoryRecord<ComplexField2D>;
using Trajectory3D = TrajectoryRecord<ComplexField3D>;

class Integrator2D {
 public:
  explicit Integrator2D(const Evolution2DConfig& cfg);

  /// One Strang step of length dt (may be negative, for time reversal).
  ComplexField2D step(const ComplexField2D& phi, double dt) const;
  ConservedQuantities conserved(const ComplexField2D& phi) const;
  /// De-aliased density P|phi|^2 at the grid nodes.
  std::vector<double> filtered_density(const std::vector<cd>& values) const;

  const Evolution2DConfig& config() const { return cfg_; }

 private:
  Evolution2DConfig cfg_;
  std::vector<double> k2_;
  std::vector<char> keep_;
};

class Integrator3D {
 public:
  explicit Integrator3D(const Evolution3DConfig& cfg);

  ComplexField3D step(const ComplexField3D& phi, double dt) const;
  /// Mass and energy <S~^2 phi, phi> + 1/2 int W |phi|^2.
  ConservedQuantities conserved(const ComplexField3D& phi) const;
  const HartreeOperator& hartree() const { return *hartree_; }
  const Evolution3DConfig& config() const { return cfg_; }
  /// Kinetic symbol of the generator for mode (k, m) in the chosen gauge.
  double generator_symbol(int k1, int k2, int m) const;

 private:
  Evolution3DConfig cfg_;
  std::shared_ptr<const HartreeOperator> hartree_;
  std::vector<double> symbol_;
};

/// One Strang step with cfg.dt.
ComplexField2D step_2d(const ComplexField2D& phi, const Evolution2DConfig& cfg);
ComplexField3D step_3d(const ComplexField3D& phi, const Evolution3DConfig& cfg);

/// Fixed-step evolution to t_final with ceil(t_final / dt) steps. Records
/// quantities and a snapshot every record_every steps and at the end.
Trajectory2D evolve_2d(const ComplexField2D& phi0, const Evolution2DConfig& cfg);
Trajectory3D evolve_3d(const ComplexField3D& phi0, const Evolution3DConfig& cfg);

ConservedQuantities conserved_2d(const ComplexField2D& phi, double g0, bool dealias = true);

struct MinimizeResult {
  double e_min = 0.0;
  ComplexField3D minimizer =
      ComplexField3D::from_coefficients(SlabGrid(TorusGrid(4, 4), 1), std::vector<cd>(16));
  int iterations = 0;
  bool converged = false;
  /// Upper end of the energy window, 1 + cgn^4 ||V|| / 2, when cgn was given.
  std::optional<double> upper_bound;
};

/// Normalized imaginary-time flow on the 3D energy, started from the
/// transverse ground state with constant x-profile unless `initial` is given.
MinimizeResult minimize_energy(const Evolution3DConfig& cfg, int iterations,
                               std::optional<double> cgn = std::nullopt,
                               const std::optional<ComplexField3D>& initial = std::nullopt);

nlohmann::json to_json(const Evolution2DConfig& cfg);
nlohmann::json to_json(const Evolution3DConfig& cfg);

}  // namespace dimred
