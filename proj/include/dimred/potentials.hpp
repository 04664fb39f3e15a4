// Admissible interaction potentials on the slab, their scaled families and
// the effective 2D coupling constant.
//
// V is built from the smooth compactly supported bump b(t) = exp(1 - 1/(1 - t^2)),
// normalized so b(0) = 1:
//   separable  V(x, z) = A b(|x - x0| / Rx) b(|z| / Rz)
//   radial     V(x, z) = A b(sqrt(|x - x0|^2 / Rx^2 + z^2 / Rz^2))
// x0 is a translation used only for diagnostics; it breaks evenness.
#pragma once

#include <array>
#include <string>

#include <json.hpp>

namespace dimred {

enum class PotentialKind { Zero, Separable, Radial };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::Zero;
  double amplitude = 0.0;
  double radius_x = 0.0;
  double radius_z = 0.0;
  std::array<double, 2> x_shift{0.0, 0.0};

  static PotentialSpec zero() { return {}; }
  static PotentialSpec separable(double amplitude, double radius_x, double radius_z);
  static PotentialSpec radial(double amplitude, double radius_x, double radius_z);

  /// Same shape with amplitude multiplied by `factor`.
  PotentialSpec scaled(double factor) const;

  /// V at an unwrapped point of R^3 (no periodic images).
  double operator()(double x1, double x2, double z) const;
  /// V as a function of rho = |x - x0| and z.
  double radial_profile(double rho, double z) const;
  /// Largest rho with V(rho, z) != 0, zero if the z-slice is empty.
  double support_rho(double z) const;
  double support_z() const { return kind == PotentialKind::Zero ? 0.0 : radius_z; }

  bool operator==(const PotentialSpec&) const = default;
};

double bump(double t);

/// Point (N, L, beta) of the scaling family; s = (N/L)^beta, c = L s.
struct ScaledPotentialParams {
  double N = 1.0;
  double L = 1.0;
  double beta = 0.25;

  double s() const;
  double c() const { return L * s(); }
  /// Scattering-length parameter a = L / N (recorded only).
  double a() const { return L / N; }
  /// Checks ranges; the constraint c <= 1 is enforced unless `allow_supercritical`.
  void validate(bool allow_supercritical = false) const;
};

enum class Frame { Lab, Rescaled };

/// Lab frame: V_{N,L}(r) = s^3 V(s r) for r a difference of points of the
/// slab of width L pi. Rescaled frame: V~(x, z) = L s^3 V(s x, c z) for z in
/// (-pi, pi). Periodic in x (sum over images).
double eval_scaled_potential(const PotentialSpec& spec, const ScaledPotentialParams& params,
                             Frame frame, double x1, double x2, double z);

/// int_{R^2} V(y, z) dy by polar Gauss-Legendre quadrature.
double x_integral(const PotentialSpec& spec, double z);

/// int_{R^2} V(y, z) exp(-i q.y) dy about the shift centre (a Hankel transform).
double x_fourier(const PotentialSpec& spec, double q, double z);

struct NormEstimate {
  double value = 0.0;
  double error = 0.0;
};

/// sup_z int |V(x, z)| dx.
NormEstimate mixed_norm_inf1(const PotentialSpec& spec);
/// Same norm for the scaled family, by quadrature of the scaled function.
NormEstimate mixed_norm_inf1(const PotentialSpec& spec, const ScaledPotentialParams& params,
                             Frame frame);

struct CouplingEstimate {
  double value = 0.0;
  double error = 0.0;
  int level = 0;
};

/// g0 = (4/pi^2) int int (int V(x, z1 - z2) dx) cos^2 z1 cos^2 z2 dz1 dz2.
CouplingEstimate coupling_constant_g0(const PotentialSpec& spec, int quad_level = 6);

/// (4/pi^2) int cos^2(z) cos^2(z - u) dz over the slab overlap.
double transverse_overlap(double u);

struct AdmissibilityReport {
  bool even = false;
  bool nonpositive = false;
  bool compact_support = false;
  bool smooth = false;
  bool small = false;
  double even_defect = 0.0;
  double max_value = 0.0;
  double support_margin = 0.0;
  double spectral_tail = 0.0;
  double mixed_norm = 0.0;
  double threshold = 0.0;
  /// threshold - mixed_norm.
  double smallness_margin = 0.0;

  bool admissible() const { return even && nonpositive && compact_support && smooth && small; }
};

/// Hypothesis check, smallness being ||V|| <= 2 alpha / cgn^4.
AdmissibilityReport admissibility_check(const PotentialSpec& spec, double cgn, double alpha);

/// Shape hypotheses only (no smallness); throws ValidationError when violated.
void require_admissible_shape(const PotentialSpec& spec);

nlohmann::json to_json(const PotentialSpec& spec);
PotentialSpec potential_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AdmissibilityReport& r);

std::string to_string(PotentialKind kind);

}  // namespace dimred
