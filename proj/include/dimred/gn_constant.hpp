// Numerical estimate of the sharp constant in the inhomogeneous
// Gagliardo-Nirenberg inequality on T^2,
//   ||f||_4 <= C ||f||_2^{1/2} ||(1 - Delta)^{1/2} f||_2^{1/2}.
#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "dimred/spectral.hpp"

namespace dimred {

/// R(f) = ||f||_4 / (||f||_2^{1/2} ||(1 - Delta)^{1/2} f||_2^{1/2}). The L^4
/// norm is evaluated exactly for the band-limited field (padded grid).
double gn_ratio(const ComplexField2D& f);

struct GnOptions {
  int modes = 16;
  int restarts = 4;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int max_iterations = 4000;
};

struct GnEstimate {
  double cgn = 0.0;
  ComplexField2D maximizer = ComplexField2D::from_coefficients(TorusGrid(4, 4), std::vector<cd>(16));
  int restarts_used = 0;
  /// Dual-Sobolev norm sqrt(sum |g_k|^2 / (1 + |k|^2)) of the gradient of R^4.
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
  int best_restart = -1;
  /// Largest ratio seen among all fields evaluated during the run.
  double running_max = 0.0;
};

/// Preconditioned gradient ascent on R^4 from one starting field.
GnEstimate ascend_gn_ratio(const ComplexField2D& initial, const GnOptions& options);

/// Best of `restarts` ascents: the constant field, a centred bump, then
/// random band-limited fields drawn from `seed`. Restarts run in parallel.
GnEstimate estimate_cgn(const GnOptions& options);

/// Random band-limited field with Gaussian coefficients damped by exp(-|k|^2 / k0^2).
ComplexField2D random_band_limited_field(const TorusGrid& grid, std::uint64_t seed, double k0);

nlohmann::json to_json(const GnEstimate& e, const GnOptions& options);

}  // namespace dimred
