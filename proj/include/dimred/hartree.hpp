// Mean-field potential W = V~ * |phi|^2 on the slab: periodic convolution in
// x, linear convolution in z.
//
// In x the convolution is diagonal on Fourier modes with the exact kernel
// transform K_k(u) = c Vhat(|k| / s, c u). In z the density is represented by
// its cosine interpolant through the interior nodes and the zero wall values
// (exact for products of Dirichlet modes up to the grid band). The discrete
// interaction energy is the exact continuum energy of that interpolant, so
//   E_int = 1/2 sum_k rho_k^* G_k rho_k,   W_j = (G_k rho_k)_j / dz,
// with G_k[j][j'] = int int C_j(w) K_k(w - w') C_j'(w') dw dw'. This keeps the
// dynamics Hamiltonian (symmetric G) and the nonlinear substep exact.
#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "dimred/potentials.hpp"
#include "dimred/spectral.hpp"

namespace dimred {

class HartreeOperator {
 public:
  /// `dealias` zeroes density modes with |k_i| > n_i / 3 before convolving.
  HartreeOperator(const SlabGrid& grid, const PotentialSpec& spec,
                  const ScaledPotentialParams& params, bool dealias = true);

  /// W at the physical nodes for the density rho (physical samples, size grid.size()).
  std::vector<double> potential(const std::vector<double>& rho) const;
  /// 1/2 int W rho for a density and its potential.
  double interaction_energy(const std::vector<double>& rho, const std::vector<double>& W) const;

  const SlabGrid& grid() const { return grid_; }
  bool trivial() const { return trivial_; }
  bool dealias() const { return dealias_; }
  /// Symmetric z-matrix for the x-mode (k1, k2).
  const Eigen::MatrixXd& shell_matrix(int k1, int k2) const;

 private:
  SlabGrid grid_;
  bool dealias_;
  bool trivial_ = false;
  std::vector<int> shell_of_mode_;  // index into shells_, -1 when filtered out
  std::vector<Eigen::MatrixXd> shells_;
};

/// One-shot W for a field, with de-aliasing.
std::vector<double> hartree_potential(const ComplexField3D& phi, const PotentialSpec& spec,
                                      const ScaledPotentialParams& params, bool dealias = true);

/// Cosine cardinal function through w_j = j pi / (nz + 1) with zero wall
/// values, j = 1..nz, at w in [0, pi].
double cosine_cardinal(int j, int nz, double w);

/// |phi|^2 at the physical nodes.
std::vector<double> density(const ComplexField3D& phi);

}  // namespace dimred
