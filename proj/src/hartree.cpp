#include "dimred/hartree.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "dimred/errors.hpp"
#include "dimred/quadrature.hpp"

namespace dimred {

double cosine_cardinal(int j, int nz, double w) {
  const int M = nz + 1;
  const double wj = j * kPi / M;
  double s = 0.5;
  for (int p = 1; p < M; ++p) s += std::cos(p * wj) * std::cos(p * w);
  s += 0.5 * std::cos(M * wj) * std::cos(M * w);
  return 2.0 * s / M;
}

std::vector<double> density(const ComplexField3D& phi) {
  const ComplexField3D p = to_physical(phi);
  std::vector<double> rho(p.values().size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(p.values()[i]);
  return rho;
}

namespace {

// A(u)[j][j'] = int C_j(w) C_j'(w - u) dw over the overlap of [0, pi] and [u, pi + u].
Eigen::MatrixXd cardinal_overlap(int nz, double u) {
  const double a = std::max(0.0, u);
  const double b = std::min(kPi, kPi + u);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nz, nz);
  if (b <= a) return A;
  const int order = 2 * (nz + 1) + 16;
  const QuadratureRule& g = gauss_legendre(order);
  Eigen::MatrixXd left(nz, order), right(nz, order);
  Eigen::VectorXd wts(order);
  for (int q = 0; q < order; ++q) {
    const double w = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[q];
    wts(q) = 0.5 * (b - a) * g.weights[q];
    for (int j = 0; j < nz; ++j) {
      left(j, q) = cosine_cardinal(j + 1, nz, w);
      right(j, q) = cosine_cardinal(j + 1, nz, w - u);
    }
  }
  return left * wts.asDiagonal() * right.transpose();
}

}  // namespace

HartreeOperator::HartreeOperator(const SlabGrid& grid, const PotentialSpec& spec,
                                 const ScaledPotentialParams& params, bool dealias)
    : grid_(grid), dealias_(dealias) {
  params.validate();
  const TorusGrid& t = grid.torus();
  trivial_ = spec.kind == PotentialKind::Zero || spec.amplitude == 0.0;
  if (trivial_) return;
  require(spec.x_shift[0] == 0 && spec.x_shift[1] == 0, "hartree: shifted potentials unsupported");
  require(spec.radius_x > 0 && spec.radius_z > 0, "hartree: radii must be positive");
  const double s = params.s();
  const double c = params.c();
  if (spec.radius_x / s >= kPi) {
    std::ostringstream msg;
    msg << "hartree: scaled x-support " << spec.radius_x / s
        << " does not fit the torus; need (N/L)^beta > " << spec.radius_x / kPi;
    throw ValidationError(msg.str());
  }
  const double zsupport = spec.radius_z / c;
  if (2.0 * grid.dz() > zsupport) {
    const int need = static_cast<int>(std::ceil(2.0 * kPi / zsupport)) - 1;
    std::ostringstream msg;
    msg << "hartree: z-grid too coarse for the kernel support " << zsupport << "; use nz >= "
        << need;
    throw ValidationError(msg.str());
  }

  const int nz = grid.nz();
  const double U = std::min(zsupport, kPi);
  const QuadratureRule urule = composite_rule({-U, 0.0, U}, 16, 12);
  std::vector<Eigen::MatrixXd> overlap;
  overlap.reserve(urule.nodes.size());
  for (double u : urule.nodes) overlap.push_back(cardinal_overlap(nz, u));

  shell_of_mode_.assign(t.size(), -1);
  std::map<long, int> shell_index;
  for (int i1 = 0; i1 < t.n1(); ++i1) {
    for (int i2 = 0; i2 < t.n2(); ++i2) {
      const int k1 = t.k1(i1), k2 = t.k2(i2);
      if (dealias && (3 * std::abs(k1) > t.n1() || 3 * std::abs(k2) > t.n2())) continue;
      const long key = long(k1) * k1 + long(k2) * k2;
      auto it = shell_index.find(key);
      if (it == shell_index.end()) {
        const double q = std::sqrt(double(key)) / s;
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nz, nz);
        for (std::size_t n = 0; n < urule.nodes.size(); ++n) {
          const double K = c * x_fourier(spec, q, c * urule.nodes[n]);
          if (K != 0.0) G += urule.weights[n] * K * overlap[n];
        }
        shells_.push_back(0.5 * (G + G.transpose()));
        it = shell_index.emplace(key, int(shells_.size()) - 1).first;
      }
      shell_of_mode_[i1 * t.n2() + i2] = it->second;
    }
  }
}

const Eigen::MatrixXd& HartreeOperator::shell_matrix(int k1, int k2) const {
  const TorusGrid& t = grid_.torus();
  const int i1 = t.index1(k1), i2 = t.index2(k2);
  require(!trivial_ && i1 >= 0 && i2 >= 0 && shell_of_mode_[i1 * t.n2() + i2] >= 0,
          "hartree: mode not retained");
  return shells_[shell_of_mode_[i1 * t.n2() + i2]];
}

std::vector<double> HartreeOperator::potential(const std::vector<double>& rho) const {
  require(rho.size() == grid_.size(), "hartree: density size does not match grid");
  std::vector<double> W(grid_.size(), 0.0);
  if (trivial_) return W;
  const TorusGrid& t = grid_.torus();
  const std::size_t plane = t.size();
  const int nz = grid_.nz();
  std::vector<cd> coef(grid_.size()), buf(plane);
  for (int j = 0; j < nz; ++j) {
    for (std::size_t i = 0; i < plane; ++i) buf[i] = rho[j * plane + i];
    fft::values_to_coefficients(t, buf, std::span(coef).subspan(j * plane, plane));
  }
  std::vector<cd> out(grid_.size());
  Eigen::VectorXcd r(nz);
  const double inv_dz = 1.0 / grid_.dz();
  for (std::size_t i = 0; i < plane; ++i) {
    const int sh = shell_of_mode_[i];
    if (sh < 0) continue;
    for (int j = 0; j < nz; ++j) r(j) = coef[j * plane + i];
    const Eigen::VectorXcd w = shells_[sh] * r;
    for (int j = 0; j < nz; ++j) out[j * plane + i] = w(j) * inv_dz;
  }
  for (int j = 0; j < nz; ++j) {
    fft::coefficients_to_values(t, std::span(out).subspan(j * plane, plane), buf);
    for (std::size_t i = 0; i < plane; ++i) W[j * plane + i] = buf[i].real();
  }
  return W;
}

double HartreeOperator::interaction_energy(const std::vector<double>& rho,
                                           const std::vector<double>& W) const {
  require(rho.size() == W.size() && rho.size() == grid_.size(), "hartree: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += rho[i] * W[i];
  return 0.5 * s * grid_.cell_volume();
}

std::vector<double> hartree_potential(const ComplexField3D& phi, const PotentialSpec& spec,
                                      const ScaledPotentialParams& params, bool dealias) {
  const HartreeOperator op(phi.grid(), spec, params, dealias);
  return op.potential(density(phi));
}

}  // namespace dimred
