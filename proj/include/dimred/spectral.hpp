// Grids, spectral fields and Fourier-multiplier operators on the torus
// T^2 = (-pi, pi)^2 and on the slab T^2 x (-pi/2, pi/2).
//
// Conventions
//   x-basis  e_k(x) = exp(i k.x) / (2 pi),               k in Z^2
//   z-basis  e_m(z) = sqrt(2/pi) sin(m (z + pi/2)),       m = 1..nz
// Both are orthonormal, so coefficients are <f, basis> and Parseval holds
// without bookkeeping factors. Physical samples live at
//   x_j = -pi + 2 pi j / n     (j = 0..n-1)
//   z_j = -pi/2 + j pi/(nz+1)  (j = 1..nz, the interior DST-I nodes)
// Array layout is row-major: 2D index i1 * n2 + i2, 3D index
// (m or z-node) * n1 * n2 + 2D index. Mode indices follow FFT order.
#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dimred {

using cd = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

class TorusGrid {
 public:
  TorusGrid(int n1, int n2);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::size_t size() const { return static_cast<std::size_t>(n1_) * n2_; }
  double dx1() const { return 2.0 * kPi / n1_; }
  double dx2() const { return 2.0 * kPi / n2_; }
  /// Quadrature weight of one grid cell.
  double cell_area() const { return dx1() * dx2(); }
  double x1(int i) const { return -kPi + i * dx1(); }
  double x2(int i) const { return -kPi + i * dx2(); }

  /// Signed wavenumber of FFT index `index` on an n-point grid.
  static int wavenumber(int index, int n) { return index < n / 2 ? index : index - n; }
  int k1(int i) const { return wavenumber(i, n1_); }
  int k2(int i) const { return wavenumber(i, n2_); }
  /// FFT index of a signed wavenumber, or -1 if it is not representable.
  int index1(int k) const;
  int index2(int k) const;

  bool operator==(const TorusGrid&) const = default;

 private:
  int n1_;
  int n2_;
};

class SlabGrid {
 public:
  SlabGrid(TorusGrid torus, int nz);

  const TorusGrid& torus() const { return torus_; }
  int nz() const { return nz_; }
  std::size_t size() const { return torus_.size() * nz_; }
  /// z-node spacing pi/(nz+1); also the z quadrature weight.
  double dz() const { return kPi / (nz_ + 1); }
  /// Interior node j = 0..nz-1 (the (j+1)-th DST-I node).
  double z(int j) const { return -kPi / 2 + (j + 1) * dz(); }
  double cell_volume() const { return torus_.cell_area() * dz(); }

  /// Dirichlet eigenfunction e_m(z), eigenvalue m^2.
  static double basis(int m, double z);

  bool operator==(const SlabGrid&) const = default;

 private:
  TorusGrid torus_;
  int nz_;
};

/// One-body wave function on T^2. Holds physical samples, Fourier
/// coefficients, or both; to_spectral / to_physical populate the missing side.
class ComplexField2D {
 public:
  static ComplexField2D from_values(const TorusGrid& grid, std::vector<cd> values);
  static ComplexField2D from_coefficients(const TorusGrid& grid, std::vector<cd> coefficients);
  static ComplexField2D from_function(const TorusGrid& grid,
                                      const std::function<cd(double, double)>& f);

  const TorusGrid& grid() const { return grid_; }
  bool has_values() const { return !values_.empty(); }
  bool has_coefficients() const { return !coefficients_.empty(); }
  const std::vector<cd>& values() const;
  const std::vector<cd>& coefficients() const;
  /// Coefficient of the signed mode (k1, k2); zero if not representable.
  cd coefficient(int k1, int k2) const;

 private:
  ComplexField2D(TorusGrid grid, std::vector<cd> values, std::vector<cd> coefficients)
      : grid_(grid), values_(std::move(values)), coefficients_(std::move(coefficients)) {}
  friend ComplexField2D to_spectral(const ComplexField2D&);
  friend ComplexField2D to_physical(const ComplexField2D&);

  TorusGrid grid_;
  std::vector<cd> values_;
  std::vector<cd> coefficients_;
};

/// One-body wave function on the slab, coefficients indexed by
/// (Dirichlet mode m, Fourier mode k).
class ComplexField3D {
 public:
  static ComplexField3D from_values(const SlabGrid& grid, std::vector<cd> values);
  static ComplexField3D from_coefficients(const SlabGrid& grid, std::vector<cd> coefficients);
  static ComplexField3D from_function(const SlabGrid& grid,
                                      const std::function<cd(double, double, double)>& f);
  /// u(x) e_1(z) for a 2D profile u.
  static ComplexField3D transverse_ground(const SlabGrid& grid, const ComplexField2D& profile);

  const SlabGrid& grid() const { return grid_; }
  bool has_values() const { return !values_.empty(); }
  bool has_coefficients() const { return !coefficients_.empty(); }
  const std::vector<cd>& values() const;
  const std::vector<cd>& coefficients() const;
  cd coefficient(int k1, int k2, int m) const;

 private:
  ComplexField3D(SlabGrid grid, std::vector<cd> values, std::vector<cd> coefficients)
      : grid_(grid), values_(std::move(values)), coefficients_(std::move(coefficients)) {}
  friend ComplexField3D to_spectral(const ComplexField3D&);
  friend ComplexField3D to_physical(const ComplexField3D&);

  SlabGrid grid_;
  std::vector<cd> values_;
  std::vector<cd> coefficients_;
};

ComplexField2D to_spectral(const ComplexField2D& f);
ComplexField3D to_spectral(const ComplexField3D& f);
ComplexField2D to_physical(const ComplexField2D& f);
ComplexField3D to_physical(const ComplexField3D& f);

/// Real symbol acting diagonally on (k1, k2, m); m = 0 for x-only fields.
class FourierMultiplier {
 public:
  using Symbol = std::function<double(int k1, int k2, int m)>;

  FourierMultiplier(Symbol symbol, std::string name);

  double operator()(int k1, int k2, int m) const { return symbol_(k1, k2, m); }
  const std::string& name() const { return name_; }

  static FourierMultiplier identity();
  /// (1 - Delta_x)^power.
  static FourierMultiplier bessel_x(double power);
  /// S~^2 = 1 - Delta_x - d_z^2 / L^2 - 1 / L^2.
  static FourierMultiplier renormalized_kinetic(double L);
  /// Tabulated symbol for one fixed grid (n1, n2, nz); nz = 0 for 2D.
  static FourierMultiplier tabulated(int n1, int n2, int nz, std::vector<double> table);

  /// Grid shape a tabulated symbol was built for; zero when unrestricted.
  int required_n1() const { return n1_; }
  int required_n2() const { return n2_; }
  int required_nz() const { return nz_; }

 private:
  Symbol symbol_;
  std::string name_;
  int n1_ = 0;
  int n2_ = 0;
  int nz_ = 0;
};

ComplexField2D apply_multiplier(const FourierMultiplier& m, const ComplexField2D& f);
ComplexField3D apply_multiplier(const FourierMultiplier& m, const ComplexField3D& f);

enum class NormKind { L2, L4, MixedZInfX1 };

/// Quadrature approximation of the named norm from physical samples.
double lp_norm(const ComplexField2D& f, NormKind kind);
double lp_norm(const ComplexField3D& f, NormKind kind);

/// <f, g>, conjugate-linear in f.
cd inner_product(const ComplexField2D& f, const ComplexField2D& g);
cd inner_product(const ComplexField3D& f, const ComplexField3D& g);

/// Quadratic form <m f, f> (real for real symbols).
double quadratic_form(const FourierMultiplier& m, const ComplexField2D& f);
double quadratic_form(const FourierMultiplier& m, const ComplexField3D& f);

namespace fft {

/// Unnormalized in-place 2D DFT, sign -1 (forward) or +1 (backward).
void dft2(std::span<cd> data, int n1, int n2, int sign);
/// Orthonormal DST-I along the slowest axis of an (nz x plane) complex
/// array, in place. The transform is its own inverse.
void dst1(std::span<cd> data, int nz, std::size_t plane);

/// Orthonormal coefficients from samples on a torus grid and back.
void values_to_coefficients(const TorusGrid& grid, std::span<const cd> values, std::span<cd> out);
void coefficients_to_values(const TorusGrid& grid, std::span<const cd> coefficients,
                            std::span<cd> out);

}  // namespace fft

}  // namespace dimred
