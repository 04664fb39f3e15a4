#include "dimred/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "dimred/errors.hpp"

namespace dimred {

namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is. Plans are
// built once under a lock and then shared.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan dft2_plan(int n1, int n2, int sign) {
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard lock(plan_mutex());
  auto key = std::make_tuple(n1, n2, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<cd> scratch(static_cast<std::size_t>(n1) * n2);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_2d(n1, n2, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan) throw NumericalError("fftw: failed to plan 2D transform");
  cache.emplace(key, plan);
  return plan;
}

fftw_plan dst1_plan(int nz, std::size_t plane) {
  static std::map<std::pair<int, std::size_t>, fftw_plan> cache;
  std::lock_guard lock(plan_mutex());
  auto key = std::make_pair(nz, plane);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  // Real and imaginary parts are transformed as independent real sequences.
  const int howmany = static_cast<int>(2 * plane);
  std::vector<double> scratch(static_cast<std::size_t>(howmany) * nz);
  int n[] = {nz};
  fftw_r2r_kind kind[] = {FFTW_RODFT00};
  fftw_plan plan = fftw_plan_many_r2r(1, n, howmany, scratch.data(), nullptr, howmany, 1,
                                      scratch.data(), nullptr, howmany, 1, kind,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!plan) throw NumericalError("fftw: failed to plan sine transform");
  cache.emplace(key, plan);
  return plan;
}

double parity(int i1, int i2) { return ((i1 + i2) & 1) ? -1.0 : 1.0; }

void check_finite(const std::vector<cd>& v, const char* what) {
  for (const cd& x : v) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      throw ValidationError(std::string(what) + ": non-finite sample");
    }
  }
}

}  // namespace

TorusGrid::TorusGrid(int n1, int n2) : n1_(n1), n2_(n2) {
  require(n1 >= 4 && n2 >= 4 && n1 % 2 == 0 && n2 % 2 == 0,
          "torus grid: mode counts must be even and >= 4");
}

int TorusGrid::index1(int k) const {
  if (k < -n1_ / 2 || k >= n1_ / 2) return -1;
  return k >= 0 ? k : k + n1_;
}

int TorusGrid::index2(int k) const {
  if (k < -n2_ / 2 || k >= n2_ / 2) return -1;
  return k >= 0 ? k : k + n2_;
}

SlabGrid::SlabGrid(TorusGrid torus, int nz) : torus_(torus), nz_(nz) {
  require(nz >= 1, "slab grid: nz must be positive");
}

double SlabGrid::basis(int m, double z) {
  return std::sqrt(2.0 / kPi) * std::sin(m * (z + kPi / 2));
}

namespace fft {

void dft2(std::span<cd> data, int n1, int n2, int sign) {
  require(data.size() == static_cast<std::size_t>(n1) * n2, "dft2: size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(dft2_plan(n1, n2, sign), p, p);
}

void dst1(std::span<cd> data, int nz, std::size_t plane) {
  require(data.size() == plane * nz, "dst1: size mismatch");
  auto* p = reinterpret_cast<double*>(data.data());
  fftw_execute_r2r(dst1_plan(nz, plane), p, p);
  const double scale = 1.0 / std::sqrt(2.0 * (nz + 1));
  for (cd& x : data) x *= scale;
}

void values_to_coefficients(const TorusGrid& grid, std::span<const cd> values, std::span<cd> out) {
  require(values.size() == grid.size() && out.size() == grid.size(),
          "values_to_coefficients: size mismatch");
  std::copy(values.begin(), values.end(), out.begin());
  dft2(out, grid.n1(), grid.n2(), FFTW_FORWARD);
  const double scale = 2.0 * kPi / static_cast<double>(grid.size());
  for (int i1 = 0; i1 < grid.n1(); ++i1) {
    for (int i2 = 0; i2 < grid.n2(); ++i2) {
      out[i1 * grid.n2() + i2] *= scale * parity(i1, i2);
    }
  }
}

void coefficients_to_values(const TorusGrid& grid, std::span<const cd> coefficients,
                            std::span<cd> out) {
  require(coefficients.size() == grid.size() && out.size() == grid.size(),
          "coefficients_to_values: size mismatch");
  for (int i1 = 0; i1 < grid.n1(); ++i1) {
    for (int i2 = 0; i2 < grid.n2(); ++i2) {
      const std::size_t i = i1 * grid.n2() + i2;
      out[i] = coefficients[i] * parity(i1, i2);
    }
  }
  dft2(out, grid.n1(), grid.n2(), FFTW_BACKWARD);
  const double scale = 1.0 / (2.0 * kPi);
  for (cd& x : out) x *= scale;
}

}  // namespace fft

// ---- ComplexField2D ----

ComplexField2D ComplexField2D::from_values(const TorusGrid& grid, std::vector<cd> values) {
  require(values.size() == grid.size(), "field: sample count does not match grid");
  return ComplexField2D(grid, std::move(values), {});
}

ComplexField2D ComplexField2D::from_coefficients(const TorusGrid& grid,
                                                 std::vector<cd> coefficients) {
  require(coefficients.size() == grid.size(), "field: coefficient count does not match grid");
  return ComplexField2D(grid, {}, std::move(coefficients));
}

ComplexField2D ComplexField2D::from_function(const TorusGrid& grid,
                                             const std::function<cd(double, double)>& f) {
  std::vector<cd> v(grid.size());
  for (int i1 = 0; i1 < grid.n1(); ++i1) {
    for (int i2 = 0; i2 < grid.n2(); ++i2) v[i1 * grid.n2() + i2] = f(grid.x1(i1), grid.x2(i2));
  }
  return from_values(grid, std::move(v));
}

const std::vector<cd>& ComplexField2D::values() const {
  require(has_values(), "field has no physical samples (use to_physical)");
  return values_;
}

const std::vector<cd>& ComplexField2D::coefficients() const {
  require(has_coefficients(), "field has no coefficients (use to_spectral)");
  return coefficients_;
}

cd ComplexField2D::coefficient(int k1, int k2) const {
  const int i1 = grid_.index1(k1);
  const int i2 = grid_.index2(k2);
  if (i1 < 0 || i2 < 0) return {};
  return coefficients()[i1 * grid_.n2() + i2];
}

ComplexField2D to_spectral(const ComplexField2D& f) {
  if (f.has_coefficients()) return f;
  check_finite(f.values_, "to_spectral");
  std::vector<cd> c(f.grid_.size());
  fft::values_to_coefficients(f.grid_, f.values_, c);
  return ComplexField2D(f.grid_, f.values_, std::move(c));
}

ComplexField2D to_physical(const ComplexField2D& f) {
  if (f.has_values()) return f;
  std::vector<cd> v(f.grid_.size());
  fft::coefficients_to_values(f.grid_, f.coefficients_, v);
  return ComplexField2D(f.grid_, std::move(v), f.coefficients_);
}

// ---- ComplexField3D ----

ComplexField3D ComplexField3D::from_values(const SlabGrid& grid, std::vector<cd> values) {
  require(values.size() == grid.size(), "field: sample count does not match grid");
  return ComplexField3D(grid, std::move(values), {});
}

ComplexField3D ComplexField3D::from_coefficients(const SlabGrid& grid,
                                                 std::vector<cd> coefficients) {
  require(coefficients.size() == grid.size(), "field: coefficient count does not match grid");
  return ComplexField3D(grid, {}, std::move(coefficients));
}

ComplexField3D ComplexField3D::from_function(const SlabGrid& grid,
                                             const std::function<cd(double, double, double)>& f) {
  const TorusGrid& t = grid.torus();
  std::vector<cd> v(grid.size());
  for (int j = 0; j < grid.nz(); ++j) {
    for (int i1 = 0; i1 < t.n1(); ++i1) {
      for (int i2 = 0; i2 < t.n2(); ++i2) {
        v[j * t.size() + i1 * t.n2() + i2] = f(t.x1(i1), t.x2(i2), grid.z(j));
      }
    }
  }
  return from_values(grid, std::move(v));
}

ComplexField3D ComplexField3D::transverse_ground(const SlabGrid& grid,
                                                 const ComplexField2D& profile) {
  require(profile.grid() == grid.torus(), "transverse_ground: grid mismatch");
  const ComplexField2D p = to_spectral(profile);
  std::vector<cd> c(grid.size());
  std::copy(p.coefficients().begin(), p.coefficients().end(), c.begin());
  return from_coefficients(grid, std::move(c));
}

const std::vector<cd>& ComplexField3D::values() const {
  require(has_values(), "field has no physical samples (use to_physical)");
  return values_;
}

const std::vector<cd>& ComplexField3D::coefficients() const {
  require(has_coefficients(), "field has no coefficients (use to_spectral)");
  return coefficients_;
}

cd ComplexField3D::coefficient(int k1, int k2, int m) const {
  const TorusGrid& t = grid_.torus();
  const int i1 = t.index1(k1);
  const int i2 = t.index2(k2);
  if (i1 < 0 || i2 < 0 || m < 1 || m > grid_.nz()) return {};
  return coefficients()[(m - 1) * t.size() + i1 * t.n2() + i2];
}

ComplexField3D to_spectral(const ComplexField3D& f) {
  if (f.has_coefficients()) return f;
  check_finite(f.values_, "to_spectral");
  const TorusGrid& t = f.grid_.torus();
  const std::size_t plane = t.size();
  std::vector<cd> c(f.grid_.size());
  for (int j = 0; j < f.grid_.nz(); ++j) {
    fft::values_to_coefficients(t, std::span(f.values_).subspan(j * plane, plane),
                                std::span(c).subspan(j * plane, plane));
  }
  fft::dst1(c, f.grid_.nz(), plane);
  const double scale = std::sqrt(f.grid_.dz());
  for (cd& x : c) x *= scale;
  return ComplexField3D(f.grid_, f.values_, std::move(c));
}

ComplexField3D to_physical(const ComplexField3D& f) {
  if (f.has_values()) return f;
  const TorusGrid& t = f.grid_.torus();
  const std::size_t plane = t.size();
  std::vector<cd> tmp = f.coefficients_;
  fft::dst1(tmp, f.grid_.nz(), plane);
  const double scale = 1.0 / std::sqrt(f.grid_.dz());
  for (cd& x : tmp) x *= scale;
  std::vector<cd> v(f.grid_.size());
  for (int j = 0; j < f.grid_.nz(); ++j) {
    fft::coefficients_to_values(t, std::span(tmp).subspan(j * plane, plane),
                                std::span(v).subspan(j * plane, plane));
  }
  return ComplexField3D(f.grid_, std::move(v), f.coefficients_);
}

// ---- multipliers ----

FourierMultiplier::FourierMultiplier(Symbol symbol, std::string name)
    : symbol_(std::move(symbol)), name_(std::move(name)) {
  require(static_cast<bool>(symbol_), "multiplier: empty symbol");
}

FourierMultiplier FourierMultiplier::identity() {
  return {[](int, int, int) { return 1.0; }, "identity"};
}

FourierMultiplier FourierMultiplier::bessel_x(double power) {
  return {[power](int k1, int k2, int) {
            return std::pow(1.0 + double(k1) * k1 + double(k2) * k2, power);
          },
          "bessel_x"};
}

FourierMultiplier FourierMultiplier::renormalized_kinetic(double L) {
  require(L > 0, "renormalized_kinetic: L must be positive");
  return {[L](int k1, int k2, int m) {
            const double base = 1.0 + double(k1) * k1 + double(k2) * k2;
            if (m == 0) return base;
            return base + (double(m) * m - 1.0) / (L * L);
          },
          "renormalized_kinetic"};
}

FourierMultiplier FourierMultiplier::tabulated(int n1, int n2, int nz, std::vector<double> table) {
  const TorusGrid t(n1, n2);
  const std::size_t planes = nz > 0 ? nz : 1;
  require(table.size() == t.size() * planes, "tabulated multiplier: table size mismatch");
  auto shared = std::make_shared<const std::vector<double>>(std::move(table));
  FourierMultiplier m(
      [t, nz, shared](int k1, int k2, int m) {
        const int i1 = t.index1(k1);
        const int i2 = t.index2(k2);
        const int plane = nz > 0 ? m - 1 : 0;
        return (*shared)[plane * t.size() + i1 * t.n2() + i2];
      },
      "tabulated");
  m.n1_ = n1;
  m.n2_ = n2;
  m.nz_ = nz;
  return m;
}

namespace {

void check_shape(const FourierMultiplier& m, const TorusGrid& t, int nz) {
  if (m.required_n1() == 0) return;
  if (m.required_n1() != t.n1() || m.required_n2() != t.n2() || m.required_nz() != nz) {
    throw ValidationError("multiplier/grid shape mismatch");
  }
}

double symbol_at(const FourierMultiplier& m, int k1, int k2, int mz) {
  const double s = m(k1, k2, mz);
  if (!std::isfinite(s)) throw ValidationError("multiplier symbol not finite on retained modes");
  return s;
}

}  // namespace

ComplexField2D apply_multiplier(const FourierMultiplier& m, const ComplexField2D& f) {
  const TorusGrid& t = f.grid();
  check_shape(m, t, 0);
  std::vector<cd> c = to_spectral(f).coefficients();
  for (int i1 = 0; i1 < t.n1(); ++i1) {
    for (int i2 = 0; i2 < t.n2(); ++i2) c[i1 * t.n2() + i2] *= symbol_at(m, t.k1(i1), t.k2(i2), 0);
  }
  return ComplexField2D::from_coefficients(t, std::move(c));
}

ComplexField3D apply_multiplier(const FourierMultiplier& m, const ComplexField3D& f) {
  const TorusGrid& t = f.grid().torus();
  check_shape(m, t, f.grid().nz());
  std::vector<cd> c = to_spectral(f).coefficients();
  for (int mz = 1; mz <= f.grid().nz(); ++mz) {
    for (int i1 = 0; i1 < t.n1(); ++i1) {
      for (int i2 = 0; i2 < t.n2(); ++i2) {
        c[(mz - 1) * t.size() + i1 * t.n2() + i2] *= symbol_at(m, t.k1(i1), t.k2(i2), mz);
      }
    }
  }
  return ComplexField3D::from_coefficients(f.grid(), std::move(c));
}

double quadratic_form(const FourierMultiplier& m, const ComplexField2D& f) {
  const TorusGrid& t = f.grid();
  check_shape(m, t, 0);
  const auto fs = to_spectral(f);
  const auto& c = fs.coefficients();
  double s = 0.0;
  for (int i1 = 0; i1 < t.n1(); ++i1) {
    for (int i2 = 0; i2 < t.n2(); ++i2) {
      s += symbol_at(m, t.k1(i1), t.k2(i2), 0) * std::norm(c[i1 * t.n2() + i2]);
    }
  }
  return s;
}

double quadratic_form(const FourierMultiplier& m, const ComplexField3D& f) {
  const TorusGrid& t = f.grid().torus();
  check_shape(m, t, f.grid().nz());
  const auto fs = to_spectral(f);
  const auto& c = fs.coefficients();
  double s = 0.0;
  for (int mz = 1; mz <= f.grid().nz(); ++mz) {
    for (int i1 = 0; i1 < t.n1(); ++i1) {
      for (int i2 = 0; i2 < t.n2(); ++i2) {
        s += symbol_at(m, t.k1(i1), t.k2(i2), mz) *
             std::norm(c[(mz - 1) * t.size() + i1 * t.n2() + i2]);
      }
    }
  }
  return s;
}

// ---- norms ----

double lp_norm(const ComplexField2D& f, NormKind kind) {
  const auto fp = to_physical(f);
  const auto& v = fp.values();
  const double w = f.grid().cell_area();
  switch (kind) {
    case NormKind::L2: {
      double s = 0.0;
      for (const cd& x : v) s += std::norm(x);
      return std::sqrt(s * w);
    }
    case NormKind::L4: {
      double s = 0.0;
      for (const cd& x : v) s += std::norm(x) * std::norm(x);
      return std::pow(s * w, 0.25);
    }
    default:
      throw ValidationError("lp_norm: unsupported norm for a 2D field");
  }
}

double lp_norm(const ComplexField3D& f, NormKind kind) {
  const auto fp = to_physical(f);
  const auto& v = fp.values();
  const double w = f.grid().cell_volume();
  switch (kind) {
    case NormKind::L2: {
      double s = 0.0;
      for (const cd& x : v) s += std::norm(x);
      return std::sqrt(s * w);
    }
    case NormKind::L4: {
      double s = 0.0;
      for (const cd& x : v) s += std::norm(x) * std::norm(x);
      return std::pow(s * w, 0.25);
    }
    case NormKind::MixedZInfX1: {
      const std::size_t plane = f.grid().torus().size();
      double best = 0.0;
      for (int j = 0; j < f.grid().nz(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < plane; ++i) s += std::abs(v[j * plane + i]);
        best = std::max(best, s * f.grid().torus().cell_area());
      }
      return best;
    }
  }
  throw ValidationError("lp_norm: unsupported norm");
}

cd inner_product(const ComplexField2D& f, const ComplexField2D& g) {
  require(f.grid() == g.grid(), "inner_product: grid mismatch");
  const auto fs = to_spectral(f);
  const auto gs = to_spectral(g);
  const auto& a = fs.coefficients();
  const auto& b = gs.coefficients();
  cd s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

cd inner_product(const ComplexField3D& f, const ComplexField3D& g) {
  require(f.grid() == g.grid(), "inner_product: grid mismatch");
  const auto fs = to_spectral(f);
  const auto gs = to_spectral(g);
  const auto& a = fs.coefficients();
  const auto& b = gs.coefficients();
  cd s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace dimred
