#include "dimred/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <type_traits>

#include "dimred/errors.hpp"

namespace dimred {

namespace {

int step_count(double t_final, double dt) {
  const double n = std::ceil(t_final / dt * (1.0 - 1e-12));
  return std::max(1, static_cast<int>(n));
}

double coefficient_mass(const std::vector<cd>& c) {
  double s = 0.0;
  for (const cd& x : c) s += std::norm(x);
  return s;
}

void check_mass(double mass, double reference, int step) {
  if (!std::isfinite(mass)) {
    std::ostringstream msg;
    msg << "non-finite field at step " << step;
    throw NumericalError(msg.str());
  }
  if (std::abs(mass - reference) > 1e-9 * std::max(reference, 1e-300)) {
    std::ostringstream msg;
    msg << "unitarity violated at step " << step << ": mass " << mass << " vs " << reference;
    throw NumericalError(msg.str());
  }
}

// Values of a 3D field from coefficients and back, without the field wrapper.
std::vector<cd> slab_values(const SlabGrid& g, const std::vector<cd>& c) {
  return to_physical(ComplexField3D::from_coefficients(g, c)).values();
}

std::vector<cd> slab_coefficients(const SlabGrid& g, const std::vector<cd>& v) {
  return to_spectral(ComplexField3D::from_values(g, v)).coefficients();
}

}  // namespace

void Evolution2DConfig::validate() const {
  require(std::isfinite(g0), "evolve2d: g0 must be finite");
  require(dt > 0 && dt <= 0.1, "evolve2d: dt must lie in (0, 0.1]");
  require(t_final > 0 && dt <= t_final, "evolve2d: need 0 < dt <= t_final");
  require(record_every >= 1, "evolve2d: record_every must be positive");
  require(blowup_factor > 1, "evolve2d: blow-up factor must exceed 1");
}

void Evolution3DConfig::validate() const {
  params.validate();
  require(dt > 0 && dt <= 0.1, "evolve3d: dt must lie in (0, 0.1]");
  require(t_final > 0 && dt <= t_final, "evolve3d: need 0 < dt <= t_final");
  require(record_every >= 1, "evolve3d: record_every must be positive");
  require(blowup_factor > 1, "evolve3d: blow-up factor must exceed 1");
}

// ---- 2D ----

Integrator2D::Integrator2D(const Evolution2DConfig& cfg) : cfg_(cfg) {
  const TorusGrid& t = cfg.grid;
  k2_.resize(t.size());
  keep_.resize(t.size());
  for (int i1 = 0; i1 < t.n1(); ++i1) {
    for (int i2 = 0; i2 < t.n2(); ++i2) {
      const int k1 = t.k1(i1), k2 = t.k2(i2);
      k2_[i1 * t.n2() + i2] = double(k1) * k1 + double(k2) * k2;
      keep_[i1 * t.n2() + i2] =
          !cfg.dealias || (3 * std::abs(k1) <= t.n1() && 3 * std::abs(k2) <= t.n2());
    }
  }
}

std::vector<double> Integrator2D::filtered_density(const std::vector<cd>& values) const {
  const TorusGrid& t = cfg_.grid;
  std::vector<double> rho(values.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(values[i]);
  if (!cfg_.dealias) return rho;
  std::vector<cd> buf(rho.begin(), rho.end()), c(t.size());
  fft::values_to_coefficients(t, buf, c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!keep_[i]) c[i] = 0.0;
  }
  fft::coefficients_to_values(t, c, buf);
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = buf[i].real();
  return rho;
}

ComplexField2D Integrator2D::step(const ComplexField2D& phi, double dt) const {
  require(phi.grid() == cfg_.grid, "step_2d: grid mismatch");
  const TorusGrid& t = cfg_.grid;
  std::vector<cd> c = to_spectral(phi).coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -0.5 * k2_[i] * dt);
  std::vector<cd> v(t.size());
  fft::coefficients_to_values(t, c, v);
  if (cfg_.g0 != 0.0) {
    // |phi| is invariant under the nonlinear flow, so its exact solution is a phase.
    const std::vector<double> rho = filtered_density(v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, -cfg_.g0 * rho[i] * dt);
  }
  fft::values_to_coefficients(t, v, c);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -0.5 * k2_[i] * dt);
  return ComplexField2D::from_coefficients(t, std::move(c));
}

ConservedQuantities Integrator2D::conserved(const ComplexField2D& phi) const {
  const ComplexField2D p = to_physical(to_spectral(phi));
  ConservedQuantities q;
  double kinetic = 0.0;
  for (std::size_t i = 0; i < k2_.size(); ++i) {
    const double a = std::norm(p.coefficients()[i]);
    q.mass += a;
    kinetic += k2_[i] * a;
  }
  double quartic = 0.0;
  if (cfg_.g0 != 0.0) {
    const std::vector<double> prho = filtered_density(p.values());
    for (std::size_t i = 0; i < prho.size(); ++i) quartic += std::norm(p.values()[i]) * prho[i];
    quartic *= cfg_.grid.cell_area();
  }
  q.energy = kinetic + 0.5 * cfg_.g0 * quartic;
  return q;
}

ComplexField2D step_2d(const ComplexField2D& phi, const Evolution2DConfig& cfg) {
  cfg.validate();
  return Integrator2D(cfg).step(phi, cfg.dt);
}

ConservedQuantities conserved_2d(const ComplexField2D& phi, double g0, bool dealias) {
  Evolution2DConfig cfg;
  cfg.grid = phi.grid();
  cfg.g0 = g0;
  cfg.dealias = dealias;
  return Integrator2D(cfg).conserved(phi);
}

namespace {

template <class Field, class Integrator>
TrajectoryRecord<Field> run(const Integrator& integ, const Field& phi0, double dt_nominal,
                            double t_final, int record_every, double blowup_factor) {
  TrajectoryRecord<Field> rec;
  const int n = step_count(t_final, dt_nominal);
  const double dt = t_final / n;
  rec.steps = n;
  rec.dt_effective = dt;
  Field phi = to_spectral(phi0);
  const double mass0 = coefficient_mass(phi.coefficients());
  require(mass0 > 0, "evolve: initial field must be nonzero");
  const ConservedQuantities q0 = integ.conserved(phi);
  // ||grad_x phi|| from the coefficients.
  auto gradient_norm = [&](const Field& f) {
    const auto& c = f.coefficients();
    const TorusGrid& t = [&]() -> const TorusGrid& {
      if constexpr (std::is_same_v<Field, ComplexField2D>) return f.grid();
      else return f.grid().torus();
    }();
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::size_t m = i % t.size();
      const int k1 = t.k1(static_cast<int>(m) / t.n2()), k2 = t.k2(static_cast<int>(m) % t.n2());
      s += (double(k1) * k1 + double(k2) * k2) * std::norm(c[i]);
    }
    return std::sqrt(s);
  };
  const double scale = std::max(gradient_norm(phi), std::sqrt(mass0));
  auto record = [&](int step, const Field& f, const ConservedQuantities& q) {
    rec.times.push_back(step * dt);
    rec.quantities.push_back(q);
    rec.snapshots.push_back(f);
  };
  record(0, phi, q0);
  for (int i = 1; i <= n; ++i) {
    phi = integ.step(phi, dt);
    check_mass(coefficient_mass(phi.coefficients()), mass0, i);
    if (gradient_norm(phi) > blowup_factor * scale) {
      rec.blown_up = true;
      rec.blowup_time = i * dt;
      record(i, phi, integ.conserved(phi));
      break;
    }
    if (i % record_every == 0 || i == n) record(i, phi, integ.conserved(phi));
  }
  return rec;
}

}  // namespace

Trajectory2D evolve_2d(const ComplexField2D& phi0, const Evolution2DConfig& cfg) {
  cfg.validate();
  require(phi0.grid() == cfg.grid, "evolve_2d: grid mismatch");
  const Integrator2D integ(cfg);
  return run<ComplexField2D>(integ, phi0, cfg.dt, cfg.t_final, cfg.record_every,
                             cfg.blowup_factor);
}

// ---- 3D ----

Integrator3D::Integrator3D(const Evolution3DConfig& cfg)
    : cfg_(cfg),
      hartree_(std::make_shared<HartreeOperator>(cfg.grid, cfg.spec, cfg.params, cfg.dealias)) {
  cfg.params.validate();
  const TorusGrid& t = cfg.grid.torus();
  symbol_.resize(cfg.grid.size());
  for (int m = 1; m <= cfg.grid.nz(); ++m) {
    for (int i1 = 0; i1 < t.n1(); ++i1) {
      for (int i2 = 0; i2 < t.n2(); ++i2) {
        symbol_[(m - 1) * t.size() + i1 * t.n2() + i2] = generator_symbol(t.k1(i1), t.k2(i2), m);
      }
    }
  }
}

double Integrator3D::generator_symbol(int k1, int k2, int m) const {
  const double L = cfg_.params.L;
  const double shift = cfg_.gauge == Gauge::Renormalized ? 1.0 : 0.0;
  return double(k1) * k1 + double(k2) * k2 + (double(m) * m - shift) / (L * L);
}

ComplexField3D Integrator3D::step(const ComplexField3D& phi, double dt) const {
  require(phi.grid() == cfg_.grid, "step_3d: grid mismatch");
  std::vector<cd> c = to_spectral(phi).coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -0.5 * symbol_[i] * dt);
  if (!hartree_->trivial()) {
    std::vector<cd> v = slab_values(cfg_.grid, c);
    std::vector<double> rho(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) rho[i] = std::norm(v[i]);
    // W is frozen over the substep because the phase leaves |phi|^2 unchanged.
    const std::vector<double> W = hartree_->potential(rho);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::polar(1.0, -W[i] * dt);
    c = slab_coefficients(cfg_.grid, v);
  }
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -0.5 * symbol_[i] * dt);
  return ComplexField3D::from_coefficients(cfg_.grid, std::move(c));
}

ConservedQuantities Integrator3D::conserved(const ComplexField3D& phi) const {
  const ComplexField3D p = to_spectral(phi);
  const FourierMultiplier kinetic = FourierMultiplier::renormalized_kinetic(cfg_.params.L);
  ConservedQuantities q;
  q.mass = coefficient_mass(p.coefficients());
  q.energy = quadratic_form(kinetic, p);
  if (!hartree_->trivial()) {
    const std::vector<double> rho = density(p);
    q.energy += hartree_->interaction_energy(rho, hartree_->potential(rho));
  }
  return q;
}

ComplexField3D step_3d(const ComplexField3D& phi, const Evolution3DConfig& cfg) {
  cfg.validate();
  return Integrator3D(cfg).step(phi, cfg.dt);
}

Trajectory3D evolve_3d(const ComplexField3D& phi0, const Evolution3DConfig& cfg) {
  cfg.validate();
  require(phi0.grid() == cfg.grid, "evolve_3d: grid mismatch");
  const Integrator3D integ(cfg);
  return run<ComplexField3D>(integ, phi0, cfg.dt, cfg.t_final, cfg.record_every,
                             cfg.blowup_factor);
}

// ---- imaginary time ----

MinimizeResult minimize_energy(const Evolution3DConfig& cfg, int iterations,
                               std::optional<double> cgn,
                               const std::optional<ComplexField3D>& initial) {
  cfg.params.validate();
  require(iterations >= 1, "minimize: iterations must be positive");
  const Integrator3D integ(cfg);
  const SlabGrid& g = cfg.grid;
  const TorusGrid& t = g.torus();
  const FourierMultiplier S2 = FourierMultiplier::renormalized_kinetic(cfg.params.L);
  std::vector<double> symbol(g.size());
  for (int m = 1; m <= g.nz(); ++m) {
    for (int i1 = 0; i1 < t.n1(); ++i1) {
      for (int i2 = 0; i2 < t.n2(); ++i2) {
        symbol[(m - 1) * t.size() + i1 * t.n2() + i2] = S2(t.k1(i1), t.k2(i2), m);
      }
    }
  }
  std::vector<cd> c(g.size());
  if (initial) {
    require(initial->grid() == g, "minimize: initial field grid mismatch");
    c = to_spectral(*initial).coefficients();
  } else {
    c[0] = 1.0;  // constant x-profile times e_1(z), unit norm
  }
  auto normalize = [](std::vector<cd>& v) {
    const double n = std::sqrt(coefficient_mass(v));
    require(n > 0, "minimize: zero field");
    for (cd& x : v) x /= n;
  };
  normalize(c);
  auto energy = [&](const std::vector<cd>& v) {
    return integ.conserved(ComplexField3D::from_coefficients(g, v)).energy;
  };
  auto flow = [&](const std::vector<cd>& in, double tau) {
    std::vector<cd> v = in;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::exp(-0.5 * tau * symbol[i]);
    if (!integ.hartree().trivial()) {
      std::vector<cd> x = slab_values(g, v);
      std::vector<double> rho(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) rho[i] = std::norm(x[i]);
      const std::vector<double> W = integ.hartree().potential(rho);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] *= std::exp(-tau * W[i]);
      v = slab_coefficients(g, x);
    }
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::exp(-0.5 * tau * symbol[i]);
    normalize(v);
    return v;
  };

  MinimizeResult out;
  double e = energy(c);
  double tau = 0.1;
  int it = 0;
  for (; it < iterations; ++it) {
    std::vector<cd> next = flow(c, tau);
    const double en = energy(next);
    if (!std::isfinite(en)) throw NumericalError("minimize: non-finite energy");
    if (en > e) {
      tau *= 0.5;
      if (tau < 1e-12) break;
      continue;
    }
    const double change = e - en;
    c.swap(next);
    e = en;
    if (change <= 1e-14 * std::max(1.0, std::abs(e))) {
      out.converged = true;
      break;
    }
  }
  out.e_min = e;
  out.minimizer = ComplexField3D::from_coefficients(g, c);
  out.iterations = it;
  if (!out.converged && it < iterations) out.converged = true;  // step length exhausted
  if (cgn) out.upper_bound = 1.0 + std::pow(*cgn, 4) * mixed_norm_inf1(cfg.spec).value / 2.0;
  return out;
}

nlohmann::json to_json(const Evolution2DConfig& cfg) {
  return {{"g0", cfg.g0},
          {"dt", cfg.dt},
          {"t_final", cfg.t_final},
          {"grid", {cfg.grid.n1(), cfg.grid.n2()}},
          {"record_every", cfg.record_every},
          {"dealias", cfg.dealias},
          {"blowup_factor", cfg.blowup_factor}};
}

nlohmann::json to_json(const Evolution3DConfig& cfg) {
  return {{"N", cfg.params.N},
          {"L", cfg.params.L},
          {"beta", cfg.params.beta},
          {"c", cfg.params.c()},
          {"potential", to_json(cfg.spec)},
          {"dt", cfg.dt},
          {"t_final", cfg.t_final},
          {"grid", {cfg.grid.torus().n1(), cfg.grid.torus().n2(), cfg.grid.nz()}},
          {"gauge", cfg.gauge == Gauge::Renormalized ? "renormalized" : "lab"},
          {"record_every", cfg.record_every},
          {"dealias", cfg.dealias},
          {"blowup_factor", cfg.blowup_factor}};
}

}  // namespace dimred
