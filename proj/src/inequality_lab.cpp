#include "dimred/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "dimred/errors.hpp"
#include "dimred/gn_constant.hpp"
#include "dimred/io.hpp"
#include "dimred/parallel.hpp"
#include "dimred/quadrature.hpp"
#include "dimred/reduction.hpp"

namespace dimred {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

int ipow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Digits of a one-particle mode index as signed wavenumbers.
void mode_of(int index, int dim, int band, int* k) {
  const int w = 2 * band + 1;
  for (int a = dim - 1; a >= 0; --a) {
    k[a] = index % w - band;
    index /= w;
  }
}

void normalize(std::vector<cd>& c) {
  double s = 0.0;
  for (const cd& x : c) s += std::norm(x);
  require(s > 0, "cannot normalize a zero state");
  s = 1.0 / std::sqrt(s);
  for (cd& x : c) x *= s;
}

PotentialSpec absolute(PotentialSpec spec) {
  spec.amplitude = std::abs(spec.amplitude);
  return spec;
}

}  // namespace

// ---------------------------------------------------------------------------

int ManyBodyState::modes_per_particle() const { return ipow(2 * band + 1, dim); }

ManyBodyState random_many_body_state(int particles, int dim, std::uint64_t seed, int band,
                                     double k0) {
  require(particles >= 1 && dim >= 1 && dim <= 2 && band >= 1, "many-body state: bad shape");
  ManyBodyState s{particles, dim, band, {}};
  const int M = s.modes_per_particle();
  const int total = ipow(M, particles);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  s.coefficients.resize(total);
  int k[2];
  for (int idx = 0; idx < total; ++idx) {
    double k2 = 0.0;
    int rest = idx;
    for (int p = 0; p < particles; ++p) {
      mode_of(rest % M, dim, band, k);
      rest /= M;
      for (int a = 0; a < dim; ++a) k2 += double(k[a]) * k[a];
    }
    const double re = normal(rng), im = normal(rng);
    s.coefficients[idx] = std::exp(-k2 / (k0 * k0)) * cd(re, im);
  }
  normalize(s.coefficients);
  return s;
}

ManyBodyState product_state(const std::vector<cd>& one_body, int particles, int dim, int band) {
  ManyBodyState s{particles, dim, band, {}};
  const int M = s.modes_per_particle();
  require(static_cast<int>(one_body.size()) == M, "product_state: one-body size mismatch");
  const int total = ipow(M, particles);
  s.coefficients.assign(total, cd(1.0));
  for (int idx = 0; idx < total; ++idx) {
    int rest = idx;
    for (int p = 0; p < particles; ++p) {
      s.coefficients[idx] *= one_body[rest % M];
      rest /= M;
    }
  }
  normalize(s.coefficients);
  return s;
}

InequalitySides hoffman_ostenhof_sides(const ManyBodyState& psi, int fine) {
  const int dim = psi.dim, band = psi.band;
  require(dim == 1 || dim == 2, "hoffman_ostenhof: dim must be 1 or 2");
  require(fine >= 8 * band, "hoffman_ostenhof: fine grid too coarse for the density band");
  const int M = psi.modes_per_particle();
  require(static_cast<int>(psi.coefficients.size()) == ipow(M, psi.particles),
          "hoffman_ostenhof: coefficient count does not match the shape");
  const int R = ipow(M, psi.particles - 1);
  const int qw = 4 * band + 1;
  const int Q = ipow(qw, dim);

  // Fourier data of rho over differences q = k - k' of the first particle.
  std::vector<cd> rho_hat(Q);
  InequalitySides out;
  int ka[2] = {0, 0}, kb[2] = {0, 0};
  for (int a = 0; a < M; ++a) {
    mode_of(a, dim, band, ka);
    double ksq = 0.0;
    for (int d = 0; d < dim; ++d) ksq += double(ka[d]) * ka[d];
    for (int r = 0; r < R; ++r) out.rhs += ksq * std::norm(psi.coefficients[a * R + r]);
    for (int b = 0; b < M; ++b) {
      mode_of(b, dim, band, kb);
      cd s = 0.0;
      for (int r = 0; r < R; ++r) s += psi.coefficients[a * R + r] * std::conj(psi.coefficients[b * R + r]);
      int q = 0;
      for (int d = 0; d < dim; ++d) q = q * qw + (ka[d] - kb[d] + 2 * band);
      rho_hat[q] += s;
    }
  }

  // Phase tables e^{i q x} on the fine grid.
  std::vector<cd> phase(static_cast<std::size_t>(qw) * fine);
  for (int q = 0; q < qw; ++q) {
    for (int i = 0; i < fine; ++i) {
      const double x = -kPi + kTwoPi * i / fine;
      phase[q * fine + i] = std::polar(1.0, (q - 2 * band) * x);
    }
  }
  const double norm = std::pow(kTwoPi, -dim);
  const int points = ipow(fine, dim);
  double sum = 0.0;
  for (int p = 0; p < points; ++p) {
    const int i0 = dim == 2 ? p / fine : p;
    const int i1 = dim == 2 ? p % fine : 0;
    cd rho = 0.0, g0 = 0.0, g1 = 0.0;
    for (int q = 0; q < Q; ++q) {
      const int q0 = dim == 2 ? q / qw : q;
      const int q1 = dim == 2 ? q % qw : 2 * band;
      const cd e = rho_hat[q] * phase[q0 * fine + i0] * (dim == 2 ? phase[q1 * fine + i1] : cd(1.0));
      rho += e;
      g0 += cd(0, q0 - 2 * band) * e;
      g1 += cd(0, q1 - 2 * band) * e;
    }
    const double r = rho.real() * norm;
    if (!(r > 0)) throw NumericalError("hoffman_ostenhof: one-particle density vanishes");
    const double grad2 = std::pow(g0.real() * norm, 2) + std::pow(g1.real() * norm, 2);
    sum += grad2 / (4.0 * r);
  }
  out.lhs = sum * std::pow(kTwoPi / fine, dim);
  return out;
}

CheckInstance hoffman_ostenhof_check(const ManyBodyState& psi, std::uint64_t seed) {
  CheckInstance c;
  c.name = "hoffman-ostenhof";
  c.seed = seed;
  c.tolerance = 1e-8;
  const int fine = std::max(64, 8 * psi.band);
  c.resolution = {fine, psi.band, psi.particles, psi.dim};
  const InequalitySides s = hoffman_ostenhof_sides(psi, fine);
  c.margin = s.rhs - s.lhs;
  c.passed = c.margin >= -c.tolerance;
  c.details = {{"lhs", s.lhs}, {"rhs", s.rhs}, {"particles", psi.particles}, {"dim", psi.dim}};
  return c;
}

CheckInstance hoffman_ostenhof_check(int particles, int dim, std::uint64_t seed) {
  require(particles == 2 || particles == 3, "hoffman_ostenhof: particles must be 2 or 3");
  require(dim == 1 || dim == 2, "hoffman_ostenhof: dim must be 1 or 2");
  return hoffman_ostenhof_check(random_many_body_state(particles, dim, seed), seed);
}

// ---------------------------------------------------------------------------

namespace {

// rho_k(theta) = sum_p B[k][p] cos(p theta), theta = z + pi/2, for the density
// of a band-limited slab field. Exact: |phi|^2 is a cosine polynomial of
// degree 2 nz in theta, interpolated on 2 nz + 1 Chebyshev-Lobatto angles.
std::vector<std::vector<cd>> density_cosine_data(const ComplexField3D& phi) {
  const SlabGrid& g = phi.grid();
  const TorusGrid& t = g.torus();
  const int nz = g.nz();
  const std::size_t plane = t.size();
  const ComplexField3D s = to_spectral(phi);
  const std::vector<cd>& coef = s.coefficients();
  const int P = 2 * nz;
  std::vector<std::vector<cd>> samples(P + 1, std::vector<cd>(plane));
  std::vector<cd> buf(plane), vals(plane);
  for (int j = 0; j <= P; ++j) {
    const double z = -kPi / 2 + j * kPi / P;
    std::fill(buf.begin(), buf.end(), cd(0.0));
    for (int m = 1; m <= nz; ++m) {
      const double e = SlabGrid::basis(m, z);
      for (std::size_t i = 0; i < plane; ++i) buf[i] += coef[(m - 1) * plane + i] * e;
    }
    fft::coefficients_to_values(t, buf, vals);
    for (std::size_t i = 0; i < plane; ++i) vals[i] = std::norm(vals[i]);
    fft::values_to_coefficients(t, vals, samples[j]);
  }
  std::vector<std::vector<cd>> B(plane, std::vector<cd>(P + 1));
  for (std::size_t i = 0; i < plane; ++i) {
    for (int p = 0; p <= P; ++p) {
      cd acc = 0.0;
      for (int j = 0; j <= P; ++j) {
        const double w = (j == 0 || j == P) ? 0.5 : 1.0;
        acc += w * samples[j][i] * std::cos(p * j * kPi / P);
      }
      acc *= 2.0 / P;
      if (p == 0 || p == P) acc *= 0.5;
      B[i][p] = acc;
    }
  }
  return B;
}

// int_a^b cos(p t) cos(q (t - w)) dt.
double cos_product_integral(int p, int q, double w, double a, double b) {
  auto part = [&](int alpha, double beta) {
    if (alpha == 0) return (b - a) * std::cos(beta);
    return (std::sin(alpha * b + beta) - std::sin(alpha * a + beta)) / alpha;
  };
  return 0.5 * (part(p + q, -q * w) + part(p - q, q * w));
}

void require_band_limited(const ComplexField3D& phi) {
  const TorusGrid& t = phi.grid().torus();
  const ComplexField3D s = to_spectral(phi);
  const std::size_t plane = t.size();
  for (int m = 0; m < phi.grid().nz(); ++m) {
    for (int i1 = 0; i1 < t.n1(); ++i1) {
      for (int i2 = 0; i2 < t.n2(); ++i2) {
        const bool outside = 4 * std::abs(t.k1(i1)) >= t.n1() || 4 * std::abs(t.k2(i2)) >= t.n2();
        if (outside && std::abs(s.coefficients()[m * plane + i1 * t.n2() + i2]) > 1e-13) {
          throw ValidationError("pair_interaction: field must have |k_i| < n_i / 4");
        }
      }
    }
  }
}

}  // namespace

PairInteraction::PairInteraction(const SlabGrid& grid, const PotentialSpec& spec,
                                 const ScaledPotentialParams& params, int panels)
    : grid_(grid) {
  params.validate(true);
  require(panels >= 1, "pair_interaction: panels must be positive");
  trivial_ = spec.kind == PotentialKind::Zero || spec.amplitude == 0.0;
  if (trivial_) return;
  require(spec.x_shift[0] == 0 && spec.x_shift[1] == 0, "pair_interaction: shifted potential");
  const TorusGrid& t = grid.torus();
  const int P = 2 * grid.nz();
  const double s = params.s(), c = params.c();
  const double W = std::min(spec.support_z() / c, kPi);
  const QuadratureRule wr = composite_rule({-W, 0.0, W}, panels, 12);

  // Shells of equal |k| share the kernel.
  std::map<long, int> shell_index;
  std::vector<double> shell_k;
  shell_of_mode_.resize(t.size());
  for (int i1 = 0; i1 < t.n1(); ++i1) {
    for (int i2 = 0; i2 < t.n2(); ++i2) {
      const long key = long(t.k1(i1)) * t.k1(i1) + long(t.k2(i2)) * t.k2(i2);
      auto it = shell_index.find(key);
      if (it == shell_index.end()) {
        it = shell_index.emplace(key, int(shell_k.size())).first;
        shell_k.push_back(std::sqrt(double(key)));
      }
      shell_of_mode_[i1 * t.n2() + i2] = it->second;
    }
  }
  shells_ = static_cast<int>(shell_k.size());
  for (std::size_t n = 0; n < wr.nodes.size(); ++n) {
    const double w = wr.nodes[n];
    const double a = std::max(0.0, w), b = std::min(kPi, kPi + w);
    if (b <= a) continue;
    Node node;
    node.weight = wr.weights[n];
    node.overlap = Eigen::MatrixXd(P + 1, P + 1);
    for (int p = 0; p <= P; ++p) {
      for (int q = 0; q <= P; ++q) node.overlap(p, q) = cos_product_integral(p, q, w, a, b);
    }
    node.kernel.resize(shells_);
    for (int sh = 0; sh < shells_; ++sh) node.kernel[sh] = c * x_fourier(spec, shell_k[sh] / s, c * w);
    nodes_.push_back(std::move(node));
  }
}

double PairInteraction::operator()(const ComplexField3D& phi) const {
  require(phi.grid() == grid_, "pair_interaction: grid mismatch");
  if (trivial_) return 0.0;
  require_band_limited(phi);
  const auto B = density_cosine_data(phi);
  const std::size_t plane = grid_.torus().size();
  const int P = 2 * grid_.nz();
  Eigen::MatrixXcd Bm(P + 1, plane);
  for (std::size_t i = 0; i < plane; ++i) {
    for (int p = 0; p <= P; ++p) Bm(p, i) = B[i][p];
  }
  std::vector<double> corr(shells_);
  double total = 0.0;
  for (const Node& node : nodes_) {
    // Per-mode autocorrelation B_i^T A conj(B_i), summed over each shell.
    const Eigen::MatrixXcd AB = node.overlap * Bm.conjugate();
    std::fill(corr.begin(), corr.end(), 0.0);
    for (std::size_t i = 0; i < plane; ++i) {
      corr[shell_of_mode_[i]] += (Bm.col(i).transpose() * AB.col(i)).value().real();
    }
    double at_w = 0.0;
    for (int sh = 0; sh < shells_; ++sh) at_w += node.kernel[sh] * corr[sh];
    total += node.weight * at_w;
  }
  return total;
}

double pair_interaction(const ComplexField3D& phi, const PotentialSpec& spec,
                        const ScaledPotentialParams& params, int panels) {
  return PairInteraction(phi.grid(), spec, params, panels)(phi);
}

ComplexField3D random_slab_field(const SlabGrid& grid, std::uint64_t seed, double k0, double m0) {
  const TorusGrid& t = grid.torus();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<cd> c(grid.size());
  const std::size_t plane = t.size();
  for (int m = 1; m <= grid.nz(); ++m) {
    for (int i1 = 0; i1 < t.n1(); ++i1) {
      for (int i2 = 0; i2 < t.n2(); ++i2) {
        const int k1 = t.k1(i1), k2 = t.k2(i2);
        const double re = normal(rng), im = normal(rng);
        if (4 * std::abs(k1) >= t.n1() || 4 * std::abs(k2) >= t.n2()) continue;
        const double damp = std::exp(-(double(k1) * k1 + double(k2) * k2) / (k0 * k0) -
                                     double(m - 1) * (m - 1) / (m0 * m0));
        c[(m - 1) * plane + i1 * t.n2() + i2] = damp * cd(re, im);
      }
    }
  }
  normalize(c);
  return ComplexField3D::from_coefficients(grid, std::move(c));
}

CheckInstance interaction_estimate_check(const PotentialSpec& spec,
                                         const ScaledPotentialParams& params,
                                         const ComplexField3D& phi, double cgn,
                                         std::uint64_t seed, const PairInteraction* lhs_op) {
  params.validate();
  require(cgn > 0, "interaction_estimate: cgn must be positive");
  if (spec.kind != PotentialKind::Zero) require_admissible_shape(spec);
  CheckInstance c;
  c.name = "interaction-estimate";
  c.seed = seed;
  c.tolerance = 1e-8;
  const SlabGrid& g = phi.grid();
  c.resolution = {g.torus().n1(), g.torus().n2(), g.nz()};
  const double lhs =
      lhs_op ? (*lhs_op)(phi) : pair_interaction(phi, absolute(spec), params);
  const double norm = spec.kind == PotentialKind::Zero ? 0.0 : mixed_norm_inf1(spec).value;
  const double kinetic = quadratic_form(FourierMultiplier::renormalized_kinetic(params.L), phi);
  const double rhs = std::pow(cgn, 4) * norm * kinetic;
  c.margin = rhs - lhs;
  c.passed = c.margin >= -c.tolerance;
  c.details = {{"lhs", lhs},       {"rhs", rhs},        {"kinetic", kinetic},
               {"mixed_norm", norm}, {"N", params.N},   {"L", params.L},
               {"c", params.c()},  {"cgn", cgn}};
  return c;
}

CheckInstance interaction_estimate_check(const PotentialSpec& spec,
                                         const ScaledPotentialParams& params, TrialState state,
                                         std::uint64_t seed, double cgn, const SlabGrid& grid,
                                         const PairInteraction* lhs_op) {
  if (state == TrialState::Random) {
    CheckInstance c =
        interaction_estimate_check(spec, params, random_slab_field(grid, seed), cgn, seed, lhs_op);
    c.details["state"] = "random";
    return c;
  }
  const auto flat = ComplexField2D::from_function(grid.torus(), [](double, double) {
    return cd(1.0 / kTwoPi);
  });
  CheckInstance c = interaction_estimate_check(
      spec, params, ComplexField3D::transverse_ground(grid, flat), cgn, seed, lhs_op);
  c.details["state"] = "product";
  return c;
}

// ---------------------------------------------------------------------------

double PositiveSymbolPotential::weight(int n1, int n2) const {
  if (std::abs(n1) > band || std::abs(n2) > band) return 0.0;
  return weights[(n1 + band) * (2 * band + 1) + (n2 + band)];
}

double PositiveSymbolPotential::profile_z(double z) const {
  return std::sqrt(kPi) / width_z * std::exp(-z * z / (4 * width_z * width_z));
}

double PositiveSymbolPotential::value(double x1, double x2, double z) const {
  double s = 0.0;
  for (int n1 = -band; n1 <= band; ++n1) {
    for (int n2 = -band; n2 <= band; ++n2) s += weight(n1, n2) * std::cos(n1 * x1 + n2 * x2);
  }
  return s * profile_z(z);
}

bool PositiveSymbolPotential::symbol_nonnegative() const {
  if (static_cast<int>(weights.size()) != (2 * band + 1) * (2 * band + 1) || width_z <= 0) {
    return false;
  }
  for (int n1 = -band; n1 <= band; ++n1) {
    for (int n2 = -band; n2 <= band; ++n2) {
      if (weight(n1, n2) < 0 || weight(n1, n2) != weight(-n1, -n2)) return false;
    }
  }
  return true;
}

PositiveSymbolPotential random_positive_symbol_potential(std::uint64_t seed, int band) {
  PositiveSymbolPotential V;
  V.band = band;
  const int w = 2 * band + 1;
  V.weights.assign(w * w, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n1 = -band; n1 <= band; ++n1) {
    for (int n2 = -band; n2 <= band; ++n2) {
      const double a = u(rng) * std::exp(-(double(n1) * n1 + double(n2) * n2) / 2.0);
      // Fill each +-n pair once.
      if (n1 > 0 || (n1 == 0 && n2 >= 0)) {
        V.weights[(n1 + band) * w + (n2 + band)] = a;
        V.weights[(-n1 + band) * w + (-n2 + band)] = a;
      }
    }
  }
  V.width_z = 0.3 + 0.4 * u(rng);
  return V;
}

double EtaSpec::value(double x1, double x2, double z) const {
  const double d = (z - center) / width;
  return scale * (1.0 + modulation * std::cos(x1) * std::cos(x2)) * std::exp(-d * d);
}

FourierBoundTerms fourier_bound_terms(const std::vector<Point3>& points,
                                      const PositiveSymbolPotential& V, const EtaSpec& eta) {
  require(eta.modulation >= 0 && eta.modulation <= 1 && eta.width > 0 && eta.scale >= 0,
          "fourier_bound: eta must be a nonnegative density");
  FourierBoundTerms t;
  const std::size_t N = points.size();
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t k = j + 1; k < N; ++k) {
      t.pair_sum += V.value(points[j].x1 - points[k].x1, points[j].x2 - points[k].x2,
                            points[j].z - points[k].z);
    }
  }
  t.diagonal = 0.5 * N * V.value(0, 0, 0);
  if (eta.scale == 0.0) return t;

  // eta = scale sum_n e_n exp(i n.x) G(z) with e_0 = 1, e_{+-1,+-1} = modulation / 4.
  auto e_coef = [&](int n1, int n2) {
    if (n1 == 0 && n2 == 0) return 1.0;
    if (std::abs(n1) == 1 && std::abs(n2) == 1) return eta.modulation / 4.0;
    return 0.0;
  };
  const QuadratureRule ur =
      composite_rule({eta.center - 8 * eta.width, eta.center + 8 * eta.width}, 16, 16);
  auto G = [&](double z) {
    const double d = (z - eta.center) / eta.width;
    return std::exp(-d * d);
  };
  auto vG = [&](double z) {
    double s = 0.0;
    for (std::size_t i = 0; i < ur.nodes.size(); ++i) {
      s += ur.weights[i] * V.profile_z(z - ur.nodes[i]) * G(ur.nodes[i]);
    }
    return s;
  };
  const double four_pi2 = kTwoPi * kTwoPi;
  for (const Point3& r : points) {
    double xs = 0.0;
    for (int n1 = -1; n1 <= 1; ++n1) {
      for (int n2 = -1; n2 <= 1; ++n2) {
        xs += V.weight(n1, n2) * e_coef(n1, n2) * std::cos(n1 * r.x1 + n2 * r.x2);
      }
    }
    t.one_body += eta.scale * four_pi2 * xs * vG(r.z);
  }
  t.one_body /= std::pow(kTwoPi, 3);

  double xs = 0.0;
  for (int n1 = -1; n1 <= 1; ++n1) {
    for (int n2 = -1; n2 <= 1; ++n2) xs += V.weight(n1, n2) * e_coef(n1, n2) * e_coef(-n1, -n2);
  }
  double zz = 0.0;
  for (std::size_t i = 0; i < ur.nodes.size(); ++i) {
    zz += ur.weights[i] * G(ur.nodes[i]) * vG(ur.nodes[i]);
  }
  const double double_integral = eta.scale * eta.scale * four_pi2 * four_pi2 * xs * zz;
  t.self_energy = double_integral / (2.0 * std::pow(kTwoPi, 6));
  return t;
}

CheckInstance fourier_lower_bound_check(const std::vector<Point3>& points,
                                        const PositiveSymbolPotential& V, const EtaSpec& eta,
                                        std::uint64_t seed) {
  CheckInstance c;
  c.name = "fourier-lower-bound";
  c.seed = seed;
  c.tolerance = 1e-8;
  c.resolution = {static_cast<int>(points.size()), V.band, 16 * 16};
  if (!V.symbol_nonnegative()) {
    c.rejected = true;
    c.details = {{"reason", "Fourier data of V is not nonnegative and symmetric"}};
    return c;
  }
  const FourierBoundTerms t = fourier_bound_terms(points, V, eta);
  c.margin = t.pair_sum - t.rhs();
  c.passed = c.margin >= -c.tolerance;
  c.details = {{"pair_sum", t.pair_sum},
               {"one_body", t.one_body},
               {"self_energy", t.self_energy},
               {"diagonal", t.diagonal},
               {"rhs", t.rhs()}};
  return c;
}

CheckInstance fourier_lower_bound_check(int n_points, const EtaSpec& eta, std::uint64_t seed) {
  require(n_points >= 1, "fourier_lower_bound: need at least one point");
  const PositiveSymbolPotential V = random_positive_symbol_potential(seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> ux(-kPi, kPi), uz(-kPi / 2, kPi / 2);
  std::vector<Point3> pts(n_points);
  for (Point3& p : pts) p = {ux(rng), ux(rng), uz(rng)};
  EtaSpec e = eta;
  // Mass of eta with unit scale is (2 pi)^2 sqrt(pi) width.
  e.scale = eta.scale * std::pow(kTwoPi, 3) * n_points / (kTwoPi * kTwoPi * std::sqrt(kPi) * eta.width);
  return fourier_lower_bound_check(pts, V, e, seed);
}

// ---------------------------------------------------------------------------

double operator_ratio(OperatorBound which, const ComplexField3D& phi, const PotentialSpec& spec,
                      const ScaledPotentialParams& params, double delta) {
  require(delta > 0 && delta < 1, "operator_ratio: delta must lie in (0, 1)");
  const double num = pair_interaction(phi, absolute(spec), params);
  double den = 0.0;
  if (which == OperatorBound::Bilinear) {
    den = std::pow(quadratic_form(FourierMultiplier::bessel_x(0.5 + delta), phi), 2);
  } else {
    const double mass = quadratic_form(FourierMultiplier::identity(), phi);
    den = std::pow(params.N / params.L, delta) *
          quadratic_form(FourierMultiplier::bessel_x(1.0), phi) * mass;
  }
  require(den > 0, "operator_ratio: zero field");
  return num / den;
}

CheckInstance operator_bound_ratio(OperatorBound which, const PotentialSpec& spec, double beta,
                                   double c, const std::vector<double>& L_values,
                                   std::uint64_t seed, double delta, double band) {
  require(band >= 1, "operator_bound_ratio: band must be >= 1");
  const auto ladder = scaling_ladder(beta, c, L_values);
  const SlabGrid grid(TorusGrid(16, 16), 6);
  const ComplexField3D phi = random_slab_field(grid, seed);
  CheckInstance out;
  out.name = which == OperatorBound::Bilinear ? "operator-bound-bilinear" : "operator-bound-one-body";
  out.seed = seed;
  out.tolerance = 0.0;
  out.resolution = {16, 16, 6};
  std::vector<double> ratios;
  for (const auto& r : ladder) ratios.push_back(operator_ratio(which, phi, spec, r.params(), delta));
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  // The one-body bound carries its own (N/L)^delta growth, so only growth
  // past the first rung counts against it; the bilinear bound is scale-free.
  const double lo = which == OperatorBound::Bilinear
                        ? *std::min_element(ratios.begin(), ratios.end())
                        : ratios.front();
  const double spread = hi == 0.0 ? 1.0 : (lo > 0 ? hi / lo : std::numeric_limits<double>::infinity());
  out.margin = std::isfinite(spread) ? band - spread : -band;
  out.passed = std::isfinite(spread) && spread <= band;
  out.details = {{"ratios", ratios}, {"L", L_values}, {"c", c}, {"delta", delta},
                 {"band", band}, {"spread", std::isfinite(spread) ? spread : -1.0}};
  return out;
}

// ---------------------------------------------------------------------------

double scalar_interpolation_margin(double alpha, double eta, double lambda) {
  return alpha / eta * lambda + (1 - alpha) * std::pow(eta, alpha / (1 - alpha)) -
         std::pow(lambda, alpha);
}

double swapped_interpolation_margin(double alpha, double eta, double lambda) {
  return (1 - alpha) / eta * lambda + alpha * std::pow(eta, alpha / (1 - alpha)) -
         std::pow(lambda, alpha);
}

CheckInstance scalar_interpolation_check(double alpha, double eta, int samples) {
  require(alpha > 0 && alpha < 1, "scalar_interpolation: alpha must lie in (0, 1)");
  require(eta > 0 && eta < 1, "scalar_interpolation: eta must lie in (0, 1)");
  require(samples >= 2, "scalar_interpolation: need at least two samples");
  CheckInstance c;
  c.name = "scalar-interpolation";
  c.tolerance = 1e-8;
  c.resolution = {samples};
  double worst = scalar_interpolation_margin(alpha, eta, std::pow(eta, 1 / (1 - alpha)));
  for (int i = 0; i < samples; ++i) {
    const double lambda = std::pow(10.0, -8.0 + 16.0 * i / (samples - 1));
    worst = std::min(worst, scalar_interpolation_margin(alpha, eta, lambda));
  }
  c.margin = worst;
  c.passed = worst >= -c.tolerance;
  c.details = {{"alpha", alpha}, {"eta", eta}};
  return c;
}

CheckInstance scalar_interpolation_sample(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0), e(-6.0, 6.0);
  double alpha = 0, eta = 0;
  while (!(alpha > 0 && alpha < 1)) alpha = u(rng);
  while (!(eta > 0 && eta < 1)) eta = u(rng);
  const double lambda = std::pow(10.0, e(rng));
  CheckInstance c;
  c.name = "scalar-interpolation";
  c.seed = seed;
  c.tolerance = 1e-8;
  c.resolution = {1};
  c.margin = scalar_interpolation_margin(alpha, eta, lambda);
  c.passed = c.margin >= -c.tolerance;
  c.details = {{"alpha", alpha}, {"eta", eta}, {"lambda", lambda}};
  return c;
}

// ---------------------------------------------------------------------------

namespace {

struct ProductWeights {
  // (|k|^2, a_k b_{-k}) summed over each shell.
  std::vector<std::pair<double, double>> shells;
};

ProductWeights product_weights(const ComplexField2D& f, const ComplexField2D& j) {
  require(f.grid() == j.grid(), "approx_identity: f and j grids differ");
  const TorusGrid& t = f.grid();
  const auto fv = to_physical(f);
  const auto jv = to_physical(j);
  std::vector<cd> a(t.size()), b(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = std::norm(fv.values()[i]);
    b[i] = d;
    a[i] = jv.values()[i].real() * d;
  }
  const auto A = to_spectral(ComplexField2D::from_values(t, a));
  const auto B = to_spectral(ComplexField2D::from_values(t, b));
  std::map<long, cd> acc;
  for (int i1 = 0; i1 < t.n1(); ++i1) {
    for (int i2 = 0; i2 < t.n2(); ++i2) {
      const int k1 = t.k1(i1), k2 = t.k2(i2);
      acc[long(k1) * k1 + long(k2) * k2] += A.coefficient(k1, k2) * B.coefficient(-k1, -k2);
    }
  }
  ProductWeights w;
  for (const auto& [k2, v] : acc) w.shells.push_back({std::sqrt(double(k2)), v.real()});
  return w;
}

// Hankel data tabulated once per eps: T(eps, lambda) then only re-weights
// the transverse overlap.
class IdentityTerms {
 public:
  IdentityTerms(const PotentialSpec& rho, const ProductWeights& w, const std::vector<double>& eps)
      : rule_(composite_rule({-rho.support_z(), 0.0, rho.support_z()}, 8, 12)) {
    double big = 0.0;
    for (const auto& sh : w.shells) big = std::max(big, std::abs(sh.second));
    for (const auto& sh : w.shells) {
      if (std::abs(sh.second) > 1e-15 * big) shells_.push_back(sh);
    }
    const std::size_t nv = rule_.nodes.size();
    base_.resize(nv);
    for (std::size_t n = 0; n < nv; ++n) {
      base_[n] = transverse_overlap(rule_.nodes[n]) * x_fourier(rho, 0.0, rule_.nodes[n]);
    }
    table_.resize(eps.size());
    for (std::size_t e = 0; e < eps.size(); ++e) {
      table_[e].resize(shells_.size() * nv);
      for (std::size_t sh = 0; sh < shells_.size(); ++sh) {
        for (std::size_t n = 0; n < nv; ++n) {
          table_[e][sh * nv + n] = x_fourier(rho, eps[e] * shells_[sh].first, rule_.nodes[n]);
        }
      }
    }
  }

  double operator()(std::size_t e, double lambda) const {
    const std::size_t nv = rule_.nodes.size();
    std::vector<double> h(nv);
    for (std::size_t n = 0; n < nv; ++n) h[n] = transverse_overlap(lambda * rule_.nodes[n]);
    double T = 0.0;
    for (std::size_t sh = 0; sh < shells_.size(); ++sh) {
      double s = 0.0;
      for (std::size_t n = 0; n < nv; ++n) {
        s += rule_.weights[n] * (h[n] * table_[e][sh * nv + n] - base_[n]);
      }
      T += shells_[sh].second * s;
    }
    return T;
  }

 private:
  QuadratureRule rule_;
  std::vector<std::pair<double, double>> shells_;
  std::vector<double> base_;
  std::vector<std::vector<double>> table_;
};

void require_identity_shape(const PotentialSpec& rho) {
  require(rho.kind != PotentialKind::Zero, "approx_identity: rho must be nonzero");
  require(rho.x_shift[0] == 0 && rho.x_shift[1] == 0, "approx_identity: rho must be centred");
}

}  // namespace

double approx_identity_term(const PotentialSpec& rho_spec, const ComplexField2D& f,
                            const ComplexField2D& j, double eps, double lambda) {
  require_identity_shape(rho_spec);
  require(eps > 0 && eps * rho_spec.radius_x < kPi, "approx_identity: eps out of range");
  require(lambda > 0 && lambda * rho_spec.support_z() < kPi / 2,
          "approx_identity: scaled rho leaves the slab");
  return IdentityTerms(rho_spec, product_weights(f, j), {eps})(0, lambda);
}

double rho_l1_modulus(const PotentialSpec& rho_spec, double lambda) {
  require_identity_shape(rho_spec);
  require(lambda > 0, "rho_l1_modulus: lambda must be positive");
  const double Z = rho_spec.support_z() * std::max(lambda, 1.0);
  const QuadratureRule zr = composite_rule({-Z, 0.0, Z}, 32, 8);
  const QuadratureRule rr = composite_rule({0.0, rho_spec.radius_x}, 16, 8);
  double s = 0.0;
  for (std::size_t a = 0; a < zr.nodes.size(); ++a) {
    const double z = zr.nodes[a];
    double inner = 0.0;
    for (std::size_t b = 0; b < rr.nodes.size(); ++b) {
      const double r = rr.nodes[b];
      const double d = rho_spec.radial_profile(r, z / lambda) / lambda - rho_spec.radial_profile(r, z);
      inner += rr.weights[b] * std::abs(d) * r;
    }
    s += zr.weights[a] * inner;
  }
  return kTwoPi * s;
}

CheckInstance approx_identity_rate(const PotentialSpec& rho_spec, const ComplexField2D& f,
                                   const ComplexField2D& j, const std::vector<double>& eps_ladder,
                                   const std::vector<double>& lambda_ladder, double kappa) {
  require(kappa >= 0 && kappa < 1, "approx_identity: kappa must lie in [0, 1)");
  require(eps_ladder.size() >= 2, "approx_identity: need at least two eps values");
  require_identity_shape(rho_spec);
  const ProductWeights w = product_weights(f, j);
  CheckInstance c;
  c.name = "approx-identity";
  c.tolerance = 0.0;
  c.resolution = {f.grid().n1(), f.grid().n2()};

  for (double e : eps_ladder) {
    require(e > 0 && e * rho_spec.radius_x < kPi, "approx_identity: eps out of range");
  }
  const IdentityTerms terms(rho_spec, w, eps_ladder);
  std::vector<double> T1;
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) T1.push_back(terms(i, 1.0));
  double scale = 0.0;
  for (double t : T1) scale = std::max(scale, std::abs(t));
  const bool vanishing = scale < 1e-13;
  double slope = 0.0;
  if (!vanishing) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(T1.size());
    for (std::size_t i = 0; i < T1.size(); ++i) {
      const double x = std::log(eps_ladder[i]), y = std::log(std::abs(T1[i]));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  const bool rate_ok = vanishing || slope >= kappa - 0.1;

  // Along the lambda ladder: discrepancy and L^1 modulus both shrink.
  std::vector<double> disc, modulus, ratio;
  bool lambda_ok = true;
  for (double lam : lambda_ladder) {
    require(lam > 0 && lam * rho_spec.support_z() < kPi / 2,
            "approx_identity: scaled rho leaves the slab");
    double d = 0.0;
    for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
      d = std::max(d, std::abs(terms(i, lam) - T1[i]));
    }
    const double m = rho_l1_modulus(rho_spec, lam);
    disc.push_back(d);
    modulus.push_back(m);
    ratio.push_back(m > 0 ? d / m : (d == 0 ? 0.0 : std::numeric_limits<double>::infinity()));
    if (!std::isfinite(ratio.back())) lambda_ok = false;
  }
  for (std::size_t i = 1; i < lambda_ladder.size(); ++i) {
    if (std::abs(lambda_ladder[i] - 1) >= std::abs(lambda_ladder[i - 1] - 1)) lambda_ok = false;
    if (modulus[i] >= modulus[i - 1]) lambda_ok = false;
    if (disc[i] > disc[i - 1]) lambda_ok = false;
  }
  double max_ratio = 0.0;
  for (double r : ratio) max_ratio = std::max(max_ratio, std::isfinite(r) ? r : 0.0);

  c.margin = vanishing ? 0.0 : slope - (kappa - 0.1);
  c.passed = rate_ok && lambda_ok;
  c.details = {{"T", T1},           {"eps", eps_ladder},      {"slope", slope},
               {"kappa", kappa},    {"vanishing", vanishing}, {"lambda", lambda_ladder},
               {"discrepancy", disc}, {"l1_modulus", modulus}, {"max_ratio", max_ratio},
               {"lambda_ok", lambda_ok}};
  return c;
}

// ---------------------------------------------------------------------------

namespace {

double bump_derivative(double t) {
  if (std::abs(t) >= 1) return 0.0;
  const double u = 1 - t * t;
  return bump(t) * (-2 * t / (u * u));
}

struct ProfileNorms {
  double f2 = 0.0, grad_f2 = 0.0, g2 = 0.0, dg2 = 0.0;
};

// Norms of f(x) = A b(|x| / a) and g(z) = B b(z / b) dilated by (eps, lambda)
// in the L^2-preserving way, by quadrature on the dilated supports.
ProfileNorms profile_norms(double a, double b, double fA, double gB, double eps, double lambda,
                           int order) {
  const QuadratureRule rr = composite_rule({0.0, eps * a}, 4, order);
  const QuadratureRule zr = composite_rule({-lambda * b, 0.0, lambda * b}, 4, order);
  ProfileNorms n;
  for (std::size_t i = 0; i < rr.nodes.size(); ++i) {
    const double r = rr.nodes[i], t = r / (eps * a);
    const double f = fA * bump(t) / eps;
    const double df = fA * bump_derivative(t) / (eps * eps * a);
    n.f2 += rr.weights[i] * kTwoPi * r * f * f;
    n.grad_f2 += rr.weights[i] * kTwoPi * r * df * df;
  }
  for (std::size_t i = 0; i < zr.nodes.size(); ++i) {
    const double z = zr.nodes[i], t = z / (lambda * b);
    const double g = gB * bump(t) / std::sqrt(lambda);
    const double dg = gB * bump_derivative(t) / (std::sqrt(lambda) * lambda * b);
    n.g2 += zr.weights[i] * g * g;
    n.dg2 += zr.weights[i] * dg * dg;
  }
  return n;
}

struct Node3 {
  double x1, x2, z, w;
};

// Tensor rule for |f_eps g_lam|^2: polar Gauss in |x|, trapezoid in angle, Gauss in z.
std::vector<Node3> density_nodes(double a, double b, double fA, double gB, double eps,
                                 double lambda, int order) {
  const QuadratureRule& gl = gauss_legendre(order);
  const int nth = 2 * order;
  const double R = eps * a, Zb = lambda * b;
  std::vector<Node3> out;
  for (int i = 0; i < order; ++i) {
    const double r = 0.5 * R * (gl.nodes[i] + 1), wr = 0.5 * R * gl.weights[i];
    const double f = fA * bump(r / R) / eps;
    for (int k = 0; k < nth; ++k) {
      const double th = kTwoPi * k / nth;
      for (int m = 0; m < order; ++m) {
        const double z = Zb * gl.nodes[m], wz = Zb * gl.weights[m];
        const double g = gB * bump(z / Zb) / std::sqrt(lambda);
        const double w = wr * r * (kTwoPi / nth) * wz * f * f * g * g;
        out.push_back({r * std::cos(th), r * std::sin(th), z, w});
      }
    }
  }
  return out;
}

}  // namespace

ScalingIdentity scaling_identity(const PotentialSpec& spec, const ScaledPotentialParams& params,
                                 const BumpProfiles& profiles, int order) {
  params.validate(true);
  require(order >= 4, "scaling_identity: order must be >= 4");
  const double a = profiles.radius_x, b = profiles.radius_z;
  require(a > 0 && a < kPi / 2, "scaling_identity: x-profile radius must lie in (0, pi/2)");
  require(b > 0 && b < kPi / 2, "scaling_identity: z-profile radius must lie in (0, pi/2)");
  const double s = params.s(), c = params.c(), L = params.L;
  const double eps = 1 / s, lambda = 1 / c;
  if (lambda * b >= kPi / 2) {
    throw ValidationError("scaling_identity: scaled z-profile leaves the slab (need radius_z < c pi/2)");
  }
  require(eps * a < kPi, "scaling_identity: scaled x-profile does not fit the torus");

  const ProfileNorms raw = profile_norms(a, b, 1.0, 1.0, 1.0, 1.0, order);
  const double fA = 1 / std::sqrt(raw.f2), gB = 1 / std::sqrt(raw.g2);
  const ProfileNorms u = profile_norms(a, b, fA, gB, 1.0, 1.0, order);
  const ProfileNorms d = profile_norms(a, b, fA, gB, eps, lambda, order);

  ScalingIdentity out;
  out.kinetic_terms = d.f2 * d.g2 *
                      (d.grad_f2 * d.g2 + d.f2 * d.g2 + d.f2 * d.dg2 / (L * L) - d.f2 * d.g2 / (L * L));
  out.kinetic_closed = u.f2 * u.g2 * u.g2 * (u.grad_f2 / (eps * eps) + u.f2) +
                       u.f2 * u.f2 * u.g2 * (u.dg2 / (lambda * lambda) - u.g2) / (L * L);
  if (spec.kind == PotentialKind::Zero || spec.amplitude == 0.0) return out;

  const auto plain = density_nodes(a, b, fA, gB, 1.0, 1.0, order);
  const auto scaled = density_nodes(a, b, fA, gB, eps, lambda, order);
  std::vector<double> part(plain.size()), part_s(plain.size());
  parallel_for(plain.size(), [&](std::size_t i) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < plain.size(); ++k) {
      s1 += plain[k].w * spec(plain[i].x1 - plain[k].x1, plain[i].x2 - plain[k].x2,
                              plain[i].z - plain[k].z);
      s2 += scaled[k].w * eval_scaled_potential(spec, params, Frame::Rescaled,
                                                scaled[i].x1 - scaled[k].x1,
                                                scaled[i].x2 - scaled[k].x2,
                                                scaled[i].z - scaled[k].z);
    }
    part[i] = plain[i].w * s1;
    part_s[i] = scaled[i].w * s2;
  });
  double i0 = 0.0, is = 0.0;
  for (std::size_t i = 0; i < plain.size(); ++i) i0 += part[i], is += part_s[i];
  out.interaction_unscaled = L * s * s * s * i0;
  out.interaction_scaled = is;
  return out;
}

CheckInstance scaling_regime_identity(const PotentialSpec& spec, double beta, double c, double L,
                                      const BumpProfiles& profiles,
                                      const std::vector<double>& c_sweep,
                                      const std::vector<double>& L_sweep) {
  require(c_sweep.size() >= 2 && !L_sweep.empty(), "scaling_regime: sweep too short");
  const ScaledPotentialParams params{L * std::pow(c / L, 1 / beta), L, beta};
  const ScalingIdentity id = scaling_identity(spec, params, profiles);
  auto rel = [](double x, double y) {
    const double s = std::max(std::abs(x), std::abs(y));
    return s == 0 ? 0.0 : std::abs(x - y) / s;
  };
  const double e_int = rel(id.interaction_scaled, id.interaction_unscaled);
  const double e_kin = rel(id.kinetic_terms, id.kinetic_closed);

  // Regime sweep with closed forms: interaction L s^3 I0, kinetic from the
  // unit-scale norms at eps = 1/s, lambda = 1/c.
  const double I0 = std::abs(id.interaction_unscaled) / (L * std::pow(params.s(), 3));
  const ProfileNorms raw = profile_norms(profiles.radius_x, profiles.radius_z, 1, 1, 1, 1, 12);
  const double fA = 1 / std::sqrt(raw.f2), gB = 1 / std::sqrt(raw.g2);
  const ProfileNorms u = profile_norms(profiles.radius_x, profiles.radius_z, fA, gB, 1, 1, 12);
  std::vector<std::vector<double>> ratio(c_sweep.size());
  for (std::size_t i = 0; i < c_sweep.size(); ++i) {
    const double cc = c_sweep[i];
    require(profiles.radius_z < cc * kPi / 2, "scaling_regime: z-profile too wide for the sweep");
    for (double l : L_sweep) {
      const double s = cc / l;
      const double kin = u.grad_f2 * s * s + 1 + (u.dg2 * cc * cc - 1) / (l * l);
      ratio[i].push_back(l * s * s * s * I0 / kin);
    }
  }
  bool bounded = true, increasing = true;
  for (std::size_t i = 0; i < c_sweep.size(); ++i) {
    if (c_sweep[i] > 1) continue;
    const auto [lo, hi] = std::minmax_element(ratio[i].begin(), ratio[i].end());
    if (*lo > 0 && *hi / *lo > 3) bounded = false;
  }
  for (std::size_t i = 1; i < c_sweep.size(); ++i) {
    for (std::size_t l = 0; l < L_sweep.size(); ++l) {
      if (!(ratio[i][l] > ratio[i - 1][l])) increasing = false;
    }
  }
  const std::size_t last = c_sweep.size() - 1;
  bool growing = true;
  for (std::size_t l = 0; l < L_sweep.size(); ++l) {
    const double expected = c_sweep[last] / c_sweep[last - 1];
    if (ratio[last][l] / ratio[last - 1][l] < 0.75 * expected) growing = false;
  }
  const bool verdict = I0 == 0.0 || (bounded && increasing && growing);

  CheckInstance out;
  out.name = "scaling-identity";
  out.tolerance = 1e-8;
  out.resolution = {12};
  out.margin = out.tolerance - std::max(e_int, e_kin);
  out.passed = out.margin >= 0 && verdict;
  out.details = {{"interaction_scaled", id.interaction_scaled},
                 {"interaction_unscaled", id.interaction_unscaled},
                 {"kinetic_terms", id.kinetic_terms},
                 {"kinetic_closed", id.kinetic_closed},
                 {"rel_error_interaction", e_int},
                 {"rel_error_kinetic", e_kin},
                 {"c_sweep", c_sweep},
                 {"L_sweep", L_sweep},
                 {"ratio", ratio},
                 {"bounded", bounded},
                 {"increasing", increasing},
                 {"growing", growing}};
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> suite_names() {
  return {"hoffman-ostenhof", "interaction-estimate", "fourier-lower-bound", "operator-bound",
          "scalar-interpolation", "approx-identity", "scaling-identity", "all"};
}

namespace {

std::vector<CheckInstance> run_indexed(std::size_t n, const std::function<CheckInstance(std::size_t)>& f) {
  std::vector<CheckInstance> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

}  // namespace

std::vector<CheckInstance> run_suite(const std::string& name, const SuiteOptions& o) {
  require(o.samples >= 0, "run_suite: samples must be nonnegative");
  auto count = [&](int fallback) { return std::size_t(o.samples > 0 ? o.samples : fallback); };
  if (name == "all") {
    std::vector<CheckInstance> all;
    for (const std::string& s : suite_names()) {
      if (s == "all") continue;
      SuiteOptions sub = o;
      if (s != "scalar-interpolation") sub.samples = 0;
      auto part = run_suite(s, sub);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  if (name == "hoffman-ostenhof") {
    return run_indexed(count(100), [&](std::size_t i) {
      const int particles = 2 + int(i % 2), dim = 1 + int((i / 2) % 2);
      return hoffman_ostenhof_check(particles, dim, o.seed + i);
    });
  }
  if (name == "interaction-estimate") {
    double cgn = o.cgn;
    if (cgn <= 0) cgn = estimate_cgn(GnOptions{}).cgn;
    const std::vector<std::pair<double, double>> points{{0.5, 0.5}, {0.9, 0.25}, {0.99, 0.125}};
    const std::size_t fields = count(50);
    const SlabGrid grid(TorusGrid(16, 16), 6);
    std::vector<ScaledPotentialParams> params;
    std::vector<std::optional<PairInteraction>> ops(points.size());
    for (const auto& [c, L] : points) params.push_back(scaling_ladder(0.25, c, {L}).front().params());
    parallel_for(points.size(), [&](std::size_t p) { ops[p].emplace(grid, absolute(o.spec), params[p]); });
    return run_indexed(points.size() * (fields + 1), [&](std::size_t i) {
      const std::size_t p = i / (fields + 1), f = i % (fields + 1);
      const PairInteraction* op = &*ops[p];
      if (f == fields) {
        return interaction_estimate_check(o.spec, params[p], TrialState::Product, 0, cgn, grid, op);
      }
      return interaction_estimate_check(o.spec, params[p], TrialState::Random, o.seed + f, cgn, grid, op);
    });
  }
  if (name == "fourier-lower-bound") {
    return run_indexed(count(100), [&](std::size_t i) {
      return fourier_lower_bound_check(5, EtaSpec{}, o.seed + i);
    });
  }
  if (name == "operator-bound") {
    return run_indexed(2 * count(1), [&](std::size_t i) {
      const OperatorBound which = i % 2 == 0 ? OperatorBound::Bilinear : OperatorBound::OneBody;
      return operator_bound_ratio(which, o.spec, 0.25, 0.9, {0.5, 0.25, 0.125}, o.seed + i / 2);
    });
  }
  if (name == "scalar-interpolation") {
    return run_indexed(count(10000), [&](std::size_t i) { return scalar_interpolation_sample(o.seed + i); });
  }
  if (name == "approx-identity") {
    return run_indexed(count(1), [&](std::size_t i) {
      const TorusGrid grid(32, 32);
      const auto f = to_physical(random_band_limited_field(grid, o.seed + i, 1.5));
      // Keep |k_i| <= 4 so that j |f|^2 is resolved exactly.
      std::vector<cd> coef = to_spectral(f).coefficients();
      for (int i1 = 0; i1 < grid.n1(); ++i1) {
        for (int i2 = 0; i2 < grid.n2(); ++i2) {
          if (std::abs(grid.k1(i1)) > 4 || std::abs(grid.k2(i2)) > 4) coef[i1 * grid.n2() + i2] = 0;
        }
      }
      const auto fb = ComplexField2D::from_coefficients(grid, coef);
      const auto j = ComplexField2D::from_function(grid, [](double x1, double x2) {
        return cd(std::cos(x1) + 0.5 * std::sin(x2));
      });
      CheckInstance c = approx_identity_rate(PotentialSpec::radial(1.0, kPi / 2, kPi / 4), fb, j,
                                             {0.25, 0.125, 0.0625, 0.03125},
                                             {0.5, 0.75, 0.9, 0.99}, 0.5);
      c.seed = o.seed + i;
      return c;
    });
  }
  if (name == "scaling-identity") {
    return {scaling_regime_identity(o.spec, 0.25, 0.9, 0.5, BumpProfiles{})};
  }
  throw ValidationError("unknown suite '" + name + "'");
}

SuiteSummary summarize(const std::vector<CheckInstance>& instances) {
  SuiteSummary s;
  bool first = true;
  for (const auto& c : instances) {
    ++s.total;
    if (c.rejected) {
      ++s.rejected;
      continue;
    }
    if (c.passed) ++s.passed;
    s.min_margin = first ? c.margin : std::min(s.min_margin, c.margin);
    first = false;
  }
  return s;
}

nlohmann::json to_json(const CheckInstance& c) {
  return {{"name", c.name},           {"seed", c.seed},     {"resolution", c.resolution},
          {"margin", c.margin},       {"passed", c.passed}, {"tolerance", c.tolerance},
          {"rejected", c.rejected},   {"details", c.details}};
}

nlohmann::json to_json(const std::vector<CheckInstance>& instances) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& c : instances) a.push_back(to_json(c));
  return a;
}

std::string suite_table(const std::vector<CheckInstance>& instances) {
  std::map<std::string, std::vector<CheckInstance>> groups;
  std::vector<std::string> order;
  for (const auto& c : instances) {
    if (!groups.count(c.name)) order.push_back(c.name);
    groups[c.name].push_back(c);
  }
  std::ostringstream out;
  out << std::left << std::setw(26) << "check" << std::right << std::setw(8) << "total"
      << std::setw(8) << "passed" << std::setw(10) << "rejected" << std::setw(26) << "min margin"
      << "\n";
  for (const auto& name : order) {
    const SuiteSummary s = summarize(groups[name]);
    out << std::left << std::setw(26) << name << std::right << std::setw(8) << s.total
        << std::setw(8) << s.passed << std::setw(10) << s.rejected << std::setw(26)
        << format_double(s.min_margin) << "\n";
  }
  return out.str();
}

}  // namespace dimred
