#include "dimred/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dimred/errors.hpp"
#include "dimred/quadrature.hpp"
#include "dimred/spectral.hpp"

namespace dimred {

namespace {

constexpr int kRhoPanels = 16;
constexpr int kRhoOrder = 16;

const QuadratureRule& unit_rho_rule() {
  static const QuadratureRule rule = composite_rule({0.0, 1.0}, kRhoPanels, kRhoOrder);
  return rule;
}

void check_radii(double rx, double rz) {
  require(std::isfinite(rx) && std::isfinite(rz) && rx > 0 && rz > 0,
          "potential: radii must be positive and finite");
}

}  // namespace

double bump(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - a * a));
}

PotentialSpec PotentialSpec::separable(double amplitude, double radius_x, double radius_z) {
  check_radii(radius_x, radius_z);
  require(std::isfinite(amplitude), "potential: amplitude must be finite");
  PotentialSpec p;
  p.kind = PotentialKind::Separable;
  p.amplitude = amplitude;
  p.radius_x = radius_x;
  p.radius_z = radius_z;
  return p;
}

PotentialSpec PotentialSpec::radial(double amplitude, double radius_x, double radius_z) {
  PotentialSpec p = separable(amplitude, radius_x, radius_z);
  p.kind = PotentialKind::Radial;
  return p;
}

PotentialSpec PotentialSpec::scaled(double factor) const {
  PotentialSpec p = *this;
  p.amplitude *= factor;
  return p;
}

double PotentialSpec::radial_profile(double rho, double z) const {
  switch (kind) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::Separable:
      return amplitude * bump(rho / radius_x) * bump(z / radius_z);
    case PotentialKind::Radial: {
      const double a = rho / radius_x;
      const double b = z / radius_z;
      return amplitude * bump(std::sqrt(a * a + b * b));
    }
  }
  return 0.0;
}

double PotentialSpec::operator()(double x1, double x2, double z) const {
  if (kind == PotentialKind::Zero) return 0.0;
  return radial_profile(std::hypot(x1 - x_shift[0], x2 - x_shift[1]), z);
}

double PotentialSpec::support_rho(double z) const {
  if (kind == PotentialKind::Zero || std::abs(z) >= radius_z) return 0.0;
  if (kind == PotentialKind::Separable) return radius_x;
  const double b = z / radius_z;
  return radius_x * std::sqrt(1.0 - b * b);
}

double ScaledPotentialParams::s() const { return std::pow(N / L, beta); }

void ScaledPotentialParams::validate(bool allow_supercritical) const {
  require(std::isfinite(N) && N > 0, "scaling: N must be positive");
  require(std::isfinite(L) && L > 0 && L <= 1, "scaling: L must lie in (0, 1]");
  require(std::isfinite(beta) && beta > 0 && beta < 3.0 / 7.0,
          "scaling: beta must lie in (0, 3/7)");
  if (!allow_supercritical) {
    require(c() <= 1.0 + 1e-12, "scaling: L (N/L)^beta must not exceed 1");
  }
}

double eval_scaled_potential(const PotentialSpec& spec, const ScaledPotentialParams& params,
                             Frame frame, double x1, double x2, double z) {
  params.validate(true);
  const double s = params.s();
  const double zmax = frame == Frame::Lab ? params.L * kPi : kPi;
  if (!(std::abs(z) < zmax) || !std::isfinite(x1) || !std::isfinite(x2)) {
    throw ValidationError("eval_scaled_potential: point outside the slab");
  }
  if (spec.kind == PotentialKind::Zero) return 0.0;
  const double prefactor = frame == Frame::Lab ? s * s * s : params.L * s * s * s;
  const double zs = frame == Frame::Lab ? s * z : params.c() * z;
  // Sum over periodic images whose support can reach the point.
  const double reach = (spec.radius_x + std::max(std::abs(spec.x_shift[0]), std::abs(spec.x_shift[1]))) / s;
  const int n1lo = static_cast<int>(std::floor((-reach - x1) / (2 * kPi)));
  const int n1hi = static_cast<int>(std::ceil((reach - x1) / (2 * kPi)));
  const int n2lo = static_cast<int>(std::floor((-reach - x2) / (2 * kPi)));
  const int n2hi = static_cast<int>(std::ceil((reach - x2) / (2 * kPi)));
  double sum = 0.0;
  for (int a = n1lo; a <= n1hi; ++a) {
    for (int b = n2lo; b <= n2hi; ++b) {
      sum += spec(s * (x1 + 2 * kPi * a), s * (x2 + 2 * kPi * b), zs);
    }
  }
  return prefactor * sum;
}

double x_integral(const PotentialSpec& spec, double z) {
  const double R = spec.support_rho(z);
  if (R == 0.0) return 0.0;
  const QuadratureRule& q = unit_rho_rule();
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double rho = R * q.nodes[i];
    s += q.weights[i] * spec.radial_profile(rho, z) * rho;
  }
  return 2 * kPi * R * s;
}

double x_fourier(const PotentialSpec& spec, double q, double z) {
  const double R = spec.support_rho(z);
  if (R == 0.0) return 0.0;
  const QuadratureRule& rule = unit_rho_rule();
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double rho = R * rule.nodes[i];
    s += rule.weights[i] * spec.radial_profile(rho, z) * std::cyl_bessel_j(0.0, q * rho) * rho;
  }
  return 2 * kPi * R * s;
}

namespace {

// sup over z of |f(z)| on [-zmax, zmax]: a uniform scan followed by golden
// section refinement around the best sample. Error is the refinement gain.
NormEstimate sup_abs(const std::function<double(double)>& f, double zmax) {
  if (zmax <= 0) return {};
  const int n = 128;
  int best = 0;
  double best_value = -1.0;
  for (int i = 0; i <= n; ++i) {
    const double v = std::abs(f(-zmax + 2 * zmax * i / n));
    if (v > best_value) best_value = v, best = i;
  }
  const double h = 2 * zmax / n;
  double a = std::max(-zmax, -zmax + (best - 1) * h);
  double b = std::min(zmax, -zmax + (best + 1) * h);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = std::abs(f(c)), fd = std::abs(f(d));
  for (int it = 0; it < 60 && b - a > 1e-12 * zmax; ++it) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = std::abs(f(c));
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = std::abs(f(d));
    }
  }
  const double refined = std::max({best_value, fc, fd});
  return {refined, refined - best_value};
}

}  // namespace

NormEstimate mixed_norm_inf1(const PotentialSpec& spec) {
  if (spec.kind == PotentialKind::Zero) return {};
  return sup_abs([&](double z) { return x_integral(spec, z); }, spec.radius_z);
}

NormEstimate mixed_norm_inf1(const PotentialSpec& spec, const ScaledPotentialParams& params,
                             Frame frame) {
  params.validate(true);
  if (spec.kind == PotentialKind::Zero) return {};
  const double s = params.s();
  const double zscale = frame == Frame::Lab ? s : params.c();
  const double prefactor = frame == Frame::Lab ? s * s * s : params.L * s * s * s;
  const QuadratureRule& q = unit_rho_rule();
  // Polar quadrature of the scaled function over its disk of support in x.
  auto slice = [&](double z) {
    const double R = spec.support_rho(zscale * z) / s;
    if (R == 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double rho = R * q.nodes[i];
      acc += q.weights[i] * prefactor * spec.radial_profile(s * rho, zscale * z) * rho;
    }
    return 2 * kPi * R * acc;
  };
  return sup_abs(slice, spec.radius_z / zscale);
}

double transverse_overlap(double u) {
  const double a = std::max(-kPi / 2, u - kPi / 2);
  const double b = std::min(kPi / 2, u + kPi / 2);
  if (b <= a) return 0.0;
  const double v = 0.25 * ((b - a) * (1.0 + 0.5 * std::cos(2 * u)) +
                           0.5 * (std::sin(2 * b) - std::sin(2 * a)) +
                           0.5 * (std::sin(2 * b - 2 * u) - std::sin(2 * a - 2 * u)) +
                           0.125 * (std::sin(4 * b - 2 * u) - std::sin(4 * a - 2 * u)));
  return 4.0 / (kPi * kPi) * v;
}

namespace {

double g0_at_level(const PotentialSpec& spec, int level) {
  const double R = spec.radius_z;
  // Panels aligned with the support edges and with the kink of the overlap at u = 0.
  const QuadratureRule rule = composite_rule({-R, 0.0, R}, 1 << level, 6);
  return integrate([&](double u) { return x_integral(spec, u) * transverse_overlap(u); }, rule);
}

}  // namespace

CouplingEstimate coupling_constant_g0(const PotentialSpec& spec, int quad_level) {
  require(quad_level >= 1 && quad_level <= 14, "coupling_constant_g0: quad_level out of range");
  // The x-integral absorbs translations, so only the centred shape is checked.
  PotentialSpec centred = spec;
  centred.x_shift = {0.0, 0.0};
  require_admissible_shape(centred);
  if (spec.kind == PotentialKind::Zero) return {0.0, 0.0, quad_level};
  const double fine = g0_at_level(spec, quad_level);
  const double coarse = g0_at_level(spec, quad_level - 1);
  return {fine, std::abs(fine - coarse), quad_level};
}

void require_admissible_shape(const PotentialSpec& spec) {
  if (spec.kind == PotentialKind::Zero) return;
  check_radii(spec.radius_x, spec.radius_z);
  require(spec.amplitude <= 0, "potential: amplitude must be nonpositive");
  require(spec.x_shift[0] == 0 && spec.x_shift[1] == 0, "potential: shifted V is not even");
  require(spec.radius_x < kPi && spec.radius_z < kPi / 2,
          "potential: support must lie strictly inside the slab");
}

AdmissibilityReport admissibility_check(const PotentialSpec& spec, double cgn, double alpha) {
  require(cgn > 0 && std::isfinite(cgn), "admissibility_check: cgn must be positive");
  require(alpha > 0 && alpha < 1, "admissibility_check: alpha must lie in (0, 1)");
  AdmissibilityReport r;

  // Pointwise checks on a sample grid covering the slab.
  const int n = 24, nz = 13;
  double defect = 0.0, vmax = -INFINITY;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < nz; ++k) {
        const double x1 = -kPi + 2 * kPi * (i + 0.5) / n;
        const double x2 = -kPi + 2 * kPi * (j + 0.37) / n;
        const double z = -kPi / 2 + kPi * (k + 0.5) / nz;
        const double v = spec(x1, x2, z);
        defect = std::max(defect, std::abs(v - spec(-x1, -x2, -z)));
        vmax = std::max(vmax, v);
      }
    }
  }
  r.even_defect = defect;
  r.even = defect <= 1e-12;
  r.max_value = std::max(vmax, spec.kind == PotentialKind::Zero ? 0.0 : spec.amplitude);
  r.nonpositive = r.max_value <= 0.0;

  if (spec.kind == PotentialKind::Zero) {
    r.support_margin = kPi / 2;
  } else {
    const double shift = std::max(std::abs(spec.x_shift[0]), std::abs(spec.x_shift[1]));
    r.support_margin = std::min(kPi - spec.radius_x - shift, kPi / 2 - spec.radius_z);
  }
  r.compact_support = r.support_margin > 0;

  // Smoothness proxy: spectrum of the profile along a line through the
  // centre, rescaled so the support fills half of a periodic window. C^k
  // profiles decay algebraically there; the bump family is far below 1e-9.
  if (spec.kind != PotentialKind::Zero && spec.amplitude != 0.0) {
    const int n = 1024;
    double tail = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      std::vector<cd> line(n);
      for (int i = 0; i < n; ++i) {
        const double u = -2.0 + 4.0 * i / n;
        line[i] = axis == 0 ? spec(spec.x_shift[0] + spec.radius_x * u, spec.x_shift[1], 0.0)
                            : spec(spec.x_shift[0], spec.x_shift[1], spec.radius_z * u);
      }
      fft::dft2(line, n, 1, -1);
      double peak = 0.0, high = 0.0;
      for (int i = 0; i < n; ++i) {
        const int k = TorusGrid::wavenumber(i, n);
        peak = std::max(peak, std::abs(line[i]));
        if (std::abs(k) >= n / 4) high = std::max(high, std::abs(line[i]));
      }
      tail = std::max(tail, peak > 0 ? high / peak : 0.0);
    }
    r.spectral_tail = tail;
  }
  r.smooth = r.spectral_tail <= 1e-9;

  r.mixed_norm = mixed_norm_inf1(spec).value;
  r.threshold = 2 * alpha / std::pow(cgn, 4);
  r.smallness_margin = r.threshold - r.mixed_norm;
  r.small = r.smallness_margin >= -1e-12 * r.threshold;
  return r;
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Zero:
      return "zero";
    case PotentialKind::Separable:
      return "separable";
    case PotentialKind::Radial:
      return "radial";
  }
  return "zero";
}

nlohmann::json to_json(const PotentialSpec& spec) {
  nlohmann::json j;
  j["kind"] = to_string(spec.kind);
  if (spec.kind != PotentialKind::Zero) {
    j["amplitude"] = spec.amplitude;
    j["radius_x"] = spec.radius_x;
    j["radius_z"] = spec.radius_z;
    if (spec.x_shift[0] != 0 || spec.x_shift[1] != 0) {
      j["x_shift"] = {spec.x_shift[0], spec.x_shift[1]};
    }
  }
  return j;
}

PotentialSpec potential_from_json(const nlohmann::json& j) {
  require(j.is_object(), "potential: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    require(key == "kind" || key == "amplitude" || key == "radius_x" || key == "radius_z" ||
                key == "x_shift",
            "potential: unknown key '" + key + "'");
  }
  require(j.contains("kind") && j["kind"].is_string(), "potential: missing 'kind'");
  const std::string kind = j["kind"];
  if (kind == "zero") return PotentialSpec::zero();
  require(kind == "separable" || kind == "radial", "potential: unknown kind '" + kind + "'");
  auto number = [&](const char* key) {
    require(j.contains(key) && j[key].is_number(), std::string("potential: missing '") + key + "'");
    return j[key].get<double>();
  };
  PotentialSpec p = kind == "separable"
                        ? PotentialSpec::separable(number("amplitude"), number("radius_x"),
                                                   number("radius_z"))
                        : PotentialSpec::radial(number("amplitude"), number("radius_x"),
                                                number("radius_z"));
  if (j.contains("x_shift")) {
    const auto& s = j["x_shift"];
    require(s.is_array() && s.size() == 2 && s[0].is_number() && s[1].is_number(),
            "potential: 'x_shift' must be a pair of numbers");
    p.x_shift = {s[0].get<double>(), s[1].get<double>()};
  }
  return p;
}

nlohmann::json to_json(const AdmissibilityReport& r) {
  return {{"even", r.even},
          {"nonpositive", r.nonpositive},
          {"compact_support", r.compact_support},
          {"smooth", r.smooth},
          {"small", r.small},
          {"admissible", r.admissible()},
          {"even_defect", r.even_defect},
          {"max_value", r.max_value},
          {"support_margin", r.support_margin},
          {"spectral_tail", r.spectral_tail},
          {"mixed_norm", r.mixed_norm},
          {"threshold", r.threshold},
          {"smallness_margin", r.smallness_margin}};
}

}  // namespace dimred
