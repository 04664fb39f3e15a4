// Randomized numerical checks of the functional inequalities behind the
// stability and convergence estimates. Every check evaluates both sides by
// quadrature (or exact Fourier sums) and reports a margin; unspecified
// constants are never invented, so such bounds are checked as boundedness or
// rate statements.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dimred/potentials.hpp"
#include "dimred/spectral.hpp"

namespace dimred {

struct CheckInstance {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<int> resolution;
  /// RHS - LHS for absolute checks, band - statistic for ratio checks.
  double margin = 0.0;
  bool passed = false;
  double tolerance = 0.0;
  /// Hypotheses of the inequality do not hold; excluded from pass rates.
  bool rejected = false;
  nlohmann::json details = nlohmann::json::object();
};

// ---------------------------------------------------------------------------
// Kinetic energy of the square root of the one-particle density.

/// N-particle wave function on T^{dN} with Fourier modes |k_i| <= band in every
/// coordinate. Coefficients are row-major over (particle, coordinate) digits,
/// particle 1 most significant, each digit k + band.
struct ManyBodyState {
  int particles = 2;
  int dim = 1;
  int band = 2;
  std::vector<cd> coefficients;

  int modes_per_particle() const;
};

/// Gaussian coefficients damped by exp(-|k|^2 / k0^2), normalized.
ManyBodyState random_many_body_state(int particles, int dim, std::uint64_t seed, int band = 2,
                                     double k0 = 1.5);
/// u^{(x)N} from one-particle coefficients over the same mode window.
ManyBodyState product_state(const std::vector<cd>& one_body, int particles, int dim, int band);

struct InequalitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = ||grad sqrt(rho)||^2, rhs = ||grad_{x_1} psi||^2. The density is an
/// exact trigonometric polynomial; lhs = int |grad rho|^2 / (4 rho) on a
/// `fine`^dim trapezoid grid. Throws NumericalError if rho vanishes.
InequalitySides hoffman_ostenhof_sides(const ManyBodyState& psi, int fine = 64);

CheckInstance hoffman_ostenhof_check(const ManyBodyState& psi, std::uint64_t seed = 0);
/// Random normalized state with particles in {2, 3} and dim in {1, 2}.
CheckInstance hoffman_ostenhof_check(int particles, int dim, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Interaction energy against the renormalized kinetic energy.

/// int int V~(r1 - r2) rho(r1) rho(r2) dr1 dr2 for rho = |phi|^2 in the
/// rescaled frame. Exact in x for band-limited phi (|k_i| < n_i / 4); in z
/// the density is an exact cosine polynomial, its autocorrelation is closed
/// form and the kernel integral uses composite Gauss-Legendre with `panels`
/// panels per half-support. The kernel table is built once per instance.
class PairInteraction {
 public:
  PairInteraction(const SlabGrid& grid, const PotentialSpec& spec,
                  const ScaledPotentialParams& params, int panels = 16);

  double operator()(const ComplexField3D& phi) const;

 private:
  struct Node {
    double weight = 0.0;
    Eigen::MatrixXd overlap;
    std::vector<double> kernel;  // per shell
  };
  SlabGrid grid_;
  bool trivial_ = false;
  int shells_ = 0;
  std::vector<int> shell_of_mode_;
  std::vector<Node> nodes_;
};

double pair_interaction(const ComplexField3D& phi, const PotentialSpec& spec,
                        const ScaledPotentialParams& params, int panels = 16);

/// Random normalized slab field with |k_i| <= n_i / 4 - 1 and damped Dirichlet modes.
ComplexField3D random_slab_field(const SlabGrid& grid, std::uint64_t seed, double k0 = 2.0,
                                 double m0 = 1.5);

enum class TrialState { Product, Random };

/// lhs = int int |V~| rho rho, rhs = cgn^4 ||V|| <S~^2 phi, phi>. Product is the
/// x-constant transverse ground state, for which <S~^2 phi, phi> = 1.
CheckInstance interaction_estimate_check(const PotentialSpec& spec,
                                         const ScaledPotentialParams& params, TrialState state,
                                         std::uint64_t seed, double cgn,
                                         const SlabGrid& grid = SlabGrid(TorusGrid(16, 16), 6),
                                         const PairInteraction* lhs_op = nullptr);
/// Same with an explicit normalized field. `lhs_op`, if given, must be built
/// for |V| on the field's grid.
CheckInstance interaction_estimate_check(const PotentialSpec& spec,
                                         const ScaledPotentialParams& params,
                                         const ComplexField3D& phi, double cgn,
                                         std::uint64_t seed = 0,
                                         const PairInteraction* lhs_op = nullptr);

// ---------------------------------------------------------------------------
// Pair sums of a potential with nonnegative Fourier data.

/// V(x, z) = sum_{|n_i| <= band} a_n exp(i n.x) v(z) on T^2 x R with
/// v(z) = int exp(i tau z) exp(-tau^2 w^2) dtau = (sqrt(pi) / w) exp(-z^2 / (4 w^2)).
/// The Fourier data is a_n exp(-tau^2 w^2); weights must satisfy a_n = a_{-n}.
struct PositiveSymbolPotential {
  int band = 2;
  std::vector<double> weights;
  double width_z = 0.5;

  double weight(int n1, int n2) const;
  double value(double x1, double x2, double z) const;
  double profile_z(double z) const;
  bool symbol_nonnegative() const;
};

/// Random symmetric nonnegative weights u_n exp(-|n|^2 / 2).
PositiveSymbolPotential random_positive_symbol_potential(std::uint64_t seed, int band = 2);

/// eta(x, z) = scale (1 + modulation cos x1 cos x2) exp(-(z - center)^2 / width^2),
/// nonnegative for modulation in [0, 1].
struct EtaSpec {
  double scale = 1.0;
  double modulation = 0.5;
  double width = 0.4;
  double center = 0.0;

  double value(double x1, double x2, double z) const;
};

struct Point3 {
  double x1 = 0.0;
  double x2 = 0.0;
  double z = 0.0;
};

struct FourierBoundTerms {
  double pair_sum = 0.0;
  /// (2 pi)^-3 sum_j (eta * V)(r_j).
  double one_body = 0.0;
  /// (2 (2 pi)^6)^-1 int int V(r1 - r2) eta(r1) eta(r2).
  double self_energy = 0.0;
  /// (N / 2) V(0).
  double diagonal = 0.0;

  double rhs() const { return one_body - self_energy - diagonal; }
};

/// Both sides for explicit points; convolutions in z by Gauss-Legendre.
FourierBoundTerms fourier_bound_terms(const std::vector<Point3>& points,
                                      const PositiveSymbolPotential& V, const EtaSpec& eta);

CheckInstance fourier_lower_bound_check(const std::vector<Point3>& points,
                                        const PositiveSymbolPotential& V, const EtaSpec& eta,
                                        std::uint64_t seed = 0);
/// Random potential and n_points uniform points in T^2 x [-pi/2, pi/2]. The
/// eta scale is taken relative to int eta = (2 pi)^3 n_points, the mass of the
/// empirical measure in these units.
CheckInstance fourier_lower_bound_check(int n_points, const EtaSpec& eta, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Multiplication-operator bounds with unspecified constants.

enum class OperatorBound { OneBody, Bilinear };

/// Ratio <|V~| psi, psi> / <B psi, psi> for psi = phi (x) phi, with
/// B = (N/L)^delta (1 - Delta_{x1}) (one-body) or
/// B = (1 - Delta_{x1})^{1/2 + delta} (1 - Delta_{x2})^{1/2 + delta} (bilinear).
double operator_ratio(OperatorBound which, const ComplexField3D& phi, const PotentialSpec& spec,
                      const ScaledPotentialParams& params, double delta = 0.25);

/// Ratios along (beta, c, L) for L in `L_values` with one random field.
/// Bilinear passes when max / min <= band; one-body, whose bound grows with
/// (N/L)^delta by itself, when max / first <= band.
CheckInstance operator_bound_ratio(OperatorBound which, const PotentialSpec& spec, double beta,
                                   double c, const std::vector<double>& L_values,
                                   std::uint64_t seed, double delta = 0.25, double band = 3.0);

// ---------------------------------------------------------------------------
// Scalar interpolation.

/// RHS - LHS of lambda^alpha <= alpha / eta lambda + (1 - alpha) eta^{alpha/(1-alpha)}.
double scalar_interpolation_margin(double alpha, double eta, double lambda);
/// Same with the coefficients swapped: (1 - alpha) / eta and alpha eta^{alpha/(1-alpha)}.
double swapped_interpolation_margin(double alpha, double eta, double lambda);

/// Minimum margin over `samples` log-spaced lambda in [1e-8, 1e8].
CheckInstance scalar_interpolation_check(double alpha, double eta, int samples = 1001);
/// One random (alpha, eta, lambda) draw.
CheckInstance scalar_interpolation_sample(std::uint64_t seed);

// ---------------------------------------------------------------------------
// Approximation of the identity.

/// T(eps, lambda) = Tr J (rho_{eps,lambda}(r1 - r2) - delta(x1 - x2) g(z1 - z2)) gamma
/// for gamma = |u (x) u><u (x) u|, u(x, z) = f(x) e_1(z), and J multiplication
/// by the real function j(x1). rho is the radial-in-x profile of `rho_spec`
/// (x_shift must be zero). Exact Fourier sum in x, Gauss-Legendre in z.
double approx_identity_term(const PotentialSpec& rho_spec, const ComplexField2D& f,
                            const ComplexField2D& j, double eps, double lambda);

/// ||rho_{1,lambda} - rho_{1,1}||_{L^1}.
double rho_l1_modulus(const PotentialSpec& rho_spec, double lambda);

/// Fits log |T(eps, 1)| against log eps over the eps ladder and requires
/// slope >= kappa - 0.1; along the lambda ladder (approaching 1) the
/// discrepancy |T(eps, lambda) - T(eps, 1)| and the L^1 modulus must both
/// decrease, with a finite ratio.
CheckInstance approx_identity_rate(const PotentialSpec& rho_spec, const ComplexField2D& f,
                                   const ComplexField2D& j, const std::vector<double>& eps_ladder,
                                   const std::vector<double>& lambda_ladder, double kappa);

// ---------------------------------------------------------------------------
// Scaling regime.

/// Normalized bump profiles f(x) ~ b(|x| / radius_x) on T^2 and
/// g(z) ~ b(z / radius_z) on (-pi/2, pi/2).
struct BumpProfiles {
  double radius_x = 1.0;
  double radius_z = 0.6;
};

struct ScalingIdentity {
  /// int V~ |f_eps g_lam f_eps g_lam|^2 on the slab with the periodic scaled potential.
  double interaction_scaled = 0.0;
  /// L (N/L)^{3 beta} int V |f g f g|^2 over R^3 x R^3.
  double interaction_unscaled = 0.0;
  /// <S~_1^2 psi, psi> from quadrature of the scaled profiles, term by term.
  double kinetic_terms = 0.0;
  /// Closed form in the unscaled norms, eps = (N/L)^-beta, lambda = 1 / c.
  double kinetic_closed = 0.0;
};

/// Throws ValidationError when the scaled z-profile leaves the slab.
ScalingIdentity scaling_identity(const PotentialSpec& spec, const ScaledPotentialParams& params,
                                 const BumpProfiles& profiles, int order = 12);

/// Identity at (beta, c, L) to rel. 1e-8, then the regime sweep: the ratio
/// |interaction| / kinetic along L for each c must be bounded for c <= 1,
/// increase with c at every L, and keep growing between the largest two c.
CheckInstance scaling_regime_identity(const PotentialSpec& spec, double beta, double c, double L,
                                      const BumpProfiles& profiles,
                                      const std::vector<double>& c_sweep = {0.5, 1.0, 2.0, 4.0},
                                      const std::vector<double>& L_sweep = {0.5, 0.25, 0.125});

// ---------------------------------------------------------------------------
// Suites.

struct SuiteOptions {
  std::uint64_t seed = 0;
  /// Instance count; zero selects the default for the suite.
  int samples = 0;
  /// GN constant for the interaction estimate.
  double cgn = 0.0;
  PotentialSpec spec = PotentialSpec::separable(-1.0, kPi / 2, kPi / 4);
};

/// Names: hoffman-ostenhof, interaction-estimate, fourier-lower-bound,
/// operator-bound, scalar-interpolation, approx-identity, scaling-identity, all.
std::vector<std::string> suite_names();
std::vector<CheckInstance> run_suite(const std::string& name, const SuiteOptions& options);

struct SuiteSummary {
  int total = 0;
  int passed = 0;
  int rejected = 0;
  double min_margin = 0.0;

  bool all_passed() const { return passed == total - rejected; }
};

SuiteSummary summarize(const std::vector<CheckInstance>& instances);

nlohmann::json to_json(const CheckInstance& c);
nlohmann::json to_json(const std::vector<CheckInstance>& instances);
/// Fixed-width table: one line per check name with counts and minimum margin.
std::string suite_table(const std::vector<CheckInstance>& instances);

}  // namespace dimred
