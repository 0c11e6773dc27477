#pragma once

// Prior-form transition amplitude for Ps + anti-H -> anti-H+ + e-.
//
// Coordinates (antiproton at the origin): r1 electron, r2 Ps positron,
// r3 anti-H positron. The r3 integral of the perturbation against the ion
// and anti-H orbitals is done in closed form; the remaining six dimensions
// are integrated by randomized quasi-Monte Carlo. A plain Monte Carlo
// estimate of the full nine-dimensional integral serves as a check.

#include <cstdint>
#include <vector>

#include "psbar/sampling.hpp"
#include "psbar/specfun.hpp"
#include "psbar/states.hpp"
#include "psbar/vec3.hpp"

namespace psbar {

struct IntegrandPoint {
  Vec3 r1;  ///< electron
  Vec3 r2;  ///< Ps positron
  Vec3 r3;  ///< anti-H positron (nine-dimensional oracle only)
};

enum class Method { QuasiMonteCarlo, PlainMonteCarloOracle };

struct IntegrationSpec {
  Method method = Method::QuasiMonteCarlo;
  std::int64_t samples = 1'000'000;  ///< total points over all replicates
  std::uint64_t seed = 1;
  double target_rel_err = 0.5;
  int replicates = 16;  ///< randomized shifts (QMC) or batches (plain MC)
  int threads = 1;

  /// Throws DomainError when samples < 1000, target_rel_err is outside
  /// (0, 1) or replicates < 8.
  void validate() const;
};

/// Transition amplitude with its 1-sigma error, the RMS of the standard
/// errors of the real and imaginary parts (the error of |t| for isotropic
/// scatter).
struct AmplitudeValue {
  Cplx t;
  double std_err = 0.0;
};

/// Coefficients of the four screened interactions in the initial-channel
/// perturbation,
///   V = c1 Y(r1) + c2 Y(r2) + c13 Y(r13) + c23 Y(r23),  Y(r) = exp(-mu r)/r.
/// Defaults are the physical charges (electron and Ps positron against the
/// antiproton, and against the anti-H positron).
struct Perturbation {
  double electron_core = 1.0;
  double positron_core = -1.0;
  double electron_positron = -1.0;
  double positron_positron = 1.0;
};

/// Closed-form J(c, mu, x) = int exp(-c r') exp(-mu |x - r'|)/|x - r'| d3r'
/// for a point at distance x from the origin. Stable at x -> 0 and c -> mu.
/// Throws DomainError for c <= 0, mu < 0 or x < 0.
double yukawa_exp_convolution(double c, double mu, double x);

/// The anti-H positron integral
///   int Phi(r2, r3) phi_H(r3) V(r1, r2, r3) d3r3,
/// a function of |r1| and |r2| only.
double inner_r3_reduction(const Vec3& r1, const Vec3& r2, const ScreeningConfig& screen,
                          const ChandrasekharParams& chand = {},
                          const Perturbation& terms = {});

/// Per-evaluation options shared by the integrand and the integrators.
struct IntegrandOptions {
  /// false: the bra of the final state as written for the prior amplitude,
  ///   exp(-pi a/2) Gamma(1 + i a) 1F1[i a, 1, i(k1 r1 + k1.r1)] e^{-i k1.r1}
  ///   (r1 + z1)^{-i eta} (r12 + z12)^{+i eta} and the initial state e^{+i ki.R}.
  /// true: the opposite sign convention for every phase (the complex
  ///   conjugate integrand), which maps T to conj(T).
  bool conj_convention = false;
  ChandrasekharParams chand{};
  Perturbation terms{};
};

/// Incident and ejected momenta in an arbitrary frame. The eikonal z axis is
/// the direction of k1.
struct CollisionFrame {
  Vec3 k1_vec;
  Vec3 ki_vec;

  /// k1 along +z, k_i in the x-z plane at the kinematics' theta_e.
  static CollisionFrame standard(const Kinematics& kin);
};

/// Full six-dimensional integrand (r3 integrated out) at point (r1, r2),
/// without the -mu_f/2pi prefactor. Throws DegenerateGeometryError on the
/// negative eikonal axis.
Cplx reduced_integrand(const IntegrandPoint& p, const Kinematics& kin,
                       const ScreeningConfig& screen, const PsState& state,
                       bool conj_convention);

/// As above with explicit distortion parameters and frame.
Cplx reduced_integrand(const IntegrandPoint& p, const CollisionFrame& frame,
                       const DistortionParams& distortion, const ScreeningConfig& screen,
                       const PsState& state, const IntegrandOptions& options);

/// Grid of amplitudes that share one set of sample points: every magnetic
/// substate, screening value and incident direction is evaluated on the same
/// points, so differences between cells carry correlated (small) errors.
struct AmplitudeGrid {
  std::vector<int> ms;      ///< magnetic substates of the Ps state
  std::vector<double> mus;  ///< screening parameters
  std::vector<Vec3> ki;     ///< incident momenta
  Vec3 k1_hat{0.0, 0.0, 1.0};

  std::size_t size() const noexcept { return ms.size() * mus.size() * ki.size(); }
  std::size_t index(std::size_t m, std::size_t mu, std::size_t angle) const noexcept {
    return (m * mus.size() + mu) * ki.size() + angle;
  }
};

struct AmplitudeBatch {
  std::vector<AmplitudeValue> values;  ///< indexed by AmplitudeGrid::index
  /// replicate_t[r][cell]: per-replicate estimates (already scaled by
  /// -mu_f/2pi); their spread gives correlated error estimates.
  std::vector<std::vector<Cplx>> replicate_t;
};

/// Randomized quasi-Monte Carlo over the grid. `k1` and `k_i` magnitudes come
/// from the kinematics; directions from the grid.
AmplitudeBatch amplitude_batch(const Kinematics& kin, const PsState& state,
                               const AmplitudeGrid& grid, const IntegrationSpec& spec,
                               const IntegrandOptions& options = {});

/// -(mu_f/2pi) <psi_f|V|psi_i> by randomized QMC over the six-dimensional
/// reduced integrand. Requires spec.method == QuasiMonteCarlo. Throws
/// AccuracyNotReachedError when std_err/|t| exceeds spec.target_rel_err.
AmplitudeValue amplitude(const Kinematics& kin, const PsState& state,
                         const ScreeningConfig& screen, const IntegrationSpec& spec,
                         const IntegrandOptions& options = {});

/// Plain Monte Carlo over all nine coordinates with the perturbation and
/// the ion/anti-H orbitals evaluated pointwise. Requires
/// spec.method == PlainMonteCarloOracle.
AmplitudeValue amplitude_oracle_9d(const Kinematics& kin, const PsState& state,
                                   const ScreeningConfig& screen, const IntegrationSpec& spec,
                                   const IntegrandOptions& options = {});

/// Radial importance densities used for the Ps positron (r2), the Ps
/// relative coordinate (rho) and, in the oracle, the anti-H positron (r3).
RadialMixture positron_proposal(const ChandrasekharParams& chand);
RadialMixture relative_proposal(const PsState& state);
RadialMixture hbar_positron_proposal(const ChandrasekharParams& chand);

}  // namespace psbar
