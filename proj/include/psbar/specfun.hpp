#pragma once

// Complex special functions for the Coulomb-distorted eikonal final state:
// complex gamma, Kummer's function 1F1(a; 1; z), the Coulomb normalization
// times 1F1 combination, and the eikonal phase factors.

#include <complex>

#include "psbar/vec3.hpp"

namespace psbar {

using Cplx = std::complex<double>;

/// Integration points closer than this to the negative eikonal axis
/// (r + z < kEpsGeom) are rejected.
inline constexpr double kEpsGeom = 1e-12;

/// |z| at which hyp1f1_b1 switches from the series branch to the
/// large-|z| asymptotic expansion.
inline constexpr double kHyp1f1Crossover = 30.0;

/// r + (r . axis) for unit `axis`, evaluated without cancellation when r
/// points backwards along the axis.
double r_plus_z(const Vec3& r, const Vec3& axis) noexcept;

/// Sommerfeld and eikonal parameters of the ejected electron.
/// Built from k1 with alpha1 = eta1 = 1/k1; tests may construct other values
/// directly (alpha1 = eta1 = 0 gives the plane-wave Born limit).
struct DistortionParams {
  double alpha1 = 0.0;
  double eta1 = 0.0;
  double k1 = 0.0;

  /// Throws DomainError unless k1 > 0.
  static DistortionParams from_momentum(double k1);
};

/// Gamma function of a complex argument. Lanczos approximation (g = 607/128,
/// 15 terms) for Re z >= 1/2, reflection otherwise. Throws PoleError at
/// non-positive integers.
Cplx cgamma(Cplx z);

/// Principal branch of log Gamma(z) for Re z >= 1/2, continued by reflection.
Cplx clgamma(Cplx z);

/// Kummer's confluent hypergeometric function 1F1(a; 1; z).
///
/// |z| < kHyp1f1Crossover uses the series branch; above it the two-term
/// asymptotic expansion is used whenever its smallest term is below the
/// accuracy target, otherwise the series branch again.
/// Throws NonConvergenceError if no branch reaches the target.
Cplx hyp1f1_b1(Cplx a, Cplx z);

/// Series branch: Maclaurin sum near the origin, then Taylor steps of
/// Kummer's equation along the ray to z. Usable at any |z|, at a cost
/// growing with log|z| and |z|.
Cplx hyp1f1_b1_series(Cplx a, Cplx z);

/// Asymptotic branch. Returns the sum together with the magnitude of the
/// smallest retained term (the truncation error estimate).
struct AsymptoticSum {
  Cplx value;
  double error;
};
AsymptoticSum hyp1f1_b1_asymptotic(Cplx a, Cplx z);

/// exp(-pi a/2) Gamma(1 + i a) 1F1[i a, 1, i x] with x = k1 r1 + k1_vec . r1
/// when `conjugated` (the bra form of the final state), or the complex
/// conjugate exp(-pi a/2) Gamma(1 - i a) 1F1[-i a, 1, -i x] otherwise.
/// The plane-wave factor is not included.
Cplx coulomb_distortion(const DistortionParams& p, const Vec3& r1, const Vec3& k1_vec,
                        bool conjugated);

/// Same as coulomb_distortion with the combination x = k1 r1 + k1_vec . r1 >= 0
/// already formed.
Cplx coulomb_distortion_x(const DistortionParams& p, double x, bool conjugated);

/// exp(i eta ln((r1 + z1)/(r12 + z12))) with z components along `axis`
/// (unit vector, the direction of k1). Unit modulus.
/// Throws DegenerateGeometryError when r + z < kEpsGeom for either vector.
Cplx eikonal_phase(const Vec3& r1, const Vec3& r12, double eta1, const Vec3& axis);

/// eikonal_phase with the polar axis along +z.
inline Cplx eikonal_phase(const Vec3& r1, const Vec3& r12, double eta1) {
  return eikonal_phase(r1, r12, eta1, Vec3{0.0, 0.0, 1.0});
}

}  // namespace psbar
