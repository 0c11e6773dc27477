#pragma once

// Importance densities and point sources for the amplitude integrals.

#include <cstdint>
#include <vector>

#include "psbar/vec3.hpp"

namespace psbar {

/// Mixture of Gamma(shape, rate) radial densities with integer shapes,
/// p(r) = sum_j w_j rate_j^k_j r^(k_j - 1) exp(-rate_j r) / (k_j - 1)!.
class RadialMixture {
 public:
  struct Component {
    int shape;
    double rate;
    double weight;
  };

  /// Weights are renormalized; throws DomainError for empty or invalid input.
  explicit RadialMixture(std::vector<Component> components);

  double pdf(double r) const noexcept;
  double cdf(double r) const noexcept;

  /// Inverse CDF at u in (0, 1).
  double quantile(double u) const;

  const std::vector<Component>& components() const noexcept { return components_; }

 private:
  std::vector<Component> components_;
};

/// Uniform direction from two unit-interval coordinates.
Vec3 unit_vector(double u_cos, double u_phi) noexcept;

/// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// A digitally shifted Sobol point set: the first `count` points of the
/// `dims`-dimensional sequence, XOR-shifted per replicate.
class ShiftedSobol {
 public:
  ShiftedSobol(int dims, std::size_t count);

  int dims() const noexcept { return dims_; }
  std::size_t count() const noexcept { return count_; }

  /// Fills u (size dims) with point i under the given 32-bit digit shifts,
  /// mapped to the open interval (0, 1).
  void point(std::size_t i, const std::vector<std::uint32_t>& shift, double* u) const noexcept;

  /// Random digital shift for replicate `replicate` of stream `seed`.
  std::vector<std::uint32_t> shift(std::uint64_t seed, int replicate) const;

 private:
  int dims_;
  std::size_t count_;
  std::vector<std::uint32_t> digits_;
};

}  // namespace psbar
