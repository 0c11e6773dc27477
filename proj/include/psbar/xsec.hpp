#pragma once

// Single-differential and total cross sections from the transition amplitude.
//
// SDCS = (k1/k_i) |T|^2 per unit solid angle of the ejected electron; for
// p states the three magnetic substates are averaged unless m-resolved
// output is requested. TCS = 2 pi int SDCS sin(theta) d(theta), by
// Gauss-Legendre quadrature in cos(theta).

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psbar/amplitude.hpp"

namespace psbar {

enum class RecordStatus { Ok, BelowThreshold };

struct CrossSectionRecord {
  PsState state;
  bool m_resolved = false;
  double E_i_ev = 0.0;
  double mu = 0.0;
  std::optional<double> theta_deg;  ///< empty for TCS rows
  double value = 0.0;               ///< a.u.; meaningful only when status == Ok
  double std_err = 0.0;
  RecordStatus status = RecordStatus::Ok;

  /// "1s", "2p" (m-averaged) or "2p+1" (m-resolved).
  std::string state_label() const;
};

/// A cross section with its first-order deviation in each randomized
/// replicate. Estimates computed from the same amplitude batch share
/// replicates, so differences between them can use paired errors.
struct Estimate {
  double value = 0.0;
  std::vector<double> deviations;

  double std_err() const;
};

/// Standard error of a - b from paired replicate deviations.
double paired_std_err(const Estimate& a, const Estimate& b);

struct XsecOptions {
  IntegrationSpec spec;
  IntegrandOptions integrand;
  bool m_resolved = false;                   ///< use state.m instead of averaging over m
  std::optional<double> eps_hplus_override;  ///< hartree
};

/// SDCS at E_i for every (mu, angle) pair, all on one set of sample points.
/// Result indexed [mu * angles.size() + angle]. Throws BelowThresholdError.
std::vector<Estimate> sdcs_grid(double E_i_ev, const PsState& state, std::span<const double> mus,
                                std::span<const double> angles_deg, const XsecOptions& options);

struct TcsEstimate {
  Estimate value;       ///< n_theta-point quadrature
  double coarse = 0.0;  ///< n_theta/2-point quadrature on the same samples

  /// Statistical error combined in quadrature with the order difference.
  double std_err() const;
};

/// TCS at E_i for every mu. Throws BelowThresholdError; DomainError for
/// n_theta < 8.
std::vector<TcsEstimate> tcs_grid(double E_i_ev, const PsState& state, std::span<const double> mus,
                                  int n_theta, const XsecOptions& options);

/// SDCS at the kinematics' angle.
CrossSectionRecord sdcs(const Kinematics& kin, const PsState& state, const ScreeningConfig& screen,
                        const IntegrationSpec& spec);

/// TCS with an n_theta-point rule.
CrossSectionRecord tcs(double E_i_ev, const PsState& state, const ScreeningConfig& screen,
                       const IntegrationSpec& spec, int n_theta);

/// 2 pi int_{-1}^{1} f(cos theta) d(cos theta) with an n-point Gauss rule.
double solid_angle_integral(const std::function<double(double)>& f, int n);

/// Seed for one (state, energy) task derived from the master seed, so results
/// do not depend on scheduling.
std::uint64_t task_seed(std::uint64_t master, const PsState& state, bool m_resolved, double E_i_ev);

}  // namespace psbar
