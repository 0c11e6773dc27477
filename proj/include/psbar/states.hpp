#pragma once

// Bound states, screening configuration and collision kinematics.
// Everything here is in Hartree atomic units unless a name says otherwise.

#include <optional>
#include <string>
#include <string_view>

#include "psbar/specfun.hpp"
#include "psbar/vec3.hpp"

namespace psbar {

inline constexpr double kHartreeEv = 27.2114;

/// Electron affinity of H (equivalently the positron affinity of anti-H), eV.
inline constexpr double kAffinityEv = 0.75;

inline constexpr double ev_to_au(double ev) noexcept { return ev / kHartreeEv; }
inline constexpr double au_to_ev(double au) noexcept { return au * kHartreeEv; }

/// Incident positronium state (n, l, m). Supported: 1s, 2s, 2p (m = -1, 0, 1), 3s.
struct PsState {
  int n = 1;
  int l = 0;
  int m = 0;

  /// Throws DomainError for unsupported labels.
  PsState(int n, int l, int m = 0);
  PsState() = default;

  /// "1s", "2s", "2p", "3s" (m omitted), or with m for p states: "2p0", "2p+1", "2p-1".
  static PsState parse(std::string_view label);

  /// "1s", "2p", ... ; with_m appends the magnetic number for p states.
  std::string label(bool with_m = false) const;

  friend bool operator==(const PsState&, const PsState&) = default;
};

/// Debye screening: V(r) = exp(-mu r)/r.
struct ScreeningConfig {
  double mu = 0.0;

  /// Throws DomainError for negative or non-finite mu.
  explicit ScreeningConfig(double mu = 0.0);

  /// Screening length 1/mu (infinity for mu = 0).
  double lambda() const noexcept;
};

/// Two-exponent open-shell wavefunction of the positive ion:
///   Phi(r2, r3) = (N / 4 pi) (exp(-alpha r2 - beta r3) + exp(-beta r2 - alpha r3)).
struct ChandrasekharParams {
  double N = 0.3948;
  double alpha = 1.03925;
  double beta = 0.28309;
};

/// Kinematics of one collision configuration. Energies are binding (negative)
/// energies in hartree except E_i, which is the incident kinetic energy in eV.
struct Kinematics {
  double E_i = 0.0;       ///< incident Ps kinetic energy, eV
  double k_i = 0.0;       ///< incident momentum
  double k1 = 0.0;        ///< ejected electron momentum
  double theta_e = 0.0;   ///< angle between k_i and k1, radians
  double mu_i = 2.0;      ///< initial-channel reduced mass
  double mu_f = 1.0;      ///< final-channel reduced mass
  double eps_ps = 0.0;
  double eps_hbar = 0.0;
  double eps_hplus = 0.0;

  /// Ejected-electron kinetic energy E1 = k1^2 / (2 mu_f).
  double e1() const noexcept { return 0.5 * k1 * k1 / mu_f; }

  /// k1 along +z, k_i in the x-z plane at angle theta_e.
  Vec3 k1_vec() const noexcept { return {0.0, 0.0, k1}; }
  Vec3 ki_vec() const noexcept;
};

/// -1/(4 n^2): hydrogenic levels with reduced mass 1/2.
double ps_energy(const PsState& state) noexcept;

/// Hydrogenic orbital of Ps (Bohr radius 2) at relative coordinate rho,
/// quantized along +z.
Cplx ps_wavefunction(const PsState& state, const Vec3& rho);

/// Radial part R_nl(rho) of the Ps orbital; psi = R_nl Y_lm.
double ps_radial(const PsState& state, double rho) noexcept;

/// Ground-state anti-hydrogen, exp(-r)/sqrt(pi).
double hbar_wavefunction(const Vec3& r3) noexcept;
double hbar_wavefunction(double r3) noexcept;

double hplus_wavefunction(const ChandrasekharParams& p, double r2, double r3) noexcept;

/// <Phi|H|Phi>/<Phi|Phi> for two positrons around a unit negative charge,
/// by radial quadrature with the monopole 1/r_> interaction kernel.
double hplus_variational_energy(const ChandrasekharParams& p);

/// <Phi|Phi> for the given parameters (close to, not exactly, 1 for the
/// rounded default N).
double hplus_norm(const ChandrasekharParams& p);

/// Default total binding energies.
inline constexpr double kEpsHbarDefault = -0.5;
inline constexpr double kEpsHplusDefault = -0.5 - kAffinityEv / kHartreeEv;

/// Builds the kinematics for incident energy E_i (eV) and ejection angle theta_e.
/// eps_hplus_override replaces the default H-bar+ total binding energy (hartree).
/// Throws BelowThresholdError when E1 = E_i + eps_ps + eps_hbar - eps_hplus <= 0.
Kinematics kinematics(double E_i_ev, const PsState& state, const ScreeningConfig& screen,
                      double theta_e, std::optional<double> eps_hplus_override = std::nullopt);

/// Incident energy (eV) at which E1 = 0.
double threshold_ev(const PsState& state,
                    std::optional<double> eps_hplus_override = std::nullopt) noexcept;

}  // namespace psbar
