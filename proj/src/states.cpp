#include "psbar/states.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "psbar/error.hpp"
#include "psbar/quadrature.hpp"

namespace psbar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPsBohr = 2.0;

bool supported(int n, int l) {
  return (n == 1 && l == 0) || (n == 2 && (l == 0 || l == 1)) || (n == 3 && l == 0);
}

// 4 pi int_0^inf f(r) r^2 dr for exponentially decaying f.
template <class F>
double radial_integral(F&& f, double rmax = 120.0) {
  static const GaussRule rule = gauss_legendre(32);
  static const std::vector<double> edges = geometric_edges(0.5, rmax);
  return 4.0 * kPi * integrate_panels([&](double r) { return f(r) * r * r; }, edges, rule);
}

// Orbital exponents used in the open-shell ion wavefunction.
struct Orbital {
  double c;
  double value(double r) const { return std::exp(-c * r); }
  double slope(double r) const { return -c * std::exp(-c * r); }
};

double overlap(Orbital a, Orbital b) {
  return radial_integral([&](double r) { return a.value(r) * b.value(r); });
}

// <a| -1/2 lap - 1/r |b>, kinetic term in the symmetric gradient form.
double one_body(Orbital a, Orbital b) {
  return radial_integral([&](double r) {
    return 0.5 * a.slope(r) * b.slope(r) - a.value(r) * b.value(r) / r;
  });
}

// int int rho1(r) rho2(r') / max(r, r') d3r d3r' with rho_i = products of
// orbital pairs. Only the monopole survives for s orbitals.
double monopole(Orbital a1, Orbital b1, Orbital a2, Orbital b2) {
  static const GaussRule rule = gauss_legendre(32);
  auto rho1 = [&](double r) { return a1.value(r) * b1.value(r); };
  auto rho2 = [&](double r) { return a2.value(r) * b2.value(r); };
  return radial_integral([&](double r) {
    const std::vector<double> inner_edges = geometric_edges(r / 16.0, r);
    std::vector<double> below{0.0};
    for (double e : inner_edges) {
      if (e > 0.0 && e < r) below.push_back(e);
    }
    below.push_back(r);
    const double charge_inside =
        r > 0.0 ? 4.0 * kPi * integrate_panels([&](double s) { return rho2(s) * s * s; },
                                               below, rule)
                : 0.0;
    std::vector<double> above{r};
    for (double e = std::max(2.0 * r, r + 0.5); e < 120.0 + r; e *= 2.0) above.push_back(e);
    above.push_back(120.0 + r);
    const double potential_outside =
        4.0 * kPi * integrate_panels([&](double s) { return rho2(s) * s; }, above, rule);
    const double inside = r > 0.0 ? charge_inside / r : 0.0;
    return rho1(r) * (inside + potential_outside);
  });
}

}  // namespace

PsState::PsState(int n_, int l_, int m_) : n(n_), l(l_), m(m_) {
  if (!supported(n, l) || std::abs(m) > l) {
    throw DomainError("PsState: unsupported state n=" + std::to_string(n) +
                      " l=" + std::to_string(l) + " m=" + std::to_string(m));
  }
}

PsState PsState::parse(std::string_view label) {
  if (label.size() < 2 || label[0] < '1' || label[0] > '9') {
    throw DomainError("PsState: cannot parse state label '" + std::string(label) + "'");
  }
  const int n = label[0] - '0';
  int l = -1;
  const char letter = static_cast<char>(std::tolower(static_cast<unsigned char>(label[1])));
  if (letter == 's') l = 0;
  if (letter == 'p') l = 1;
  int m = 0;
  const std::string_view rest = label.substr(2);
  if (!rest.empty()) {
    if (rest == "0") {
      m = 0;
    } else if (rest == "+1" || rest == "1") {
      m = 1;
    } else if (rest == "-1") {
      m = -1;
    } else {
      throw DomainError("PsState: cannot parse state label '" + std::string(label) + "'");
    }
  }
  if (l < 0) throw DomainError("PsState: cannot parse state label '" + std::string(label) + "'");
  return PsState(n, l, m);
}

std::string PsState::label(bool with_m) const {
  std::string s = std::to_string(n) + (l == 0 ? "s" : "p");
  if (with_m && l > 0) s += m > 0 ? "+1" : (m < 0 ? "-1" : "0");
  return s;
}

ScreeningConfig::ScreeningConfig(double mu_) : mu(mu_) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw DomainError("ScreeningConfig: mu must be finite and >= 0, got " + std::to_string(mu));
  }
}

double ScreeningConfig::lambda() const noexcept {
  return mu > 0.0 ? 1.0 / mu : std::numeric_limits<double>::infinity();
}

Vec3 Kinematics::ki_vec() const noexcept {
  return {k_i * std::sin(theta_e), 0.0, k_i * std::cos(theta_e)};
}

double ps_energy(const PsState& state) noexcept { return -0.25 / (state.n * state.n); }

double ps_radial(const PsState& state, double r) noexcept {
  constexpr double a = kPsBohr;
  switch (state.n * 10 + state.l) {
    case 10:
      return 2.0 * std::pow(a, -1.5) * std::exp(-r / a);
    case 20:
      return 2.0 * std::pow(2.0 * a, -1.5) * (1.0 - r / (2.0 * a)) * std::exp(-r / (2.0 * a));
    case 21:
      return std::pow(2.0 * a, -1.5) * (r / a) / std::sqrt(3.0) * std::exp(-r / (2.0 * a));
    case 30:
      return 2.0 * std::pow(3.0 * a, -1.5) *
             (1.0 - 2.0 * r / (3.0 * a) + 2.0 * r * r / (27.0 * a * a)) * std::exp(-r / (3.0 * a));
    default:
      return 0.0;
  }
}

Cplx ps_wavefunction(const PsState& state, const Vec3& rho) {
  const double r = norm(rho);
  const double radial = ps_radial(state, r);
  if (state.l == 0) return radial / std::sqrt(4.0 * kPi);
  if (r == 0.0) return 0.0;
  // Condon-Shortley phase.
  if (state.m == 0) return radial * std::sqrt(3.0 / (4.0 * kPi)) * rho.z / r;
  const double c = -state.m * std::sqrt(3.0 / (8.0 * kPi)) / r;
  return radial * c * Cplx(rho.x, state.m * rho.y);
}

double hbar_wavefunction(double r3) noexcept { return std::exp(-r3) / std::sqrt(kPi); }

double hbar_wavefunction(const Vec3& r3) noexcept { return hbar_wavefunction(norm(r3)); }

double hplus_wavefunction(const ChandrasekharParams& p, double r2, double r3) noexcept {
  return p.N / (4.0 * kPi) *
         (std::exp(-p.alpha * r2 - p.beta * r3) + std::exp(-p.beta * r2 - p.alpha * r3));
}

double hplus_norm(const ChandrasekharParams& p) {
  const Orbital a{p.alpha}, b{p.beta};
  const double pref = p.N / (4.0 * kPi);
  return pref * pref * 2.0 * (overlap(a, a) * overlap(b, b) + overlap(a, b) * overlap(a, b));
}

double hplus_variational_energy(const ChandrasekharParams& p) {
  if (!(p.alpha > 0.0 && p.beta > 0.0)) {
    throw DomainError("hplus_variational_energy: exponents must be positive");
  }
  const Orbital a{p.alpha}, b{p.beta};
  const double saa = overlap(a, a), sbb = overlap(b, b), sab = overlap(a, b);
  const double haa = one_body(a, a), hbb = one_body(b, b), hab = one_body(a, b);
  // Phi = a(2) b(3) + b(2) a(3); normalization constant cancels.
  const double norm2 = 2.0 * (saa * sbb + sab * sab);
  const double h1 = 2.0 * (haa * sbb + saa * hbb + 2.0 * hab * sab);
  const double v12 = 2.0 * (monopole(a, a, b, b) + monopole(a, b, a, b));
  const double e = (h1 + v12) / norm2;
  if (!std::isfinite(e)) throw NonConvergenceError("hplus_variational_energy: non-finite result");
  return e;
}

Kinematics kinematics(double E_i_ev, const PsState& state,
                      [[maybe_unused]] const ScreeningConfig& screen, double theta_e,
                      std::optional<double> eps_hplus_override) {
  // Bound states are unscreened; mu enters only through the perturbation.
  if (!(E_i_ev > 0.0) || !std::isfinite(E_i_ev)) {
    throw DomainError("kinematics: incident energy must be positive, got " +
                      std::to_string(E_i_ev));
  }
  Kinematics kin;
  kin.E_i = E_i_ev;
  kin.theta_e = theta_e;
  kin.eps_ps = ps_energy(state);
  kin.eps_hbar = kEpsHbarDefault;
  kin.eps_hplus = eps_hplus_override.value_or(kEpsHplusDefault);
  const double e_i = ev_to_au(E_i_ev);
  const double e1 = e_i + kin.eps_ps + kin.eps_hbar - kin.eps_hplus;
  if (!(e1 > 0.0)) {
    throw BelowThresholdError("kinematics: E_i = " + std::to_string(E_i_ev) + " eV is below the " +
                                  state.label() + " threshold",
                              e1);
  }
  kin.k_i = std::sqrt(2.0 * kin.mu_i * e_i);
  kin.k1 = std::sqrt(2.0 * kin.mu_f * e1);
  return kin;
}

double threshold_ev(const PsState& state, std::optional<double> eps_hplus_override) noexcept {
  const double eps_hplus = eps_hplus_override.value_or(kEpsHplusDefault);
  return au_to_ev(eps_hplus - ps_energy(state) - kEpsHbarDefault);
}

}  // namespace psbar
