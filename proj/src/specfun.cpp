#include "psbar/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "psbar/error.hpp"

namespace psbar {

namespace {

constexpr double kPi = std::numbers::pi;
const Cplx kI{0.0, 1.0};

// Godfrey's coefficients, g = 607/128.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};

bool is_finite(Cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool is_nonpositive_integer(Cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

Cplx lanczos_lgamma(Cplx z) {
  z -= 1.0;
  Cplx sum = kLanczos[0];
  for (std::size_t k = 1; k < kLanczos.size(); ++k) sum += kLanczos[k] / (z + double(k));
  const Cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

// 1/Gamma(z) in log form; returns false at the poles of Gamma where the
// reciprocal vanishes.
bool log_rgamma(Cplx z, Cplx& out) {
  if (is_nonpositive_integer(z)) return false;
  out = -clgamma(z);
  return true;
}

constexpr double kSeriesTol = 1e-17;
constexpr int kMaxSeriesTerms = 600;

// Plain Maclaurin sum of 1F1(a;1;z) and its derivative.
void maclaurin(Cplx a, Cplx z, Cplx& value, Cplx& deriv) {
  Cplx term = 1.0;
  Cplx sum = 1.0;
  Cplx dsum = 0.0;
  int small = 0;
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    const double kk = k;
    // d/dz of t_k = t_{k-1} (a + k - 1) / k
    const Cplx dterm = term * (a + (kk - 1.0)) / kk;
    term *= (a + (kk - 1.0)) * z / (kk * kk);
    sum += term;
    dsum += dterm;
    if (term == 0.0 && dterm == 0.0) {
      value = sum;
      deriv = dsum;
      return;
    }
    const double scale = std::abs(sum) + std::abs(dsum) + 1e-300;
    if (std::abs(term) + std::abs(dterm) < kSeriesTol * scale && kk > std::abs(z)) {
      if (++small == 2) {
        value = sum;
        deriv = dsum;
        return;
      }
    } else {
      small = 0;
    }
  }
  throw NonConvergenceError("hyp1f1_b1: Maclaurin series did not converge");
}

// One Taylor step of z w'' + (1 - z) w' - a w = 0 from z0 to z0 + h.
void taylor_step(Cplx a, Cplx z0, Cplx h, Cplx& w, Cplx& wp) {
  Cplx c_prev = w;   // c_k
  Cplx c_curr = wp;  // c_{k+1}
  Cplx hk = 1.0;     // h^k
  Cplx value = c_prev;
  Cplx deriv = c_curr;
  int small = 0;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const double kk = k;
    const Cplx c_next =
        ((kk + a) * c_prev - (kk + 1.0) * (kk + 1.0 - z0) * c_curr) / (z0 * (kk + 1.0) * (kk + 2.0));
    hk *= h;
    const Cplx tv = c_curr * hk;                 // c_{k+1} h^{k+1}
    const Cplx td = (kk + 2.0) * c_next * hk;    // (k+2) c_{k+2} h^{k+1}
    value += tv;
    deriv += td;
    const double scale = std::abs(value) + std::abs(h * deriv) + 1e-300;
    if (std::abs(tv) + std::abs(h * td) < kSeriesTol * scale) {
      if (++small == 3) {
        w = value;
        wp = deriv;
        return;
      }
    } else {
      small = 0;
    }
    c_prev = c_curr;
    c_curr = c_next;
  }
  throw NonConvergenceError("hyp1f1_b1: Taylor continuation step did not converge");
}

}  // namespace

double r_plus_z(const Vec3& r, const Vec3& axis) noexcept {
  const double z = dot(r, axis);
  const double len = norm(r);
  if (z >= 0.0) return len + z;
  const Vec3 perp = cross(r, axis);
  return dot(perp, perp) / (len - z);
}

DistortionParams DistortionParams::from_momentum(double k1) {
  if (!(k1 > 0.0) || !std::isfinite(k1)) {
    throw DomainError("DistortionParams: ejected momentum must be positive, got " +
                      std::to_string(k1));
  }
  return {1.0 / k1, 1.0 / k1, k1};
}

Cplx clgamma(Cplx z) {
  if (is_nonpositive_integer(z)) {
    throw PoleError("gamma: pole at non-positive integer " + std::to_string(z.real()));
  }
  if (z.real() < 0.5) {
    return std::log(kPi) - std::log(std::sin(kPi * z)) - lanczos_lgamma(1.0 - z);
  }
  return lanczos_lgamma(z);
}

Cplx cgamma(Cplx z) {
  if (is_nonpositive_integer(z)) {
    throw PoleError("gamma: pole at non-positive integer " + std::to_string(z.real()));
  }
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * cgamma(1.0 - z));
  return std::exp(lanczos_lgamma(z));
}

Cplx hyp1f1_b1_series(Cplx a, Cplx z) {
  const double rz = std::abs(z);
  const double ra = std::abs(a);
  if (rz == 0.0 || a == 0.0) return 1.0;

  // Largest radius at which the Maclaurin terms stay within ~e^8 of the
  // result: r + 2 sqrt(|a| r) <= 8.
  const double s = std::sqrt(ra + 8.0) - std::sqrt(ra);
  const double r0 = s * s;
  Cplx w, wp;
  if (rz <= r0 || is_nonpositive_integer(a)) {
    maclaurin(a, z, w, wp);
    return w;
  }
  const Cplx dir = z / rz;
  double pos = r0;
  maclaurin(a, dir * pos, w, wp);
  constexpr int kMaxSteps = 20000;
  for (int step = 0; pos < rz; ++step) {
    if (step == kMaxSteps) {
      throw NonConvergenceError("hyp1f1_b1: continuation exceeded step budget at |z| = " +
                                std::to_string(rz));
    }
    const double osc = std::max(1.0, std::sqrt(ra / pos));
    const double h = std::min({0.5 * pos, 5.0 / osc, rz - pos});
    taylor_step(a, dir * pos, dir * h, w, wp);
    pos += h;
  }
  return w;
}

AsymptoticSum hyp1f1_b1_asymptotic(Cplx a, Cplx z) {
  const double rz = std::abs(z);
  if (rz == 0.0) throw DomainError("hyp1f1_b1_asymptotic: z = 0");
  const double sign = z.imag() >= 0.0 ? 1.0 : -1.0;
  const Cplx logz = std::log(z);

  // Sum_s (p)_s (q)_s / s! x^s, stopped at the smallest term. For large |p|
  // the terms may grow at first; only a rise after a fall ends the sum.
  auto sum_series = [](Cplx p, Cplx q, Cplx x, double& smallest) {
    Cplx term = 1.0;
    Cplx sum = 1.0;
    double last = 1.0;
    bool falling = false;
    smallest = std::numeric_limits<double>::infinity();
    for (int s = 0; s < kMaxSeriesTerms; ++s) {
      const double ss = s;
      const Cplx next = term * (p + ss) * (q + ss) * x / (ss + 1.0);
      const double mag = std::abs(next);
      if (mag > last && falling) break;
      falling = falling || mag < last;
      term = next;
      last = mag;
      smallest = std::min(smallest, mag);
      if (mag < kSeriesTol * std::abs(sum)) break;
      sum += term;
    }
    return sum;
  };

  Cplx value = 0.0;
  double error = 0.0;
  Cplx lr;
  if (log_rgamma(1.0 - a, lr)) {
    double small = 0.0;
    const Cplx s1 = sum_series(a, a, -1.0 / z, small);
    const Cplx pref = std::exp(sign * kI * kPi * a - a * logz + lr);
    value += pref * s1;
    error += std::abs(pref) * small;
  }
  if (log_rgamma(a, lr)) {
    double small = 0.0;
    const Cplx s2 = sum_series(1.0 - a, 1.0 - a, 1.0 / z, small);
    const Cplx pref = std::exp(z + (a - 1.0) * logz + lr);
    value += pref * s2;
    error += std::abs(pref) * small;
  }
  return {value, error};
}

Cplx hyp1f1_b1(Cplx a, Cplx z) {
  if (z == 0.0 || a == 0.0) return 1.0;
  Cplx result;
  if (std::abs(z) < kHyp1f1Crossover || is_nonpositive_integer(a)) {
    result = hyp1f1_b1_series(a, z);
  } else {
    const AsymptoticSum asym = hyp1f1_b1_asymptotic(a, z);
    if (asym.error <= 1e-11 * std::abs(asym.value)) {
      result = asym.value;
    } else {
      result = hyp1f1_b1_series(a, z);
    }
  }
  if (!is_finite(result)) {
    throw NonConvergenceError("hyp1f1_b1: non-finite result");
  }
  return result;
}

Cplx coulomb_distortion_x(const DistortionParams& p, double x, bool conjugated) {
  Cplx value = 1.0;
  if (p.alpha1 != 0.0) {
    const Cplx a{0.0, p.alpha1};
    const Cplx norm_factor = std::exp(-0.5 * kPi * p.alpha1 + clgamma(1.0 + a));
    value = norm_factor * hyp1f1_b1(a, kI * x);
  }
  return conjugated ? value : std::conj(value);
}

Cplx coulomb_distortion(const DistortionParams& p, const Vec3& r1, const Vec3& k1_vec,
                        bool conjugated) {
  const double k = norm(k1_vec);
  if (!(k > 0.0)) throw DomainError("coulomb_distortion: k1 vector must be non-zero");
  const double x = p.k1 * r_plus_z(r1, k1_vec * (1.0 / k));
  return coulomb_distortion_x(p, x, conjugated);
}

Cplx eikonal_phase(const Vec3& r1, const Vec3& r12, double eta1, const Vec3& axis) {
  const double b1 = r_plus_z(r1, axis);
  const double b2 = r_plus_z(r12, axis);
  if (!(b1 >= kEpsGeom) || !(b2 >= kEpsGeom)) {
    throw DegenerateGeometryError("eikonal_phase: point on the negative eikonal axis");
  }
  return std::polar(1.0, eta1 * (std::log(b1) - std::log(b2)));
}

}  // namespace psbar
