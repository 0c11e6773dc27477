#include "psbar/amplitude.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "psbar/error.hpp"
#include "psbar/parallel.hpp"

namespace psbar {

namespace {

constexpr double kPi = std::numbers::pi;

double yukawa(double mu, double r) { return std::exp(-mu * r) / r; }

// r3 integral for radii a = |r1|, b = |r2|.
double inner_radial(double a, double b, double mu, const ChandrasekharParams& ch,
                    const Perturbation& terms) {
  const double pref = ch.N / (4.0 * kPi * std::sqrt(kPi));
  const double ea = std::exp(-ch.alpha * b);
  const double eb = std::exp(-ch.beta * b);
  const double c_b = ch.beta + 1.0;   // r3 decay paired with exp(-alpha r2)
  const double c_a = ch.alpha + 1.0;  // r3 decay paired with exp(-beta r2)
  const double overlap = pref * 8.0 * kPi * (ea / (c_b * c_b * c_b) + eb / (c_a * c_a * c_a));

  double value = 0.0;
  if (terms.electron_core != 0.0) value += terms.electron_core * overlap * yukawa(mu, a);
  if (terms.positron_core != 0.0) value += terms.positron_core * overlap * yukawa(mu, b);
  if (terms.electron_positron != 0.0) {
    value += terms.electron_positron * pref *
             (ea * yukawa_exp_convolution(c_b, mu, a) + eb * yukawa_exp_convolution(c_a, mu, a));
  }
  if (terms.positron_positron != 0.0) {
    value += terms.positron_positron * pref *
             (ea * yukawa_exp_convolution(c_b, mu, b) + eb * yukawa_exp_convolution(c_a, mu, b));
  }
  return value;
}

// Everything in the integrand that does not depend on the magnetic
// substate, the screening or the incident direction.
struct FinalStateFactor {
  bool valid = false;
  Cplx value;
};

FinalStateFactor final_state_factor(const Vec3& r1, const Vec3& rho, const Vec3& k1_hat,
                                    const DistortionParams& dist) {
  const double b1 = r_plus_z(r1, k1_hat);
  const double b12 = r_plus_z(rho, k1_hat);
  if (!(b1 >= kEpsGeom) || !(b12 >= kEpsGeom)) return {};
  const Cplx coulomb = coulomb_distortion_x(dist, dist.k1 * b1, true);
  // (r1 + z1)^{-i eta} (r12 + z12)^{+i eta} e^{-i k1.r1}
  const double phase = -dist.eta1 * (std::log(b1) - std::log(b12)) - dist.k1 * dot(r1, k1_hat);
  return {true, coulomb * std::polar(1.0, phase)};
}

struct GridSampler {
  const Kinematics& kin;
  const AmplitudeGrid& grid;
  const IntegrandOptions& options;
  DistortionParams dist;
  Vec3 k1_hat;
  std::vector<PsState> substates;
  RadialMixture r2_density;
  RadialMixture rho_density;

  GridSampler(const Kinematics& k, const PsState& state, const AmplitudeGrid& g,
              const IntegrandOptions& o)
      : kin(k),
        grid(g),
        options(o),
        dist(DistortionParams::from_momentum(k.k1)),
        k1_hat(normalized(g.k1_hat)),
        r2_density(positron_proposal(o.chand)),
        rho_density(relative_proposal(state)) {
    for (int m : g.ms) substates.emplace_back(state.n, state.l, m);
  }

  // Adds weight * integrand for every grid cell into acc.
  void accumulate(const double* u, std::vector<Cplx>& acc, std::vector<Cplx>& phi,
                  std::vector<double>& inner, std::vector<Cplx>& incident) const {
    const double r2 = r2_density.quantile(u[0]);
    const double rho = rho_density.quantile(u[3]);
    const Vec3 v2 = unit_vector(u[1], u[2]) * r2;
    const Vec3 vrho = unit_vector(u[4], u[5]) * rho;
    const Vec3 v1 = v2 + vrho;
    const FinalStateFactor fs = final_state_factor(v1, vrho, k1_hat, dist);
    if (!fs.valid) return;
    const double weight = (4.0 * kPi * r2 * r2 / r2_density.pdf(r2)) *
                          (4.0 * kPi * rho * rho / rho_density.pdf(rho));
    const Cplx base = fs.value * weight;

    const double a = norm(v1);
    for (std::size_t i = 0; i < grid.mus.size(); ++i) {
      inner[i] = inner_radial(a, r2, grid.mus[i], options.chand, options.terms);
    }
    for (std::size_t i = 0; i < substates.size(); ++i) phi[i] = ps_wavefunction(substates[i], vrho);
    const Vec3 center = (v1 + v2) * 0.5;
    for (std::size_t i = 0; i < grid.ki.size(); ++i) {
      incident[i] = std::polar(1.0, dot(grid.ki[i], center));
    }
    for (std::size_t m = 0; m < substates.size(); ++m) {
      for (std::size_t s = 0; s < grid.mus.size(); ++s) {
        const Cplx common = base * phi[m] * inner[s];
        Cplx* out = acc.data() + grid.index(m, s, 0);
        for (std::size_t k = 0; k < grid.ki.size(); ++k) {
          const Cplx c = common * incident[k];
          out[k] += options.conj_convention ? std::conj(c) : c;
        }
      }
    }
  }
};

// Mean and RMS component standard error over replicate estimates.
AmplitudeValue summarize(const std::vector<std::vector<Cplx>>& reps, std::size_t cell) {
  const std::size_t n = reps.size();
  Cplx mean = 0.0;
  for (const auto& r : reps) mean += r[cell];
  mean /= double(n);
  double vre = 0.0, vim = 0.0;
  for (const auto& r : reps) {
    const Cplx d = r[cell] - mean;
    vre += d.real() * d.real();
    vim += d.imag() * d.imag();
  }
  vre /= double(n - 1);
  vim /= double(n - 1);
  return {mean, std::sqrt(0.5 * (vre + vim) / double(n))};
}

void check_accuracy(const AmplitudeValue& v, const IntegrationSpec& spec, const char* who) {
  const double mag = std::abs(v.t);
  if (!(v.std_err <= spec.target_rel_err * mag)) {
    throw AccuracyNotReachedError(std::string(who) + ": relative error " +
                                  std::to_string(v.std_err / mag) + " exceeds target " +
                                  std::to_string(spec.target_rel_err) + " at " +
                                  std::to_string(spec.samples) + " samples");
  }
}

}  // namespace

void IntegrationSpec::validate() const {
  if (samples < 1000) throw DomainError("IntegrationSpec: samples must be >= 1000");
  if (!(target_rel_err > 0.0 && target_rel_err < 1.0)) {
    throw DomainError("IntegrationSpec: target_rel_err must lie in (0, 1)");
  }
  if (replicates < 8) throw DomainError("IntegrationSpec: at least 8 replicates are required");
  if (threads < 1) throw DomainError("IntegrationSpec: threads must be >= 1");
}

double yukawa_exp_convolution(double c, double mu, double x) {
  if (!(c > 0.0)) throw DomainError("yukawa_exp_convolution: decay constant must be positive");
  if (!(mu >= 0.0) || !(x >= 0.0)) {
    throw DomainError("yukawa_exp_convolution: mu and x must be non-negative");
  }
  // J = (4 pi / s) exp(-mu x) [x psi(u) + phi(u) / s],  s = c + mu, u = (c - mu) x,
  // phi(u) = (1 - e^-u)/u, psi(u) = (1 - (1 + u) e^-u)/u^2.
  const double s = c + mu;
  const double u = (c - mu) * x;
  if (std::abs(u) <= 0.5) {
    double phi = 0.0, psi = 0.0;
    double power = 1.0;  // (-u)^n / (n + 2)!
    double fact = 2.0;
    for (int n = 0; n < 24; ++n) {
      psi += (n + 1) * power / fact;
      phi += (n + 2) * power / fact;  // (-u)^n / (n + 1)! = (n + 2) (-u)^n / (n + 2)!
      power *= -u;
      fact *= n + 3;
    }
    return 4.0 * kPi / s * std::exp(-mu * x) * (x * psi + phi / s);
  }
  const double em = std::exp(-mu * x);
  const double ec = std::exp(-c * x);
  return 4.0 * kPi / s * (x * (em - (1.0 + u) * ec) / (u * u) + (em - ec) / (u * s));
}

double inner_r3_reduction(const Vec3& r1, const Vec3& r2, const ScreeningConfig& screen,
                          const ChandrasekharParams& chand, const Perturbation& terms) {
  return inner_radial(norm(r1), norm(r2), screen.mu, chand, terms);
}

CollisionFrame CollisionFrame::standard(const Kinematics& kin) {
  return {kin.k1_vec(), kin.ki_vec()};
}

Cplx reduced_integrand(const IntegrandPoint& p, const Kinematics& kin,
                       const ScreeningConfig& screen, const PsState& state,
                       bool conj_convention) {
  IntegrandOptions options;
  options.conj_convention = conj_convention;
  return reduced_integrand(p, CollisionFrame::standard(kin),
                           DistortionParams::from_momentum(kin.k1), screen, state, options);
}

Cplx reduced_integrand(const IntegrandPoint& p, const CollisionFrame& frame,
                       const DistortionParams& distortion, const ScreeningConfig& screen,
                       const PsState& state, const IntegrandOptions& options) {
  const Vec3 k1_hat = normalized(frame.k1_vec);
  const Vec3 rho = p.r1 - p.r2;
  // validates the geometry (throws on the negative axis)
  const Cplx eikonal = std::conj(eikonal_phase(p.r1, rho, distortion.eta1, k1_hat));
  const double x = distortion.k1 * r_plus_z(p.r1, k1_hat);
  const Cplx coulomb = coulomb_distortion_x(distortion, x, true);
  const Cplx waves = std::polar(1.0, dot(frame.ki_vec, (p.r1 + p.r2) * 0.5) - dot(frame.k1_vec, p.r1));
  const double inner = inner_radial(norm(p.r1), norm(p.r2), screen.mu, options.chand, options.terms);
  const Cplx value = coulomb * eikonal * waves * inner * ps_wavefunction(state, rho);
  return options.conj_convention ? std::conj(value) : value;
}

RadialMixture positron_proposal(const ChandrasekharParams& chand) {
  return RadialMixture({{2, chand.beta, 0.5}, {2, chand.alpha, 0.5}});
}

RadialMixture relative_proposal(const PsState& state) {
  const double rate = 1.0 / (2.0 * state.n);
  if (state.n == 1) return RadialMixture({{3, rate, 1.0}});
  return RadialMixture({{3, rate, 0.5}, {state.n + 2, rate, 0.5}});
}

RadialMixture hbar_positron_proposal(const ChandrasekharParams& chand) {
  return RadialMixture({{3, chand.beta + 1.0, 0.5}, {3, chand.alpha + 1.0, 0.5}});
}

AmplitudeBatch amplitude_batch(const Kinematics& kin, const PsState& state,
                               const AmplitudeGrid& grid, const IntegrationSpec& spec,
                               const IntegrandOptions& options) {
  spec.validate();
  if (spec.method != Method::QuasiMonteCarlo) {
    throw DomainError("amplitude: the production integrator requires the quasi-MC method");
  }
  if (grid.size() == 0) throw DomainError("amplitude: empty amplitude grid");
  for (int m : grid.ms) PsState(state.n, state.l, m);  // validates substates

  const GridSampler sampler(kin, state, grid, options);
  const int reps = spec.replicates;
  const auto per = static_cast<std::size_t>((spec.samples + reps - 1) / reps);
  const ShiftedSobol sobol(6, per);
  const double scale = -kin.mu_f / (2.0 * kPi) / double(per);

  AmplitudeBatch out;
  out.replicate_t.assign(static_cast<std::size_t>(reps), std::vector<Cplx>(grid.size()));
  parallel_for(static_cast<std::size_t>(reps), spec.threads, [&](std::size_t r) {
    const auto shift = sobol.shift(spec.seed, static_cast<int>(r));
    std::vector<Cplx> acc(grid.size());
    std::vector<Cplx> phi(grid.ms.size()), incident(grid.ki.size());
    std::vector<double> inner(grid.mus.size());
    double u[6];
    for (std::size_t i = 0; i < per; ++i) {
      sobol.point(i, shift, u);
      sampler.accumulate(u, acc, phi, inner, incident);
    }
    for (auto& v : acc) v *= scale;
    out.replicate_t[r] = std::move(acc);
  });

  out.values.resize(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    out.values[c] = summarize(out.replicate_t, c);
    if (!std::isfinite(out.values[c].t.real()) || !std::isfinite(out.values[c].t.imag()) ||
        !std::isfinite(out.values[c].std_err)) {
      throw NonConvergenceError("amplitude: non-finite estimate");
    }
  }
  return out;
}

AmplitudeValue amplitude(const Kinematics& kin, const PsState& state,
                         const ScreeningConfig& screen, const IntegrationSpec& spec,
                         const IntegrandOptions& options) {
  AmplitudeGrid grid;
  grid.ms = {state.m};
  grid.mus = {screen.mu};
  grid.ki = {kin.ki_vec()};
  const AmplitudeValue v = amplitude_batch(kin, state, grid, spec, options).values.front();
  check_accuracy(v, spec, "amplitude");
  return v;
}

AmplitudeValue amplitude_oracle_9d(const Kinematics& kin, const PsState& state,
                                   const ScreeningConfig& screen, const IntegrationSpec& spec,
                                   const IntegrandOptions& options) {
  spec.validate();
  if (spec.method != Method::PlainMonteCarloOracle) {
    throw DomainError("amplitude_oracle_9d: requires the plain Monte Carlo method");
  }
  const DistortionParams dist = DistortionParams::from_momentum(kin.k1);
  const Vec3 k1_hat{0.0, 0.0, 1.0};
  const Vec3 ki = kin.ki_vec();
  const RadialMixture d2 = positron_proposal(options.chand);
  const RadialMixture drho = relative_proposal(state);
  const RadialMixture d3 = hbar_positron_proposal(options.chand);
  const Perturbation& v = options.terms;
  const double mu = screen.mu;

  const int batches = spec.replicates;
  const auto per = static_cast<std::size_t>((spec.samples + batches - 1) / batches);
  struct Moments {
    Cplx sum;
    double sq_re = 0.0;
    double sq_im = 0.0;
  };
  std::vector<Moments> moments(static_cast<std::size_t>(batches));

  parallel_for(static_cast<std::size_t>(batches), spec.threads, [&](std::size_t b) {
    std::mt19937_64 rng(mix_seed(spec.seed, 0x9d00 + b));
    auto uniform = [&rng] { return (double(rng() >> 11) + 0.5) * 0x1.0p-53; };
    Moments mom;
    for (std::size_t i = 0; i < per; ++i) {
      const double r2 = d2.quantile(uniform());
      const Vec3 v2 = unit_vector(uniform(), uniform()) * r2;
      const double rho = drho.quantile(uniform());
      const Vec3 vrho = unit_vector(uniform(), uniform()) * rho;
      const double r3 = d3.quantile(uniform());
      const Vec3 v3 = unit_vector(uniform(), uniform()) * r3;
      const Vec3 v1 = v2 + vrho;
      const FinalStateFactor fs = final_state_factor(v1, vrho, k1_hat, dist);
      if (!fs.valid) continue;
      const double r1 = norm(v1);
      const double pert = v.electron_core * yukawa(mu, r1) + v.positron_core * yukawa(mu, r2) +
                          v.electron_positron * yukawa(mu, norm(v1 - v3)) +
                          v.positron_positron * yukawa(mu, norm(v2 - v3));
      if (pert == 0.0) continue;
      const double weight = (4.0 * kPi * r2 * r2 / d2.pdf(r2)) *
                            (4.0 * kPi * rho * rho / drho.pdf(rho)) *
                            (4.0 * kPi * r3 * r3 / d3.pdf(r3));
      const double bound = hplus_wavefunction(options.chand, r2, r3) * hbar_wavefunction(r3);
      Cplx c = fs.value * std::polar(1.0, dot(ki, (v1 + v2) * 0.5)) *
               ps_wavefunction(state, vrho) * (bound * pert * weight);
      if (options.conj_convention) c = std::conj(c);
      mom.sum += c;
      mom.sq_re += c.real() * c.real();
      mom.sq_im += c.imag() * c.imag();
    }
    moments[b] = mom;
  });

  Moments total;
  for (const auto& m : moments) {
    total.sum += m.sum;
    total.sq_re += m.sq_re;
    total.sq_im += m.sq_im;
  }
  const double n = double(per) * batches;
  const Cplx mean = total.sum / n;
  const double var_re = std::max(0.0, (total.sq_re - n * mean.real() * mean.real()) / (n - 1.0));
  const double var_im = std::max(0.0, (total.sq_im - n * mean.imag() * mean.imag()) / (n - 1.0));
  const double scale = -kin.mu_f / (2.0 * kPi);
  AmplitudeValue out{scale * mean, std::abs(scale) * std::sqrt(0.5 * (var_re + var_im) / n)};
  if (!std::isfinite(out.t.real()) || !std::isfinite(out.t.imag())) {
    throw NonConvergenceError("amplitude_oracle_9d: non-finite estimate");
  }
  if (out.t != 0.0) check_accuracy(out, spec, "amplitude_oracle_9d");
  return out;
}

}  // namespace psbar
