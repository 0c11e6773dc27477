#include "psbar/xsec.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "psbar/error.hpp"
#include "psbar/quadrature.hpp"

namespace psbar {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> substates(const PsState& state, bool m_resolved) {
  if (m_resolved || state.l == 0) return {state.m};
  std::vector<int> ms;
  for (int m = -state.l; m <= state.l; ++m) ms.push_back(m);
  return ms;
}

Vec3 incident(double k_i, double theta) {
  return {k_i * std::sin(theta), 0.0, k_i * std::cos(theta)};
}

// SDCS for each incident direction and mu from a batch, with per-replicate
// linearized deviations.
std::vector<Estimate> to_sdcs(const AmplitudeBatch& batch, const AmplitudeGrid& grid,
                              const Kinematics& kin) {
  const double flux = kin.k1 / kin.k_i / double(grid.ms.size());
  const std::size_t reps = batch.replicate_t.size();
  std::vector<Estimate> out(grid.mus.size() * grid.ki.size());
  for (std::size_t s = 0; s < grid.mus.size(); ++s) {
    for (std::size_t a = 0; a < grid.ki.size(); ++a) {
      Estimate& e = out[s * grid.ki.size() + a];
      e.deviations.assign(reps, 0.0);
      for (std::size_t m = 0; m < grid.ms.size(); ++m) {
        const std::size_t cell = grid.index(m, s, a);
        const Cplx t = batch.values[cell].t;
        e.value += flux * std::norm(t);
        for (std::size_t r = 0; r < reps; ++r) {
          e.deviations[r] += flux * 2.0 * std::real(std::conj(t) * (batch.replicate_t[r][cell] - t));
        }
      }
    }
  }
  return out;
}

Kinematics checked_kinematics(double E_i_ev, const PsState& state, const XsecOptions& options) {
  return kinematics(E_i_ev, state, ScreeningConfig(0.0), 0.0, options.eps_hplus_override);
}

}  // namespace

std::string CrossSectionRecord::state_label() const { return state.label(m_resolved); }

double Estimate::std_err() const {
  const std::size_t n = deviations.size();
  if (n < 2) return 0.0;
  double sq = 0.0;
  for (double d : deviations) sq += d * d;
  return std::sqrt(sq / (double(n) * double(n - 1)));
}

double paired_std_err(const Estimate& a, const Estimate& b) {
  if (a.deviations.size() != b.deviations.size()) {
    throw DomainError("paired_std_err: estimates come from different batches");
  }
  Estimate d;
  d.deviations.resize(a.deviations.size());
  for (std::size_t i = 0; i < d.deviations.size(); ++i) {
    d.deviations[i] = a.deviations[i] - b.deviations[i];
  }
  return d.std_err();
}

double TcsEstimate::std_err() const {
  return std::hypot(value.std_err(), value.value - coarse);
}

std::vector<Estimate> sdcs_grid(double E_i_ev, const PsState& state, std::span<const double> mus,
                                std::span<const double> angles_deg, const XsecOptions& options) {
  const Kinematics kin = checked_kinematics(E_i_ev, state, options);
  AmplitudeGrid grid;
  grid.ms = substates(state, options.m_resolved);
  grid.mus.assign(mus.begin(), mus.end());
  for (double mu : grid.mus) (void)ScreeningConfig(mu);
  for (double deg : angles_deg) {
    if (!(deg >= 0.0 && deg <= 180.0)) throw DomainError("sdcs: angle outside [0, 180] degrees");
    grid.ki.push_back(incident(kin.k_i, deg * kPi / 180.0));
  }
  const AmplitudeBatch batch = amplitude_batch(kin, state, grid, options.spec, options.integrand);
  return to_sdcs(batch, grid, kin);
}

std::vector<TcsEstimate> tcs_grid(double E_i_ev, const PsState& state, std::span<const double> mus,
                                  int n_theta, const XsecOptions& options) {
  if (n_theta < 8) throw DomainError("tcs: n_theta must be >= 8");
  const Kinematics kin = checked_kinematics(E_i_ev, state, options);
  const GaussRule fine = gauss_legendre(n_theta);
  const GaussRule coarse = gauss_legendre(n_theta / 2);

  AmplitudeGrid grid;
  grid.ms = substates(state, options.m_resolved);
  grid.mus.assign(mus.begin(), mus.end());
  for (double mu : grid.mus) (void)ScreeningConfig(mu);
  for (double x : fine.nodes) grid.ki.push_back(incident(kin.k_i, std::acos(x)));
  for (double x : coarse.nodes) grid.ki.push_back(incident(kin.k_i, std::acos(x)));
  const AmplitudeBatch batch = amplitude_batch(kin, state, grid, options.spec, options.integrand);
  const std::vector<Estimate> sd = to_sdcs(batch, grid, kin);

  const std::size_t reps = batch.replicate_t.size();
  std::vector<TcsEstimate> out(grid.mus.size());
  for (std::size_t s = 0; s < grid.mus.size(); ++s) {
    const Estimate* row = sd.data() + s * grid.ki.size();
    TcsEstimate& t = out[s];
    t.value.deviations.assign(reps, 0.0);
    for (std::size_t j = 0; j < fine.nodes.size(); ++j) {
      const double w = 2.0 * kPi * fine.weights[j];
      t.value.value += w * row[j].value;
      for (std::size_t r = 0; r < reps; ++r) t.value.deviations[r] += w * row[j].deviations[r];
    }
    for (std::size_t j = 0; j < coarse.nodes.size(); ++j) {
      t.coarse += 2.0 * kPi * coarse.weights[j] * row[fine.nodes.size() + j].value;
    }
  }
  return out;
}

CrossSectionRecord sdcs(const Kinematics& kin, const PsState& state, const ScreeningConfig& screen,
                        const IntegrationSpec& spec) {
  if (!(kin.k1 > 0.0)) throw BelowThresholdError("sdcs: closed channel", 0.0);
  AmplitudeGrid grid;
  grid.ms = substates(state, false);
  grid.mus = {screen.mu};
  grid.ki = {kin.ki_vec()};
  const AmplitudeBatch batch = amplitude_batch(kin, state, grid, spec);
  const Estimate e = to_sdcs(batch, grid, kin).front();
  CrossSectionRecord rec{state, false, kin.E_i, screen.mu, kin.theta_e * 180.0 / kPi,
                         e.value, e.std_err(), RecordStatus::Ok};
  return rec;
}

CrossSectionRecord tcs(double E_i_ev, const PsState& state, const ScreeningConfig& screen,
                       const IntegrationSpec& spec, int n_theta) {
  XsecOptions options;
  options.spec = spec;
  const double mu = screen.mu;
  const TcsEstimate t = tcs_grid(E_i_ev, state, std::span<const double>(&mu, 1), n_theta, options).front();
  return {state, false, E_i_ev, mu, std::nullopt, t.value.value, t.std_err(), RecordStatus::Ok};
}

double solid_angle_integral(const std::function<double(double)>& f, int n) {
  const GaussRule rule = gauss_legendre(n);
  double sum = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) sum += rule.weights[j] * f(rule.nodes[j]);
  return 2.0 * kPi * sum;
}

std::uint64_t task_seed(std::uint64_t master, const PsState& state, bool m_resolved, double E_i_ev) {
  std::uint64_t h = mix_seed(master, static_cast<std::uint64_t>(state.n * 100 + state.l * 10 + state.m + 1));
  h = mix_seed(h, m_resolved ? 1 : 0);
  return mix_seed(h, std::bit_cast<std::uint64_t>(E_i_ev));
}

}  // namespace psbar
