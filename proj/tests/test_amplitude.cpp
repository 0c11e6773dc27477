#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "psbar/amplitude.hpp"
#include "psbar/error.hpp"
#include "psbar/quadrature.hpp"
#include "oracles.hpp"

using namespace psbar;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 random_point(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = scale * (0.05 + 3.0 * u(rng));
  return unit_vector(u(rng), u(rng)) * r;
}

IntegrationSpec quick_spec(std::int64_t samples, std::uint64_t seed = 3) {
  IntegrationSpec s;
  s.samples = samples;
  s.seed = seed;
  s.target_rel_err = 0.99;
  return s;
}

Vec3 rotate(const Vec3& v, double ax, double az) {
  const Vec3 a{v.x, v.y * std::cos(ax) - v.z * std::sin(ax), v.y * std::sin(ax) + v.z * std::cos(ax)};
  return {a.x * std::cos(az) - a.y * std::sin(az), a.x * std::sin(az) + a.y * std::cos(az), a.z};
}

}  // namespace

TEST_CASE("yukawa convolution: unscreened closed form and radial oracle") {
  for (double c : {0.3, 1.28309, 2.03925}) {
    for (double x : {0.0, 0.01, 0.7, 3.0, 11.0}) {
      const double j = yukawa_exp_convolution(c, 0.0, x);
      const double coulomb = x == 0.0 ? 4.0 * kPi / (c * c)
                                      : 8.0 * kPi / (c * c * c) *
                                            (1.0 / x - std::exp(-c * x) * (1.0 / x + 0.5 * c));
      CHECK(j == doctest::Approx(coulomb).epsilon(1e-12));
      if (x > 0.0) CHECK(j == doctest::Approx(oracle::yukawa(c, 0.0, x)).epsilon(1e-10));
    }
  }
  for (double mu : {0.05, 0.1, 0.7, 1.2}) {
    for (double x : {0.02, 0.9, 4.0, 15.0}) {
      CHECK(yukawa_exp_convolution(1.28309, mu, x) ==
            doctest::Approx(oracle::yukawa(1.28309, mu, x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("yukawa convolution: large-distance point-charge limit") {
  for (double c : {1.28309, 2.03925}) {
    const double x = 40.0 / c;
    // An exponential orbital seen through a Yukawa kernel acts as a charge
    // 8 pi c / (c^2 - mu^2)^2, which reduces to 8 pi / c^3 at mu = 0.
    CHECK(yukawa_exp_convolution(c, 0.0, x) ==
          doctest::Approx(8.0 * kPi / (c * c * c) / x).epsilon(1e-12));
    for (double mu : {0.05, 0.1, 0.5}) {
      const double q = 8.0 * kPi * c / ((c * c - mu * mu) * (c * c - mu * mu));
      CHECK(yukawa_exp_convolution(c, mu, x) ==
            doctest::Approx(q * std::exp(-mu * x) / x).epsilon(1e-12));
    }
  }
}

TEST_CASE("yukawa convolution: continuity at c = mu and origin") {
  for (double x : {0.0, 0.3, 2.0, 9.0}) {
    const double at = yukawa_exp_convolution(0.8, 0.8, x);
    CHECK(yukawa_exp_convolution(0.8 + 1e-10, 0.8, x) == doctest::Approx(at).epsilon(1e-8));
    CHECK(yukawa_exp_convolution(0.8 - 1e-10, 0.8, x) == doctest::Approx(at).epsilon(1e-8));
  }
  // Both branches of the evaluation meet at |u| = 0.5.
  const double c = 1.5, mu = 0.5;
  CHECK(yukawa_exp_convolution(c, mu, 0.5 - 1e-12) ==
        doctest::Approx(yukawa_exp_convolution(c, mu, 0.5 + 1e-12)).epsilon(1e-11));
  CHECK(yukawa_exp_convolution(c, mu, 0.0) == doctest::Approx(4.0 * kPi / ((c + mu) * (c + mu))));
  CHECK_THROWS_AS(yukawa_exp_convolution(0.0, 0.1, 1.0), DomainError);
  CHECK_THROWS_AS(yukawa_exp_convolution(1.0, -0.1, 1.0), DomainError);
  CHECK_THROWS_AS(yukawa_exp_convolution(1.0, 0.1, -1.0), DomainError);
}

TEST_CASE("inner r3 reduction matches nested quadrature at random points") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 20; ++i) {
    const Vec3 r1 = random_point(rng, 1.0), r2 = random_point(rng, 1.5);
    const double mu = (i % 3) * 0.05;
    const double exact = inner_r3_reduction(r1, r2, ScreeningConfig(mu));
    const double brute = oracle::reduction(r1, r2, mu);
    CHECK(exact == doctest::Approx(brute).epsilon(1e-6));
  }
}

TEST_CASE("inner r3 reduction: screening limit and coincident radii") {
  const Vec3 r1{0.4, -0.3, 1.1}, r2{-0.9, 0.2, 0.5};
  CHECK(inner_r3_reduction(r1, r2, ScreeningConfig(1e-6)) ==
        doctest::Approx(inner_r3_reduction(r1, r2, ScreeningConfig(0.0))).epsilon(1e-5));
  const Vec3 same{0.0, norm(r1), 0.0};
  for (double mu : {0.0, 0.1}) {
    CHECK(std::abs(inner_r3_reduction(r1, same, ScreeningConfig(mu))) < 1e-14);
  }
}

TEST_CASE("reduced integrand: modulus bound") {
  const PsState s = PsState::parse("2p+1");
  const auto kin = kinematics(20.0, s, ScreeningConfig(0.05), 1.1);
  const auto dist = DistortionParams::from_momentum(kin.k1);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const IntegrandPoint p{random_point(rng, 1.0), random_point(rng, 2.0), {}};
    const Cplx v = reduced_integrand(p, kin, ScreeningConfig(0.05), s, false);
    const double bound = std::abs(coulomb_distortion(dist, p.r1, kin.k1_vec(), true)) *
                         std::abs(inner_r3_reduction(p.r1, p.r2, ScreeningConfig(0.05))) *
                         std::abs(ps_wavefunction(s, p.r1 - p.r2));
    CHECK(std::abs(v) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("reduced integrand: plane-wave Born limit") {
  const PsState s(1, 0, 0);
  const auto kin = kinematics(25.0, s, ScreeningConfig(0.0), 0.7);
  const CollisionFrame frame = CollisionFrame::standard(kin);
  const DistortionParams born{0.0, 0.0, kin.k1};
  const ChandrasekharParams ch;
  // Unscreened potential of an exponential orbital.
  auto hartree = [](double c, double x) {
    return 8.0 * kPi / (c * c * c) * (1.0 / x - std::exp(-c * x) * (1.0 / x + 0.5 * c));
  };
  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i) {
    const Vec3 r1 = random_point(rng, 1.0), r2 = random_point(rng, 2.0);
    const double a = norm(r1), b = norm(r2);
    const double pref = ch.N / (4.0 * kPi * std::sqrt(kPi));
    const double ea = std::exp(-ch.alpha * b), eb = std::exp(-ch.beta * b);
    const double ca = ch.alpha + 1.0, cb = ch.beta + 1.0;
    const double overlap = pref * 8.0 * kPi * (ea / (cb * cb * cb) + eb / (ca * ca * ca));
    const double inner = overlap * (1.0 / a - 1.0 / b) -
                         pref * (ea * hartree(cb, a) + eb * hartree(ca, a)) +
                         pref * (ea * hartree(cb, b) + eb * hartree(ca, b));
    const double phi = std::exp(-0.5 * norm(r1 - r2)) / (std::sqrt(kPi) * std::pow(2.0, 1.5));
    const Cplx waves = std::polar(1.0, dot(kin.ki_vec(), (r1 + r2) * 0.5) - dot(kin.k1_vec(), r1));
    const Cplx expected = waves * inner * phi;
    const Cplx got =
        reduced_integrand({r1, r2, {}}, frame, born, ScreeningConfig(0.0), s, IntegrandOptions{});
    CHECK(std::abs(got - expected) <= 1e-10 * std::abs(expected));
  }
}

TEST_CASE("reduced integrand: decay with positron distance") {
  const PsState s(1, 0, 0);
  const auto kin = kinematics(10.0, s, ScreeningConfig(0.0), 0.0);
  const Vec3 r1{0.3, 0.2, 0.5};
  const Vec3 dir = normalized(Vec3{1.0, 1.0, 1.0});
  const double near = std::abs(reduced_integrand({r1, dir * 2.0, {}}, kin, ScreeningConfig(0), s, false));
  const double far = std::abs(reduced_integrand({r1, dir * 30.0, {}}, kin, ScreeningConfig(0), s, false));
  CHECK(near > 0.0);
  CHECK(far < 1e-8 * near);
}

TEST_CASE("reduced integrand: negative eikonal axis is rejected") {
  const PsState s(1, 0, 0);
  const auto kin = kinematics(10.0, s, ScreeningConfig(0.0), 0.0);
  CHECK_THROWS_AS(reduced_integrand({{0, 0, -1.0}, {0.5, 0, 0}, {}}, kin, ScreeningConfig(0), s, false),
                  DegenerateGeometryError);
}

TEST_CASE("integration spec validation") {
  IntegrationSpec s;
  CHECK_NOTHROW(s.validate());
  s.samples = 999;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = {};
  s.target_rel_err = 1.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = {};
  s.replicates = 4;
  CHECK_THROWS_AS(s.validate(), DomainError);
  const PsState st(1, 0, 0);
  const auto kin = kinematics(10.0, st, ScreeningConfig(0.0), 1.0);
  IntegrationSpec oracle_spec;
  oracle_spec.method = Method::PlainMonteCarloOracle;
  CHECK_THROWS_AS(amplitude(kin, st, ScreeningConfig(0), oracle_spec), DomainError);
  CHECK_THROWS_AS(amplitude_oracle_9d(kin, st, ScreeningConfig(0), IntegrationSpec{}), DomainError);
}

TEST_CASE("amplitude: deterministic across runs and thread counts") {
  const PsState s(1, 0, 0);
  const auto kin = kinematics(10.0, s, ScreeningConfig(0.1), 0.3);
  auto spec = quick_spec(16000, 42);
  spec.threads = 1;
  const auto a = amplitude(kin, s, ScreeningConfig(0.1), spec);
  const auto b = amplitude(kin, s, ScreeningConfig(0.1), spec);
  spec.threads = 4;
  const auto c = amplitude(kin, s, ScreeningConfig(0.1), spec);
  CHECK(a.t == b.t);
  CHECK(a.t == c.t);
  CHECK(a.std_err == c.std_err);
  spec.seed = 43;
  CHECK(amplitude(kin, s, ScreeningConfig(0.1), spec).t != a.t);
}

TEST_CASE("amplitude: error shrinks with the sample budget") {
  const PsState s(1, 0, 0);
  const auto kin = kinematics(10.0, s, ScreeningConfig(0.0), 0.3);
  double small = 0.0, large = 0.0;
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const double e1 = amplitude(kin, s, ScreeningConfig(0), quick_spec(4000, seed)).std_err;
    const double e2 = amplitude(kin, s, ScreeningConfig(0), quick_spec(8000, seed)).std_err;
    small += e1;
    large += e2;
    if (e2 < e1) ++improved;
  }
  CHECK(large < small);
  CHECK(improved >= 5);
  const double e16 = amplitude(kin, s, ScreeningConfig(0), quick_spec(16000)).std_err;
  const double e64 = amplitude(kin, s, ScreeningConfig(0), quick_spec(64000)).std_err;
  CHECK(e64 < 0.75 * e16);
}

TEST_CASE("amplitude: accuracy target is enforced") {
  const PsState s(1, 0, 0);
  const auto kin = kinematics(10.0, s, ScreeningConfig(0.0), 1.0);
  auto spec = quick_spec(2000);
  spec.target_rel_err = 1e-6;
  CHECK_THROWS_AS(amplitude(kin, s, ScreeningConfig(0), spec), AccuracyNotReachedError);
}

TEST_CASE("amplitude agrees with the nine-dimensional oracle") {
  const PsState s(1, 0, 0);
  const auto kin = kinematics(10.0, s, ScreeningConfig(0.0), kPi / 3.0);
  const auto qmc = amplitude(kin, s, ScreeningConfig(0), quick_spec(100000));
  auto ospec = quick_spec(400000);
  ospec.method = Method::PlainMonteCarloOracle;
  const auto mc = amplitude_oracle_9d(kin, s, ScreeningConfig(0), ospec);
  const double sigma = std::hypot(qmc.std_err, mc.std_err);
  CHECK(std::abs(qmc.t.real() - mc.t.real()) < 3.0 * sigma * std::sqrt(2.0));
  CHECK(std::abs(qmc.t.imag() - mc.t.imag()) < 3.0 * sigma * std::sqrt(2.0));
}

TEST_CASE("oracle: perturbation terms") {
  const PsState s(1, 0, 0);
  const auto kin = kinematics(10.0, s, ScreeningConfig(0.0), 0.0);
  auto spec = quick_spec(400000);
  spec.method = Method::PlainMonteCarloOracle;
  IntegrandOptions none;
  none.terms = {0.0, 0.0, 0.0, 0.0};
  const auto zero = amplitude_oracle_9d(kin, s, ScreeningConfig(0), spec, none);
  CHECK(zero.t == Cplx(0.0, 0.0));
  CHECK(zero.std_err == 0.0);
  const auto qzero = amplitude_batch(kin, s, {{0}, {0.0}, {kin.ki_vec()}}, quick_spec(4000), none);
  CHECK(qzero.values[0].t == Cplx(0.0, 0.0));

  const auto base = amplitude_oracle_9d(kin, s, ScreeningConfig(0), spec);
  IntegrandOptions flipped;
  flipped.terms.positron_positron = -1.0;
  const auto flip = amplitude_oracle_9d(kin, s, ScreeningConfig(0), spec, flipped);
  CHECK(std::abs(flip.t - base.t) > 5.0 * std::hypot(base.std_err, flip.std_err));
}

TEST_CASE("amplitude: screening continuity for every state") {
  for (const char* label : {"1s", "2s", "2p0", "2p+1", "3s"}) {
    const PsState s = PsState::parse(label);
    const auto kin = kinematics(12.0, s, ScreeningConfig(0.0), 0.8);
    const auto batch = amplitude_batch(kin, s, {{s.m}, {0.0, 1e-5}, {kin.ki_vec()}}, quick_spec(8000));
    const auto& a = batch.values[0];
    const auto& b = batch.values[1];
    CAPTURE(label);
    CHECK(std::abs(a.t - b.t) < 5.0 * std::hypot(a.std_err, b.std_err));
  }
}

TEST_CASE("amplitude: frame independence under a rigid rotation") {
  const PsState s(1, 0, 0);
  const auto kin = kinematics(15.0, s, ScreeningConfig(0.0), 1.2);
  const auto spec = quick_spec(64000);
  AmplitudeGrid standard{{0}, {0.0}, {kin.ki_vec()}, kin.k1_vec()};
  AmplitudeGrid rotated{{0}, {0.0}, {rotate(kin.ki_vec(), 0.7, 2.1)}, rotate(kin.k1_vec(), 0.7, 2.1)};
  const auto a = amplitude_batch(kin, s, standard, spec).values[0];
  const auto b = amplitude_batch(kin, s, rotated, spec).values[0];
  const double sigma = std::hypot(a.std_err, b.std_err);
  CHECK(std::abs(std::abs(a.t) - std::abs(b.t)) < 3.0 * sigma);
}

TEST_CASE("amplitude: conjugation convention changes only the phase") {
  const PsState s(1, 0, 0);
  IntegrandOptions conj;
  conj.conj_convention = true;
  for (double e : {8.0, 20.0, 60.0}) {
    const auto kin = kinematics(e, s, ScreeningConfig(0.05), 0.9);
    const auto a = amplitude(kin, s, ScreeningConfig(0.05), quick_spec(8000));
    const auto b = amplitude(kin, s, ScreeningConfig(0.05), quick_spec(8000), conj);
    CHECK(std::abs(b.t) == doctest::Approx(std::abs(a.t)).epsilon(1e-12));
    CHECK(b.t.imag() == doctest::Approx(-a.t.imag()).epsilon(1e-12));
  }
}

TEST_CASE("amplitude batch: cells match single evaluations") {
  const PsState s = PsState::parse("2p");
  const auto kin = kinematics(15.0, s, ScreeningConfig(0.0), 0.0);
  const auto spec = quick_spec(32000);
  AmplitudeGrid g{{-1, 0, 1}, {0.0, 0.1}, {kin.ki_vec(), Vec3{0.0, 0.0, -kin.k_i}}};
  const auto batch = amplitude_batch(kin, s, g, spec);
  REQUIRE(batch.values.size() == 12);
  REQUIRE(batch.replicate_t.size() == 16);
  const auto single = amplitude(kin, PsState(2, 1, 1), ScreeningConfig(0.1), spec);
  CHECK(batch.values[g.index(2, 1, 0)].t == single.t);
}

TEST_CASE("radial mixture densities") {
  const RadialMixture m({{2, 0.28309, 0.5}, {3, 1.5, 1.5}});
  const std::vector<double> e = geometric_edges(0.25, 400.0);
  CHECK(integrate_panels([&](double r) { return m.pdf(r); }, e, oracle::rule24()) ==
        doctest::Approx(1.0).epsilon(1e-12));
  for (double u : {1e-9, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-9}) {
    const double r = m.quantile(u);
    CHECK(m.cdf(r) == doctest::Approx(u).epsilon(1e-10));
  }
  CHECK_THROWS_AS(m.quantile(0.0), DomainError);
  CHECK_THROWS_AS(RadialMixture({}), DomainError);
  CHECK_THROWS_AS(RadialMixture({{0, 1.0, 1.0}}), DomainError);
}
