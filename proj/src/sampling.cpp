#include "psbar/sampling.hpp"

#include <boost/random/sobol.hpp>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>

#include "psbar/error.hpp"
#include "psbar/parallel.hpp"

namespace psbar {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Upper regularized tail of Gamma(k, rate): exp(-x) sum_{j<k} x^j / j!.
double gamma_tail(int k, double x) {
  double term = 1.0, sum = 1.0;
  for (int j = 1; j < k; ++j) {
    term *= x / j;
    sum += term;
  }
  return std::exp(-x) * sum;
}

}  // namespace

RadialMixture::RadialMixture(std::vector<Component> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw DomainError("RadialMixture: no components");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.shape < 1 || !(c.rate > 0.0) || !(c.weight > 0.0)) {
      throw DomainError("RadialMixture: invalid component");
    }
    total += c.weight;
  }
  for (auto& c : components_) c.weight /= total;
}

double RadialMixture::pdf(double r) const noexcept {
  if (r < 0.0) return 0.0;
  double p = 0.0;
  for (const auto& c : components_) {
    p += c.weight * std::pow(c.rate, c.shape) * std::pow(r, c.shape - 1) * std::exp(-c.rate * r) /
         factorial(c.shape - 1);
  }
  return p;
}

double RadialMixture::cdf(double r) const noexcept {
  if (r <= 0.0) return 0.0;
  double tail = 0.0;
  for (const auto& c : components_) tail += c.weight * gamma_tail(c.shape, c.rate * r);
  return 1.0 - tail;
}

double RadialMixture::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("RadialMixture::quantile: u must be in (0, 1)");
  // Work with the tail 1 - u for accuracy near u -> 1.
  const double target_tail = 1.0 - u;
  auto tail = [&](double r) {
    double t = 0.0;
    for (const auto& c : components_) t += c.weight * gamma_tail(c.shape, c.rate * r);
    return t;
  };
  double lo = 0.0, hi = 1.0;
  double min_rate = components_.front().rate;
  for (const auto& c : components_) min_rate = std::min(min_rate, c.rate);
  hi = 1.0 / min_rate;
  while (tail(hi) > target_tail) {
    lo = hi;
    hi *= 2.0;
  }
  double r = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = tail(r) - target_tail;  // decreasing in r
    if (f > 0.0) {
      lo = r;
    } else {
      hi = r;
    }
    const double p = pdf(r);
    double next = p > 0.0 ? r + f / p : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= 1e-14 * r || hi - lo <= 1e-14 * hi) return next;
    r = next;
  }
  return r;
}

Vec3 unit_vector(double u_cos, double u_phi) noexcept {
  const double ct = 1.0 - 2.0 * u_cos;
  const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  const double phi = 2.0 * std::numbers::pi * u_phi;
  return {st * std::cos(phi), st * std::sin(phi), ct};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ShiftedSobol::ShiftedSobol(int dims, std::size_t count) : dims_(dims), count_(count) {
  if (dims < 1) throw DomainError("ShiftedSobol: dims must be positive");
  boost::random::sobol_engine<std::uint32_t, 32> engine(static_cast<std::size_t>(dims));
  digits_.resize(count * static_cast<std::size_t>(dims));
  for (auto& d : digits_) d = engine();
}

void ShiftedSobol::point(std::size_t i, const std::vector<std::uint32_t>& shift,
                         double* u) const noexcept {
  constexpr double kScale = 1.0 / 4294967296.0;
  const std::uint32_t* row = digits_.data() + i * static_cast<std::size_t>(dims_);
  for (int d = 0; d < dims_; ++d) u[d] = ((row[d] ^ shift[d]) + 0.5) * kScale;
}

std::vector<std::uint32_t> ShiftedSobol::shift(std::uint64_t seed, int replicate) const {
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(replicate)));
  std::vector<std::uint32_t> s(static_cast<std::size_t>(dims_));
  for (auto& v : s) v = static_cast<std::uint32_t>(rng() >> 32);
  return s;
}

int default_thread_count() {
  if (const char* env = std::getenv("PSBAR_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace psbar
